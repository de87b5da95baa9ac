"""Exception hierarchy shared by all modules."""


class LocBifiltError(Exception):
    """Base class for library errors."""


class DegenerateInput(LocBifiltError, ValueError):
    """Input violates the genericity assumptions (duplicates, cocircular sites, ...)."""

    def __init__(self, msg, sites=()):
        super().__init__(msg)
        self.sites = tuple(sites)


class CenterDegenerate(DegenerateInput):
    """The center lies on a Voronoi edge or vertex (or projects onto a Voronoi vertex)."""


class CenterEqualsSite(CenterDegenerate):
    pass


class DegenerateTriangle(LocBifiltError, ValueError):
    """Three points that should span a triangle are collinear."""


class EmptyFace(LocBifiltError, ValueError):
    pass


class PEqualsQ(LocBifiltError, ValueError):
    pass


class DegenerateCurves(LocBifiltError, ValueError):
    pass


class SubNotContained(LocBifiltError, ValueError):
    pass


class ResolutionTooCoarse(LocBifiltError, ValueError):
    pass

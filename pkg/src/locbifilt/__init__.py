"""Exact entry curves for absolute and relative localized bifiltrations of planar points."""
from .curves import (EntryCurve, absolute_pipeline, contains, intersect_curves, max_r, min_r)
from .delaunay import SiteSet, triangulate, voronoi_face
from .errors import (CenterDegenerate, CenterEqualsSite, DegenerateCurves, DegenerateInput,
                     LocBifiltError, ResolutionTooCoarse, SubNotContained)
from .paths import maximizing_path, minimizing_path
from .slices import (Bifiltration, Slice, barcode_template, cone, persistence, slice_barcode,
                     slice_entry, slice_filtration)
from .subdivision import nerve_of_pair, relative_pipeline, subdivide

__version__ = "0.1.0"

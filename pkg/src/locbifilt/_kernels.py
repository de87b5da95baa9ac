"""Float raster kernels used by the oracle.

Two interchangeable backends: numba-compiled loops and a numpy/scipy path.
Set LOCBIFILT_NO_NUMBA=1 to force the numpy path; the choice can also be
flipped at runtime through ``set_backend``.
"""
from __future__ import annotations

import math
import os

import numpy as np

_want_numba = os.environ.get("LOCBIFILT_NO_NUMBA", "0").lower() in ("0", "", "false", "no")
_nb = None
if _want_numba:
    try:
        import numba as _nb  # noqa: F401
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _nb = None

USE_NUMBA = _nb is not None


def set_backend(name: str):
    """'numba' or 'numpy'."""
    global USE_NUMBA
    if name == "numba":
        if _nb is None:
            raise RuntimeError("numba backend unavailable")
        USE_NUMBA = True
    elif name == "numpy":
        USE_NUMBA = False
    else:
        raise ValueError(name)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy path


def _occupancy_np(xs, ys, px, py, s, qx, qy, r, relative):
    X = xs[None, :]
    out = np.zeros((ys.size, xs.size), dtype=bool)
    chunk = max(1, 4_000_000 // max(1, xs.size * px.size))
    for j0 in range(0, ys.size, chunk):
        Y = ys[j0:j0 + chunk, None]
        cov = np.zeros((Y.shape[0], xs.size), dtype=bool)
        for k in range(px.size):
            cov |= (X - px[k]) ** 2 + (Y - py[k]) ** 2 <= s
        dq = (X - qx) ** 2 + (Y - qy) ** 2
        out[j0:j0 + chunk] = cov & ((dq >= r) if relative else (dq <= r))
    return out


def _pair_points(px, py, a, qx, qy, b):
    """Crossing points of circle(p_k, a) with circle(q, b) per k, and of site circles pairwise."""
    def cross(x1, y1, r1, x2, y2, r2):
        dx, dy = x2 - x1, y2 - y1
        d2 = dx * dx + dy * dy
        if d2 == 0.0:
            return []
        d = math.sqrt(d2)
        if d > r1 + r2 or d < abs(r1 - r2):
            return []
        t = (r1 * r1 - r2 * r2 + d2) / (2 * d)
        hh = math.sqrt(max(r1 * r1 - t * t, 0.0))
        mx, my = x1 + t * dx / d, y1 + t * dy / d
        return [(mx - hh * dy / d, my + hh * dx / d), (mx + hh * dy / d, my - hh * dx / d)]

    n = px.size
    withq = np.full((n, 2, 3), np.nan)
    for k in range(n):
        for j, pt in enumerate(cross(px[k], py[k], a, qx, qy, b)):
            withq[k, j] = (pt[0], pt[1], 1.0)
    outer = []
    for k in range(n):
        for j in range(k + 1, n):
            for x, y in cross(px[k], py[k], a, px[j], py[j], a):
                d = np.hypot(px - x, py - y)
                d[[k, j]] = np.inf
                if np.all(d >= a * (1 - 1e-12) - 1e-12):
                    outer.append((x, y))
    return withq, np.array(outer, dtype=np.float64).reshape(-1, 2)


def _fields_np(xs, ys, px, py, a, qx, qy, b, relative, withq, outer):
    X = xs[None, :] + np.zeros((ys.size, 1))
    Y = ys[:, None] + np.zeros((1, xs.size))
    eps = 1e-12
    dq = np.hypot(X - qx, Y - qy)
    if relative:
        in_s = dq >= b * (1 - eps) - eps
    else:
        in_s = dq <= b * (1 + eps) + eps
    dX = np.full(X.shape, np.inf)
    # nearest point on the q-circle, radially
    with np.errstate(invalid="ignore", divide="ignore"):
        vx = np.where(dq > 0, (X - qx) / dq, 1.0)
        vy = np.where(dq > 0, (Y - qy) / dq, 0.0)
    zx, zy = qx + b * vx, qy + b * vy
    dz = np.hypot(X - zx, Y - zy)
    inside_any = np.zeros(X.shape, dtype=bool)
    for k in range(px.size):
        dp = np.hypot(X - px[k], Y - py[k])
        in_d = dp <= a * (1 + eps) + eps
        inside_any |= dp < a * (1 - eps) - eps
        dX[in_d & in_s] = 0.0
        with np.errstate(invalid="ignore", divide="ignore"):
            ux = np.where(dp > 0, (X - px[k]) / dp, 1.0)
            uy = np.where(dp > 0, (Y - py[k]) / dp, 0.0)
        yx, yy = px[k] + a * ux, py[k] + a * uy
        dyq = np.hypot(yx - qx, yy - qy)
        ok = (dyq >= b * (1 - eps) - eps) if relative else (dyq <= b * (1 + eps) + eps)
        dX = np.where(ok, np.minimum(dX, np.abs(dp - a)), dX)
        okz = np.hypot(zx - px[k], zy - py[k]) <= a * (1 + eps) + eps
        dX = np.where(okz, np.minimum(dX, dz), dX)
        for j in range(2):
            if withq[k, j, 2] == 1.0:
                dX = np.minimum(dX, np.hypot(X - withq[k, j, 0], Y - withq[k, j, 1]))
    # distance to the complement: outside every site disc, or on the far side of the q-circle
    d1 = np.where(inside_any, np.inf, 0.0)
    for k in range(px.size):
        dp = np.hypot(X - px[k], Y - py[k])
        with np.errstate(invalid="ignore", divide="ignore"):
            ux = np.where(dp > 0, (X - px[k]) / dp, 1.0)
            uy = np.where(dp > 0, (Y - py[k]) / dp, 0.0)
        yx, yy = px[k] + a * ux, py[k] + a * uy
        ok = np.ones(X.shape, dtype=bool)
        for j in range(px.size):
            if j != k:
                ok &= np.hypot(yx - px[j], yy - py[j]) >= a * (1 - eps) - eps
        d1 = np.where(ok, np.minimum(d1, np.abs(dp - a)), d1)
    for x, y in outer:
        d1 = np.minimum(d1, np.hypot(X - x, Y - y))
    d2 = np.maximum(dq - b, 0.0) if relative else np.maximum(b - dq, 0.0)
    return dX, np.minimum(d1, d2)


def _components_np(mask, conn8, drop_border):
    from scipy import ndimage

    st = np.ones((3, 3), dtype=bool) if conn8 else None
    lab, n = ndimage.label(mask, structure=st)
    if not drop_border or n == 0:
        return int(n)
    border = np.unique(np.concatenate([lab[0], lab[-1], lab[:, 0], lab[:, -1]]))
    border = border[border > 0]
    return int(n - border.size)


# ---------------------------------------------------------------------------
# numba path (compiled lazily on first use)

_nb_funcs = {}


def _get_nb():
    if _nb_funcs:
        return _nb_funcs
    njit = _nb.njit

    @njit(cache=True)
    def occupancy(xs, ys, px, py, s, qx, qy, r, relative):
        ny, nx = ys.size, xs.size
        out = np.zeros((ny, nx), dtype=np.bool_)
        for j in range(ny):
            y = ys[j]
            for i in range(nx):
                x = xs[i]
                dq = (x - qx) * (x - qx) + (y - qy) * (y - qy)
                if relative:
                    if dq < r:
                        continue
                elif dq > r:
                    continue
                for k in range(px.size):
                    dx = x - px[k]
                    dy = y - py[k]
                    if dx * dx + dy * dy <= s:
                        out[j, i] = True
                        break
        return out

    @njit(cache=True)
    def components(mask, conn8, drop_border):
        ny, nx = mask.shape
        seen = np.zeros((ny, nx), dtype=np.bool_)
        stack = np.empty(ny * nx * 2, dtype=np.int64)
        count = 0
        for j0 in range(ny):
            for i0 in range(nx):
                if not mask[j0, i0] or seen[j0, i0]:
                    continue
                touches = False
                top = 0
                stack[top] = j0
                stack[top + 1] = i0
                top += 2
                seen[j0, i0] = True
                while top > 0:
                    top -= 2
                    j = stack[top]
                    i = stack[top + 1]
                    if j == 0 or i == 0 or j == ny - 1 or i == nx - 1:
                        touches = True
                    for dj in range(-1, 2):
                        for di in range(-1, 2):
                            if dj == 0 and di == 0:
                                continue
                            if not conn8 and dj != 0 and di != 0:
                                continue
                            jj = j + dj
                            ii = i + di
                            if jj < 0 or ii < 0 or jj >= ny or ii >= nx:
                                continue
                            if mask[jj, ii] and not seen[jj, ii]:
                                seen[jj, ii] = True
                                stack[top] = jj
                                stack[top + 1] = ii
                                top += 2
                if drop_border and touches:
                    continue
                count += 1
        return count

    @njit(cache=True)
    def fields(xs, ys, px, py, a, qx, qy, b, relative, withq, outer):
        ny, nx, n = ys.size, xs.size, px.size
        eps = 1e-12
        dX = np.empty((ny, nx))
        dC = np.empty((ny, nx))
        for jy in range(ny):
            y = ys[jy]
            for ix in range(nx):
                x = xs[ix]
                dq = math.sqrt((x - qx) ** 2 + (y - qy) ** 2)
                if relative:
                    in_s = dq >= b * (1 - eps) - eps
                else:
                    in_s = dq <= b * (1 + eps) + eps
                if dq > 0:
                    zx, zy = qx + b * (x - qx) / dq, qy + b * (y - qy) / dq
                else:
                    zx, zy = qx + b, qy
                dz = math.sqrt((x - zx) ** 2 + (y - zy) ** 2)
                best = np.inf
                inside_any = False
                for k in range(n):
                    dp = math.sqrt((x - px[k]) ** 2 + (y - py[k]) ** 2)
                    if dp < a * (1 - eps) - eps:
                        inside_any = True
                    if dp <= a * (1 + eps) + eps and in_s:
                        best = 0.0
                        continue
                    if dp > 0:
                        yx, yy = px[k] + a * (x - px[k]) / dp, py[k] + a * (y - py[k]) / dp
                    else:
                        yx, yy = px[k] + a, py[k]
                    dyq = math.sqrt((yx - qx) ** 2 + (yy - qy) ** 2)
                    ok = (dyq >= b * (1 - eps) - eps) if relative else (dyq <= b * (1 + eps) + eps)
                    if ok and abs(dp - a) < best:
                        best = abs(dp - a)
                    if math.sqrt((zx - px[k]) ** 2 + (zy - py[k]) ** 2) <= a * (1 + eps) + eps and dz < best:
                        best = dz
                    for j in range(2):
                        if withq[k, j, 2] == 1.0:
                            d = math.sqrt((x - withq[k, j, 0]) ** 2 + (y - withq[k, j, 1]) ** 2)
                            if d < best:
                                best = d
                dX[jy, ix] = best
                d1 = np.inf if inside_any else 0.0
                if inside_any:
                    for k in range(n):
                        dp = math.sqrt((x - px[k]) ** 2 + (y - py[k]) ** 2)
                        if dp > 0:
                            yx, yy = px[k] + a * (x - px[k]) / dp, py[k] + a * (y - py[k]) / dp
                        else:
                            yx, yy = px[k] + a, py[k]
                        ok = True
                        for j in range(n):
                            if j != k and math.sqrt((yx - px[j]) ** 2 + (yy - py[j]) ** 2) < a * (1 - eps) - eps:
                                ok = False
                                break
                        if ok and abs(dp - a) < d1:
                            d1 = abs(dp - a)
                    for m in range(outer.shape[0]):
                        d = math.sqrt((x - outer[m, 0]) ** 2 + (y - outer[m, 1]) ** 2)
                        if d < d1:
                            d1 = d
                d2 = max(dq - b, 0.0) if relative else max(b - dq, 0.0)
                dC[jy, ix] = min(d1, d2)
        return dX, dC

    _nb_funcs["fields"] = fields
    _nb_funcs["occupancy"] = occupancy
    _nb_funcs["components"] = components
    return _nb_funcs


# ---------------------------------------------------------------------------
# dispatch


def occupancy(xs, ys, px, py, s, qx, qy, r, relative):
    """Pixel mask of (union of discs radius^2 s around p_k) cut with the q-ball condition."""
    args = (np.ascontiguousarray(xs, dtype=np.float64), np.ascontiguousarray(ys, dtype=np.float64),
            np.ascontiguousarray(px, dtype=np.float64), np.ascontiguousarray(py, dtype=np.float64),
            float(s), float(qx), float(qy), float(r), bool(relative))
    if USE_NUMBA:
        return _get_nb()["occupancy"](*args)
    return _occupancy_np(*args)


def distance_fields(xs, ys, px, py, s, qx, qy, r, relative):
    """Per-pixel distances to the set X and to its complement.

    X is the union of discs radius sqrt(s) around p_k, intersected with the
    closed q-ball of radius sqrt(r) (absolute) or with the complement of the
    open q-ball (relative).  Nearest points are found among radial
    projections onto each circle and circle crossing points.
    """
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    px = np.ascontiguousarray(px, dtype=np.float64)
    py = np.ascontiguousarray(py, dtype=np.float64)
    a, b = math.sqrt(max(float(s), 0.0)), math.sqrt(max(float(r), 0.0))
    withq, outer = _pair_points(px, py, a, float(qx), float(qy), b)
    args = (xs, ys, px, py, a, float(qx), float(qy), b, bool(relative), withq, outer)
    if USE_NUMBA:
        return _get_nb()["fields"](*args)
    return _fields_np(*args)


def count_components(mask, conn8: bool, drop_border: bool = False) -> int:
    mask = np.ascontiguousarray(mask, dtype=np.bool_)
    if USE_NUMBA:
        return int(_get_nb()["components"](mask, bool(conn8), bool(drop_border)))
    return _components_np(mask, conn8, drop_border)

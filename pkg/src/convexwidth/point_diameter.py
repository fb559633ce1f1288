"""Point diameter field: the longest chord of a body on a line through a given point.

``e(O) = sup { length(L ∩ K) : L a line through O }``. Its infimum over
the plane equals the thickness, its maximum the diameter, and on the
boundary it is continuous exactly where some longest chord through ``O``
ends at ``O``.
"""

import io
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .bodies import Ball, BodyError, Ellipsoid, Polytope, SlabBall
from .geometry import normalize, sample_directions
from .metrics import global_diameter

SWEEP = 512
GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class PointDiameterSample:
    O: np.ndarray
    e: float
    best_direction: np.ndarray


@dataclass(frozen=True)
class ContinuityVerdict:
    O: np.ndarray
    continuous: bool
    e_value: float
    farthest_value: float
    gap: float


@dataclass(frozen=True)
class EpsilonEstimate:
    """Smallest sampled ``e`` on a lattice; an upper estimate of the infimum, never a claim of attainment."""

    value: float
    argmin: np.ndarray
    values: np.ndarray


def _body_center(body):
    if isinstance(body, Polytope):
        return body.vertices.mean(axis=0)
    if isinstance(body, Ball):
        return body.center.copy()
    return np.zeros(body.dim)


def _lengths_at_angles(body, O, theta):
    """Chord lengths for points ``O`` (N, 2) and angles ``theta`` (N, k)."""
    N, k = theta.shape
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=-1).reshape(-1, 2)
    pts = np.repeat(O, k, axis=0)
    return body.chord_lengths(pts, dirs).reshape(N, k)


def _polygon_e(poly, O, refine=16):
    """Exact planar path for polygons.

    Between two consecutive vertex directions seen from ``O`` the chord ends
    on a fixed pair of edges. For ``O`` inside the body the length is then a
    sum of convex functions of the angle and peaks at a vertex line; for ``O``
    outside it is a difference and may peak strictly inside the interval, so
    every interval is also searched.
    """
    O = np.atleast_2d(O)
    N = len(O)
    V = poly.vertices
    a, b = poly.edges()
    edge_dirs = normalize(b - a)
    to_vertex = V[None, :, :] - O[:, None, :]
    norm = np.linalg.norm(to_vertex, axis=2, keepdims=True)
    tiny = norm[..., 0] <= 1e-12 * max(poly.scale, 1.0)
    to_vertex = np.where(tiny[..., None], edge_dirs[None, :, :], to_vertex / np.where(norm > 0, norm, 1.0))
    dirs = np.concatenate([to_vertex, np.broadcast_to(edge_dirs, (N,) + edge_dirs.shape)], axis=1)
    k = dirs.shape[1]
    lengths = poly.chord_lengths(np.repeat(O, k, axis=0), dirs.reshape(-1, 2)).reshape(N, k)
    pick = lengths.argmax(axis=1)
    best_val = lengths[np.arange(N), pick]
    best_dir = dirs[np.arange(N), pick]

    phi = np.sort(np.mod(np.arctan2(to_vertex[..., 1], to_vertex[..., 0]), np.pi), axis=1)
    lo = phi
    hi = np.concatenate([phi[:, 1:], phi[:, :1] + np.pi], axis=1)
    frac = (np.arange(refine) + 0.5) / refine
    grid = lo[..., None] + (hi - lo)[..., None] * frac
    m = lo.shape[1]
    L = _lengths_at_angles(poly, O, grid.reshape(N, -1)).reshape(N, m, refine)
    j = L.argmax(axis=2)[..., None]
    centre = np.take_along_axis(grid, j, axis=2)[..., 0]
    half = (hi - lo) / refine
    th, val = _golden_max(lambda t: _lengths_at_angles(poly, O, t),
                          np.maximum(centre - half, lo), np.minimum(centre + half, hi))
    i = val.argmax(axis=1)
    val, th = val[np.arange(N), i], th[np.arange(N), i]
    better = val > best_val
    best_val = np.where(better, val, best_val)
    best_dir = np.where(better[:, None], np.column_stack([np.cos(th), np.sin(th)]), best_dir)
    return best_val, best_dir


def _golden_max(f, lo, hi, iters=48):
    """Vectorised golden-section maximisation of ``f`` on the brackets ``[lo, hi]``."""
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        left = f1 >= f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        x2n = np.where(left, x1, lo + GOLDEN * (hi - lo))
        x1n = np.where(left, hi - GOLDEN * (hi - lo), x2)
        fx = f(np.where(left, x1n, x2n))
        f1, f2 = np.where(left, fx, f2), np.where(left, f1, fx)
        x1, x2 = x1n, x2n
    mid = 0.5 * (lo + hi)
    return mid, f(mid)


def _planar_sweep_e(body, O, count=SWEEP, starts=3):
    """Angular sweep then golden-section refinement of the best local maxima."""
    O = np.atleast_2d(O)
    N = len(O)
    step = np.pi / count
    grid = np.broadcast_to(np.arange(count) * step, (N, count))
    L = _lengths_at_angles(body, O, grid)
    order = np.argsort(-L, axis=1)[:, :starts]
    best_val = L[np.arange(N), order[:, 0]]
    best_th = grid[np.arange(N), order[:, 0]]
    for j in range(order.shape[1]):
        th0 = grid[np.arange(N), order[:, j]]

        def f(t):
            return _lengths_at_angles(body, O, t[:, None])[:, 0]

        th, val = _golden_max(f, th0 - step, th0 + step)
        better = val > best_val
        best_val = np.where(better, val, best_val)
        best_th = np.where(better, th, best_th)
    return best_val, np.column_stack([np.cos(best_th), np.sin(best_th)])


def _spatial_e(body, O):
    U = sample_directions(body.dim, SWEEP * (body.dim - 1), seed=0)
    if isinstance(body, Polytope):
        to_v = body.vertices - O
        keep = np.linalg.norm(to_v, axis=1) > 1e-12
        U = np.concatenate([U, normalize(to_v[keep])])
    L = body.chord_lengths(np.broadcast_to(O, U.shape), U)
    best_val, best_u = float(L.max()), U[int(L.argmax())]

    def neg(x):
        u = x / np.linalg.norm(x)
        return -float(body.chord_lengths(O[None, :], u[None, :])[0])

    for i in np.argsort(-L)[:3]:
        res = minimize(neg, U[i], method="Nelder-Mead", options={"xatol": 1e-9, "fatol": 1e-12})
        if -res.fun > best_val:
            best_val, best_u = -res.fun, res.x / np.linalg.norm(res.x)
    return best_val, best_u


def point_diameters(body, points):
    """Vectorised ``e`` for planar bodies; returns ``(values, directions)``."""
    if body.dim != 2:
        raise BodyError("vectorised point diameters need a planar body")
    points = np.atleast_2d(np.asarray(points, float))
    if isinstance(body, Polytope):
        return _polygon_e(body, points)
    if isinstance(body, Ball):
        # every line through the center is a diameter
        return np.full(len(points), 2.0 * body.radius), normalize(
            np.where(np.linalg.norm(points - body.center, axis=1, keepdims=True) > 0,
                     points - body.center, np.array([[1.0, 0.0]])))
    return _planar_sweep_e(body, points)


def e_of(body, O):
    """Longest chord of ``body`` on a line through ``O`` (``O`` may lie outside)."""
    O = np.asarray(O, dtype=float)
    if O.shape != (body.dim,):
        raise BodyError("point dimension does not match the body")
    if body.dim == 2:
        val, u = point_diameters(body, O[None, :])
        return PointDiameterSample(O, float(val[0]), u[0])
    val, u = _spatial_e(body, O)
    return PointDiameterSample(O, float(val), u)


def e_sweep(body, O, count=1_000_000, chunk=200_000):
    """Brute-force planar oracle: maximum over ``count`` equally spaced line angles."""
    O = np.asarray(O, float)
    best = 0.0
    for start in range(0, count, chunk):
        th = np.pi * np.arange(start, min(start + chunk, count)) / count
        dirs = np.column_stack([np.cos(th), np.sin(th)])
        best = max(best, float(body.chord_lengths(np.broadcast_to(O, dirs.shape), dirs).max()))
    return best


def lattice(body, search_radius, grid):
    c = _body_center(body)
    xs = np.linspace(c[0] - search_radius, c[0] + search_radius, grid)
    ys = np.linspace(c[1] - search_radius, c[1] + search_radius, grid)
    X, Y = np.meshgrid(xs, ys)
    return np.column_stack([X.ravel(), Y.ravel()])


def epsilon_estimate(body, search_radius, grid):
    """Minimum of ``e`` over a ``grid x grid`` lattice on the box of half-side ``search_radius``."""
    if body.dim != 2:
        raise BodyError("epsilon_estimate samples a planar lattice")
    delta, _ = global_diameter(body)
    if search_radius < 2 * delta:
        raise ValueError("search_radius must be at least twice the diameter")
    pts = lattice(body, search_radius, grid)
    vals, _ = point_diameters(body, pts)
    i = int(vals.argmin())
    return EpsilonEstimate(float(vals[i]), pts[i], vals.reshape(grid, grid))


def boundary_gap(body, O):
    """Signed distance-like defect of ``O`` from the boundary (0 on the boundary)."""
    O = np.asarray(O, float)
    if isinstance(body, Polytope):
        return float(np.max(body.normals @ O - body.offsets))
    if isinstance(body, Ball):
        return float(np.linalg.norm(O - body.center) - body.radius)
    if isinstance(body, Ellipsoid):
        return float((np.linalg.norm(O / body.semiaxes) - 1.0) * body.semiaxes.min())
    if isinstance(body, SlabBall):
        return float(max(np.linalg.norm(O) - 1.0, abs(O[0]) - body.h))
    raise TypeError(f"unsupported body {body!r}")


def farthest_distance(body, O):
    O = np.asarray(O, float)
    if isinstance(body, Polytope):
        return float(np.linalg.norm(body.vertices - O, axis=1).max())
    if isinstance(body, Ball):
        return float(np.linalg.norm(O - body.center) + body.radius)
    if isinstance(body, Ellipsoid) and body.dim == 2:
        t = np.linspace(0, 2 * np.pi, 4096, endpoint=False)

        def dist(t):
            return np.hypot(body.semiaxes[0] * np.cos(t) - O[0], body.semiaxes[1] * np.sin(t) - O[1])

        t0 = t[int(dist(t).argmax())]
        _, val = _golden_max(dist, np.array([t0 - 2 * np.pi / 4096]), np.array([t0 + 2 * np.pi / 4096]))
        return float(val[0])
    raise BodyError("farthest-point distance needs a polytope, a ball or a planar ellipse")


def continuity_check(body, O, tol=None):
    """Classify continuity of ``e`` at a boundary point.

    ``e`` is continuous at ``O`` exactly when some longest chord through
    ``O`` ends at ``O``, i.e. when ``e(O)`` equals the farthest distance from
    ``O`` to the body. ``tol`` defaults to ``1e-9 * delta``.
    """
    O = np.asarray(O, float)
    delta, _ = global_diameter(body)
    if abs(boundary_gap(body, O)) > BOUNDARY_TOL * delta:
        raise BodyError(f"{O} is not on the boundary")
    if tol is None:
        tol = 1e-9 * delta
    e = e_of(body, O).e
    far = farthest_distance(body, O)
    gap = max(e - far, 0.0)
    return ContinuityVerdict(O, gap <= tol, e, far, gap)


def boundary_points(body, count):
    """``count`` points spaced uniformly by arc length along a planar boundary.

    Polygon samples start at the first vertex, so vertices are included
    whenever the spacing divides every edge length.
    """
    if body.dim != 2:
        raise BodyError("boundary sampling is planar")
    if isinstance(body, Polytope):
        a, b = body.edges()
        lengths = np.linalg.norm(b - a, axis=1)
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        s = cum[-1] * np.arange(count) / count
        k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(a) - 1)
        frac = (s - cum[k]) / lengths[k]
        pts = a[k] + frac[:, None] * (b[k] - a[k])
        # snap round-off so samples at vertices are exact
        near = np.isclose(frac, 1.0, atol=1e-12)
        pts[near] = b[k][near]
        near0 = np.isclose(frac, 0.0, atol=1e-12)
        pts[near0] = a[k][near0]
        return pts
    t = 2 * np.pi * np.arange(count) / count
    if isinstance(body, Ball):
        return body.center + body.radius * np.column_stack([np.cos(t), np.sin(t)])
    if isinstance(body, Ellipsoid):
        return body.semiaxes * np.column_stack([np.cos(t), np.sin(t)])
    raise BodyError("boundary sampling needs a polygon, disc or ellipse")


def usc_probe(body, O, radius, count=256, seed=0):
    """Largest ``e`` over ``count`` seeded points drawn uniformly from the ball ``B(O, radius)``."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    O = np.asarray(O, float)
    rng = np.random.Generator(np.random.Philox(key=seed))
    g = normalize(rng.standard_normal((count, body.dim)))
    rad = radius * rng.random(count) ** (1.0 / body.dim)
    pts = O + rad[:, None] * g
    if body.dim == 2:
        return float(point_diameters(body, pts)[0].max())
    return max(e_of(body, p).e for p in pts)


def approach_probe(body, O, direction, radii):
    """``e`` at ``O + t * direction`` for each ``t`` in ``radii``."""
    O = np.asarray(O, float)
    direction = np.asarray(direction, float)
    pts = O + np.asarray(radii, float)[:, None] * direction
    if body.dim == 2:
        return point_diameters(body, pts)[0]
    return np.array([e_of(body, p).e for p in pts])


def ek_grid(body, bounds, nx, ny):
    """``e`` at cell centers of an ``nx x ny`` raster; row ``j`` holds ``y_j``, x varies fastest."""
    if body.dim != 2:
        raise BodyError("ek_grid rasterises planar bodies only")
    x0, x1, y0, y1 = map(float, bounds)
    if not (x1 > x0 and y1 > y0):
        raise ValueError("bounds must enclose a positive area")
    if nx < 2 or ny < 2:
        raise ValueError("need nx, ny >= 2")
    xs = x0 + (np.arange(nx) + 0.5) * (x1 - x0) / nx
    ys = y0 + (np.arange(ny) + 0.5) * (y1 - y0) / ny
    X, Y = np.meshgrid(xs, ys)
    vals, _ = point_diameters(body, np.column_stack([X.ravel(), Y.ravel()]))
    return xs, ys, vals.reshape(ny, nx)


def grid_csv(xs, ys, table):
    out = io.StringIO()
    out.write("x,y,e\n")
    for j, y in enumerate(ys):
        for i, x in enumerate(xs):
            out.write(f"{x:.17g},{y:.17g},{table[j, i]:.17g}\n")
    return out.getvalue()

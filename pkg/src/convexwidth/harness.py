"""Randomised and geodesic checks of the Lipschitz bounds for width and diameter.

Ratios are taken with respect to the projective distance
``rho(u, v) = arccos |<u, v>|``:

    dw(u, v) = |w(u) - w(v)| / rho(u, v),   dd(u, v) = |d(u) - d(v)| / rho(u, v).

``verify_bounds`` samples pairs and counts violations of ``dw <= M``,
``dd <= N`` and of the refined bounds ``M_hat`` / ``N_hat``;
``sup_delta_estimate`` searches for the supremum of the ratios and
``derivative_estimate`` approximates the local moduli by shrinking pairs.
"""

import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .bodies import Ball, Ellipsoid, Polytope, SlabBall
from .geometry import (
    as_direction,
    euclid_min_distance,
    normalize,
    projective_distance,
    random_tangent,
    rotate_toward,
    sample_directions,
    sample_pairs,
    tangent_toward,
)
from .metrics import body_stats, dir_diameters, hat_constants, r_of, s_of, widths

DEFAULT_MESHES = (1e-2, 1e-3, 1e-4, 1e-5)
MIN_PAIR_RHO = 1e-6
REPORT_VERSION = "report_v1"
MAX_LISTED_VIOLATIONS = 50

# offsets (a, b) of the two pair members along a geodesic, in units of the mesh
PAIR_PATTERN = ((-1.0, 1.0), (0.0, 1.0), (-1.0, 0.0), (0.5, 1.0), (-1.0, -0.5), (-0.5, 0.5))


@dataclass(frozen=True)
class PairStats:
    u: np.ndarray
    v: np.ndarray
    rho: float
    delta_w: float
    delta_d: float


@dataclass(frozen=True)
class DerivativeEstimate:
    u: np.ndarray
    kind: str
    meshes: tuple
    values: tuple
    extrapolated: float


@dataclass
class VerificationReport:
    body_id: str
    seed: int
    pairs: int
    metric: str
    max_delta_w: float
    max_delta_d: float
    M: float
    N: float
    M_hat: float
    N_hat: float
    hat_exact: bool
    violations: dict
    violating_pairs: list
    tolerances: dict
    asserted: bool
    sup_delta_w: float = None
    sup_delta_d: float = None
    runtime: float = field(default=0.0, compare=False)

    @property
    def ok(self):
        """True when no asserted bound is violated (always true in euclid-min mode)."""
        if not self.asserted:
            return True
        keys = ["w_le_M", "d_le_N"] + (["w_le_M_hat", "d_le_N_hat"] if self.hat_exact else [])
        return all(self.violations[k] == 0 for k in keys)

    def to_dict(self):
        doc = {"version": REPORT_VERSION, "tool_version": __version__}
        for key, value in asdict(self).items():
            if key != "runtime":
                doc[key] = value
        return doc

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, default=_jsonable)


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(f"cannot serialise {type(x)!r}")


def _values(body, U, kind):
    if kind == "width":
        return widths(body, U)
    if kind == "diameter":
        return dir_diameters(body, U)
    raise ValueError(f"kind must be 'width' or 'diameter', not {kind!r}")


def _denominator(U, V, metric):
    if metric == "rho":
        return projective_distance(U, V)
    if metric == "euclid-min":
        return euclid_min_distance(U, V)
    raise ValueError(f"unknown metric {metric!r}")


def ratios(body, U, V, kind, metric="rho"):
    """Vectorised difference quotients of the width or diameter function."""
    return np.abs(_values(body, U, kind) - _values(body, V, kind)) / _denominator(U, V, metric)


def delta_ratios(body, u, v, metric="rho"):
    u, v = as_direction(u), as_direction(v)
    rho = float(projective_distance(u, v))
    if rho < 1e-9:
        raise ValueError("u and v must not coincide up to sign")
    den = rho if metric == "rho" else float(_denominator(u, v, metric))
    U, V = u[None, :], v[None, :]
    dw = float(abs(widths(body, U) - widths(body, V))[0] / den)
    dd = float(abs(dir_diameters(body, U) - dir_diameters(body, V))[0] / den)
    return PairStats(u, v, rho, dw, dd)


def verify_bounds(body, pairs=100_000, seed=42, tol=None, metric="rho", hat=None, body_id=None,
                  hat_resolution=4096):
    """Sample pairs and check every Lipschitz bound.

    Violations are recorded, never raised. In ``"euclid-min"`` mode the
    ratios use ``min(|u - v|, |u + v|)`` and nothing is asserted.
    """
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    start = time.perf_counter()
    stats = body_stats(body)
    if tol is None:
        tol = 1e-9 * stats.delta
    if hat is None:
        hat = hat_constants(body, resolution=hat_resolution)
    U, V = sample_pairs(body.dim, pairs, seed, MIN_PAIR_RHO)
    dw = ratios(body, U, V, "width", metric)
    dd = ratios(body, U, V, "diameter", metric)
    checks = {
        "w_le_M": dw > stats.M + tol,
        "d_le_N": dd > stats.N + tol,
        "w_le_M_hat": dw > hat.M_hat + tol,
        "d_le_N_hat": dd > hat.N_hat + tol,
    }
    listed = []
    for name, bad in checks.items():
        for i in np.flatnonzero(bad)[:MAX_LISTED_VIOLATIONS]:
            listed.append({"bound": name, "u": U[i].tolist(), "v": V[i].tolist(),
                           "delta_w": float(dw[i]), "delta_d": float(dd[i])})
    return VerificationReport(
        body_id=body_id or body.kind,
        seed=int(seed),
        pairs=int(pairs),
        metric=metric,
        max_delta_w=float(dw.max()),
        max_delta_d=float(dd.max()),
        M=stats.M,
        N=stats.N,
        M_hat=hat.M_hat,
        N_hat=hat.N_hat,
        hat_exact=bool(hat.exact),
        violations={k: int(v.sum()) for k, v in checks.items()},
        violating_pairs=listed,
        tolerances={"violation": float(tol), "min_pair_rho": MIN_PAIR_RHO},
        asserted=metric == "rho",
        runtime=time.perf_counter() - start,
    )


# ---------------------------------------------------------------- supremum search


@dataclass(frozen=True)
class SupSearch:
    value: float
    u: np.ndarray
    v: np.ndarray
    history: tuple


def _perturb(rng, X, radius):
    """Move each row of ``X`` a random geodesic distance in ``[0, radius]``."""
    T = np.array([random_tangent(x, rng) for x in X])
    return normalize(rotate_toward(X, T, radius * rng.random(len(X))))


def sup_delta_search(body, kind, stages=12, seed=0, coarse=4096, candidates=256, radius=0.1):
    """Coarse random pass, then geodesic refinement around the incumbent pair.

    The coarse pass mixes uniform pairs with short pairs (length ``1e-3``)
    whose ratios approximate the local modulus. Each refinement stage
    perturbs both members within a radius halved per stage and also tries
    pairs shrunk toward either member; the incumbent only ever improves.
    """
    n = body.dim
    rng = np.random.Generator(np.random.Philox(key=seed))
    U, V = sample_pairs(n, coarse, seed, MIN_PAIR_RHO)
    base = sample_directions(n, coarse, seed + 1)
    T = np.array([random_tangent(x, rng) for x in base])
    short = normalize(rotate_toward(base, T, np.full(coarse, 1e-3)))
    U = np.concatenate([U, base])
    V = np.concatenate([V, short])
    vals = ratios(body, U, V, kind)
    i = int(vals.argmax())
    best, bu, bv = float(vals[i]), U[i], V[i]
    history = [best]
    for k in range(1, stages + 1):
        r = radius * 0.5**k
        Uc = _perturb(rng, np.repeat(bu[None, :], candidates, axis=0), r)
        Vc = _perturb(rng, np.repeat(bv[None, :], candidates, axis=0), r)
        frac = rng.random(candidates)[:, None]
        shrink_v = normalize(Uc + frac * (Vc - Uc))
        shrink_u = normalize(Vc + frac * (Uc - Vc))
        Uall = np.concatenate([Uc, Uc, shrink_u])
        Vall = np.concatenate([Vc, shrink_v, Vc])
        ok = projective_distance(Uall, Vall) >= MIN_PAIR_RHO
        if ok.any():
            vals = ratios(body, Uall[ok], Vall[ok], kind)
            j = int(vals.argmax())
            if vals[j] > best:
                best, bu, bv = float(vals[j]), Uall[ok][j], Vall[ok][j]
        history.append(best)
    return SupSearch(best, bu, bv, tuple(history))


def sup_delta_estimate(body, kind, stages=12, seed=0):
    """Estimate ``sup dw`` (``kind="width"``) or ``sup dd`` (``kind="diameter"``)."""
    return sup_delta_search(body, kind, stages=stages, seed=seed).value


# ---------------------------------------------------------------- local moduli


def _richardson(meshes, values):
    if len(values) < 2:
        return float(values[-1])
    h0, h1 = meshes[-2], meshes[-1]
    v0, v1 = values[-2], values[-1]
    return float(v1 + (v1 - v0) * h1 / (h0 - h1))


def derivative_estimate(body, u, kind, meshes=DEFAULT_MESHES, orientations=64, seed=0,
                        tangent=None, pattern=PAIR_PATTERN):
    """Finite-difference estimate of the local modulus ``limsup dw`` or ``limsup dd`` at ``u``.

    For each mesh ``h`` the ratio is maximised over pairs placed along
    geodesics through ``u`` (``orientations`` seeded tangents, or the single
    ``tangent`` given) at offsets ``pattern * h``. The last two meshes are
    combined by Richardson extrapolation.
    """
    u = as_direction(u)
    meshes = tuple(float(h) for h in meshes)
    if any(b >= a for a, b in zip(meshes, meshes[1:])):
        raise ValueError("meshes must be strictly decreasing")
    if meshes[-1] < 1e-7:
        raise ValueError("smallest mesh must be >= 1e-7")
    if tangent is None:
        rng = np.random.Generator(np.random.Philox(key=seed))
        tangents = np.array([random_tangent(u, rng) for _ in range(orientations)])
    else:
        t = np.asarray(tangent, float)
        t = t - np.dot(t, u) * u
        tangents = (t / np.linalg.norm(t))[None, :]
    pat = np.asarray(pattern, float)
    values = []
    for h in meshes:
        a = np.repeat(pat[:, 0] * h, len(tangents))
        b = np.repeat(pat[:, 1] * h, len(tangents))
        T = np.tile(tangents, (len(pat), 1))
        U = normalize(rotate_toward(u, T, a))
        V = normalize(rotate_toward(u, T, b))
        values.append(float(ratios(body, U, V, kind).max()))
    return DerivativeEstimate(u, kind, meshes, tuple(values), _richardson(meshes, values))


def geodesic_limit(body, at, toward, kind, meshes=DEFAULT_MESHES):
    """One-sided ratios ``|f(at) - f(x_h)| / rho`` with ``x_h`` at distance ``h`` from ``at`` toward ``toward``."""
    at = as_direction(at)
    return derivative_estimate(body, at, kind, meshes, tangent=tangent_toward(at, as_direction(toward)),
                               pattern=((0.0, 1.0),))


# ---------------------------------------------------------------- suites


@dataclass(frozen=True)
class SharpnessRow:
    omega: float
    width_derivative: float
    width_expected: float
    diameter_derivative: float
    diameter_expected: float
    tolerance: float

    @property
    def passed(self):
        return (abs(self.width_derivative - self.width_expected) <= self.tolerance
                and abs(self.diameter_derivative - self.diameter_expected) <= self.tolerance)


def sharpness_suite(omega_values, dim=2, tolerance=1e-3, meshes=DEFAULT_MESHES):
    """Slab-cut unit balls attain both Lipschitz constants.

    For thickness ``omega`` (diameter 2) the width modulus at ``e1`` is
    ``sqrt(4 - omega^2)`` and the diameter modulus at the critical direction
    is ``(2 / omega) sqrt(4 - omega^2)``.
    """
    rows = []
    for omega in omega_values:
        if not 0 < omega <= 2:
            raise ValueError("omega must lie in (0, 2]")
        body = SlabBall(omega / 2.0, dim)
        e1 = np.eye(dim)[0]
        alpha = body.critical_angle
        crit = np.zeros(dim)
        crit[:2] = [np.cos(alpha), np.sin(alpha)]
        tangent = np.zeros(dim)
        tangent[:2] = [-np.sin(alpha), np.cos(alpha)]
        root = np.sqrt(max(4.0 - omega * omega, 0.0))
        w_est = derivative_estimate(body, e1, "width", meshes).extrapolated
        d_est = derivative_estimate(body, crit, "diameter", meshes, tangent=tangent).extrapolated
        rows.append(SharpnessRow(float(omega), w_est, float(root), d_est, float(2.0 / omega * root), tolerance))
    return rows


@dataclass(frozen=True)
class ApproxRow:
    sides: int
    u: np.ndarray
    width: float
    s_excess: float
    r_excess: float


@dataclass(frozen=True)
class MonotoneApproxReport:
    rows: tuple
    w_limit: float
    s_limit: float
    r_limit: float
    tolerance: float

    @property
    def width_monotone(self):
        w = [row.width for row in self.rows]
        return all(b <= a + 1e-12 for a, b in zip(w, w[1:]))

    @property
    def s_limsup_ok(self):
        return self.rows[-1].s_excess <= self.tolerance

    @property
    def r_liminf_ok(self):
        """Every tracked ``r`` stays above the limit; a finite stand-in for ``liminf``."""
        return min(row.r_excess for row in self.rows) >= -self.tolerance


def circumscribed_polygon(body, sides):
    """Regular ``sides``-gon around a disc, or its affine image around an ellipse."""
    base = Polytope.circumscribed(sides)
    if isinstance(body, Ball) and body.dim == 2:
        return Polytope(body.center + body.radius * base.vertices)
    if isinstance(body, Ellipsoid) and body.dim == 2:
        return Polytope(base.vertices * body.semiaxes)
    raise TypeError("circumscribed polygons are built for planar discs and ellipses")


def monotone_approx_suite(smooth_body, polygon_sides=(8, 16, 32, 64, 128), seed=0, u=None,
                          converge=True, tolerance=1e-3):
    """Track ``w``, ``s`` and ``r`` of nested circumscribed polygons shrinking to a smooth body.

    Directions ``u_j`` approach ``u`` at distance ``1/sides`` when
    ``converge`` is set (otherwise ``u_j = u``).
    """
    sides = list(polygon_sides)
    if any(b <= a for a, b in zip(sides, sides[1:])):
        raise ValueError("polygon_sides must increase")
    if u is None:
        u = sample_directions(2, 1, seed)[0]
    u = as_direction(u)
    perp = np.array([-u[1], u[0]])
    s_lim = s_of(smooth_body, u)
    r_lim = r_of(smooth_body, u)
    rows = []
    for m in sides:
        K = circumscribed_polygon(smooth_body, m)
        uj = normalize(rotate_toward(u, perp, 1.0 / m)) if converge else u
        rows.append(ApproxRow(m, uj, float(widths(K, u[None, :])[0]), s_of(K, uj) - s_lim, r_of(K, uj) - r_lim))
    return MonotoneApproxReport(tuple(rows), float(widths(smooth_body, u[None, :])[0]), s_lim, r_lim, tolerance)

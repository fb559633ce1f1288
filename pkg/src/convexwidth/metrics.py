"""Directional functionals of a convex body and their global extrema.

For a direction ``u`` the module evaluates

* ``w`` the width (distance between the supporting hyperplanes normal to u),
* ``d`` the directional diameter (longest chord parallel to u),
* ``s`` the largest distance between the two contact sets of ``u`` and ``-u``,
* ``p = sqrt(s^2 - w^2)``, the local Lipschitz modulus of ``w``,
* ``r`` the smallest strip width over diametral chords and their admissible
  parallel supporting hyperplanes,
* ``q = d sqrt(d^2 / r^2 - 1)``, the local Lipschitz modulus of ``d``,

and the global scalars diameter ``delta``, thickness ``omega`` and the
Lipschitz constants ``M = sqrt(delta^2 - omega^2)``, ``N = (delta/omega) M``.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog, minimize_scalar
from scipy.spatial.distance import cdist, pdist, squareform

from .bodies import CONTACT_TOL, Ball, BodyError, Ellipsoid, Polytope, SlabBall
from .geometry import angle_direction, as_direction, canonical_sign, normalize, sample_directions

log = logging.getLogger(__name__)

RADICAND_TOL = 1e-12
ANGLE_TOL = 1e-9


class InconsistencyError(ArithmeticError):
    """A quantity that is nonnegative in exact arithmetic came out clearly negative."""


@dataclass(frozen=True)
class BodyStats:
    delta: float
    omega: float
    M: float
    N: float
    omega_direction: np.ndarray
    diameter_chord: tuple


@dataclass(frozen=True)
class DirectionalSample:
    u: np.ndarray
    w: float
    d: float
    s: float
    p: float
    r: float
    q: float


@dataclass(frozen=True)
class DiametralChord:
    """Maximal chord ``[A, B]`` with ``B - A = |AB| * direction``.

    ``admissible_normals`` holds unit generators ``v`` of the cone of normals
    for which the hyperplanes through ``B`` (outer normal ``v``) and ``A``
    (outer normal ``-v``) both support the body; ``strip_width`` is the
    smallest distance between such a pair of hyperplanes.
    """

    A: np.ndarray
    B: np.ndarray
    direction: np.ndarray
    strip_width: float
    admissible_normals: np.ndarray

    @property
    def length(self):
        return float(np.linalg.norm(self.B - self.A))


@dataclass(frozen=True)
class GenericityFlag:
    generic_for_width: bool
    generic_for_diameter: bool


@dataclass(frozen=True)
class HatConstants:
    """Maxima of ``p`` and ``q`` over a candidate direction set.

    ``N_hat_generic`` is the sup of ``q`` restricted to the sampled
    directions that are diameter-generic; it is reported next to
    ``N_hat`` without any claim that the two agree.
    """

    M_hat: float
    N_hat: float
    N_hat_generic: float
    exact: bool
    M_direction: np.ndarray = field(repr=False)
    N_direction: np.ndarray = field(repr=False)


def _sqrt_nonneg(x, scale=1.0):
    if x < -RADICAND_TOL * max(scale, 1.0):
        raise InconsistencyError(f"negative radicand {x!r}")
    return float(np.sqrt(max(x, 0.0)))


# ---------------------------------------------------------------- width, diameter


def width(body, u):
    u = as_direction(u)
    return float(body.width_values(u[None, :])[0])


def widths(body, U):
    return body.width_values(np.atleast_2d(U))


def _diameter_lp(poly, u):
    """Longest chord parallel to ``u`` as a linear program.

    Variables are convex weights ``lam``, ``mu`` of the two endpoints and the
    length ``t``; maximise ``t`` subject to ``V mu - V lam = t u``.
    """
    V = poly.vertices
    m, n = V.shape
    c = np.zeros(2 * m + 1)
    c[-1] = -1.0
    A_eq = np.zeros((n + 2, 2 * m + 1))
    A_eq[:n, :m] = -V.T
    A_eq[:n, m : 2 * m] = V.T
    A_eq[:n, -1] = -u
    A_eq[n, :m] = 1.0
    A_eq[n + 1, m : 2 * m] = 1.0
    b_eq = np.zeros(n + 2)
    b_eq[n:] = 1.0
    res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status != 0:
        return None
    lam, mu = res.x[:m], res.x[m : 2 * m]
    return float(res.x[-1]), lam @ V, mu @ V


def dir_diameter(body, u, method="ray"):
    """Length of the longest chord parallel to ``u``.

    For polytopes ``method`` selects the ray shot against the difference
    body (``"ray"``, the default) or the linear program (``"lp"``).
    """
    u = as_direction(u)
    if isinstance(body, Polytope):
        if method == "lp":
            sol = _diameter_lp(body, u)
            if sol is not None:
                return sol[0]
            log.warning("diameter LP failed for u=%s; falling back to ray shooting", u)
        elif method != "ray":
            raise ValueError(f"unknown method {method!r}")
    return float(dir_diameters(body, u[None, :])[0])


def dir_diameters(body, U):
    U = np.atleast_2d(U)
    if isinstance(body, Polytope):
        return body.diff_radial(U)
    if isinstance(body, Ellipsoid):
        return 2.0 * body.radial(U)
    if isinstance(body, Ball):
        return np.full(len(U), 2.0 * body.radius)
    if isinstance(body, SlabBall):
        u1 = np.abs(U[:, 0])
        with np.errstate(divide="ignore"):
            return 2.0 * np.minimum(1.0, body.h / u1)
    raise TypeError(f"unsupported body {body!r}")


# ---------------------------------------------------------------- global scalars


def global_diameter(body):
    """Diameter ``delta`` with a witnessing pair of points."""
    if isinstance(body, Polytope):
        D = squareform(pdist(body.vertices))
        i, j = np.unravel_index(D.argmax(), D.shape)
        return float(D[i, j]), (body.vertices[i].copy(), body.vertices[j].copy())
    if isinstance(body, Ellipsoid):
        k = int(body.semiaxes.argmax())
        e = np.zeros(body.dim)
        e[k] = body.semiaxes[k]
        return 2.0 * body.semiaxes[k], (-e, e)
    if isinstance(body, Ball):
        e = np.zeros(body.dim)
        e[0] = body.radius
        return 2.0 * body.radius, (body.center - e, body.center + e)
    if isinstance(body, SlabBall):
        A = np.zeros(body.dim)
        A[0], A[1] = -body.h, -body.rim
        return 2.0, (A, -A)
    raise TypeError(f"unsupported body {body!r}")


def _calipers_min_width(V):
    """Rotating calipers over a counterclockwise polygon: (width, edge index)."""
    m = len(V)
    nxt = np.roll(V, -1, axis=0)
    e = nxt - V
    nrm = np.column_stack([e[:, 1], -e[:, 0]]) / np.linalg.norm(e, axis=1)[:, None]
    j = int(np.argmax((V[0] - V) @ nrm[0]))
    best, best_i = np.inf, 0
    for i in range(m):
        depth = lambda k: float(np.dot(V[i] - V[k % m], nrm[i]))  # noqa: E731
        steps = 0
        while depth(j + 1) > depth(j) and steps < m:
            j = (j + 1) % m
            steps += 1
        if depth(j) < best:
            best, best_i = depth(j), i
    return best, best_i, nrm[best_i]


def thickness(body, check_samples=0, seed=0):
    """Minimal width ``omega`` and a direction attaining it.

    Polygons use rotating calipers; higher-dimensional polytopes take the
    minimum over facet normals of the difference body. With
    ``check_samples > 0`` a sampled minimisation is run as a sanity check and
    must never undercut the exact value.
    """
    if isinstance(body, Polytope):
        if body.dim == 2:
            omega, _, nrm = _calipers_min_width(body.vertices)
            direction = canonical_sign(nrm)
        else:
            k = int(body.diff_offsets.argmin())
            omega, direction = float(body.diff_offsets[k]), canonical_sign(body.diff_normals[k])
        if check_samples:
            U = sample_directions(body.dim, check_samples, seed)
            sampled = float(widths(body, U).min())
            if sampled < omega - 1e-9 * body.scale:
                raise InconsistencyError(f"sampled width {sampled} below thickness {omega}")
        return float(omega), direction
    e = np.zeros(body.dim)
    if isinstance(body, Ellipsoid):
        k = int(body.semiaxes.argmin())
        e[k] = 1.0
        return 2.0 * float(body.semiaxes[k]), e
    e[0] = 1.0
    if isinstance(body, Ball):
        return 2.0 * body.radius, e
    if isinstance(body, SlabBall):
        return 2.0 * body.h, e
    raise TypeError(f"unsupported body {body!r}")


def lipschitz_constants(delta, omega):
    """``(M, N)`` with ``M = sqrt(delta^2 - omega^2)`` and ``N = delta / omega * M``."""
    if not omega > 0 or delta < omega:
        raise ValueError("need delta >= omega > 0")
    M = float(np.sqrt(delta * delta - omega * omega))
    return M, float(delta / omega * M)


def body_stats(body):
    delta, chord = global_diameter(body)
    omega, direction = thickness(body)
    if isinstance(body, Polytope) and omega > delta:
        omega = min(omega, delta)
    M, N = lipschitz_constants(delta, omega)
    return BodyStats(delta, omega, M, N, direction, chord)


# ---------------------------------------------------------------- s and p


def s_of(body, u):
    u = as_direction(u)
    top = body.contact_set(u)
    bottom = body.contact_set(-u)
    return float(cdist(top, bottom).max())


def p_of(body, u):
    u = as_direction(u)
    s = s_of(body, u)
    w = width(body, u)
    return _sqrt_nonneg(s * s - w * w, s * s)


# ---------------------------------------------------------------- diametral chords, r and q


def _arc_at(poly, x):
    """Outward normal arc ``(start, width)`` at a boundary point of a polygon."""
    act = poly.active_facets(x)
    angles = np.arctan2(poly.normals[act, 1], poly.normals[act, 0]) % (2 * np.pi)
    if len(act) == 1:
        return float(angles[0]), 0.0
    if len(act) == 2:
        w = (angles[1] - angles[0]) % (2 * np.pi)
        if w > np.pi:
            return float(angles[1]), float(2 * np.pi - w)
        return float(angles[0]), float(w)
    raise InconsistencyError(f"point {x} touches {len(act)} edges")


def _intersect_arcs(a, b, tol=ANGLE_TOL):
    """Intersection of two circular arcs given as ``(start, width)``, each narrower than pi."""
    a0, aw = a
    b0, bw = b
    base = a0 + ((b0 - a0 + tol) % (2 * np.pi)) - tol
    for start in (base, base - 2 * np.pi):
        lo = max(a0, start)
        hi = min(a0 + aw, start + bw)
        if hi >= lo:
            return lo, hi - lo
        if hi >= lo - tol:
            return 0.5 * (lo + hi), 0.0
    return None


def _chord_endpoints(poly, u, d):
    """Maximal chords parallel to ``u`` having at least one vertex endpoint."""
    tol = CONTACT_TOL * poly.scale
    V = poly.vertices
    found = []
    for sign in (1.0, -1.0):
        X = V + sign * d * u
        inside = (X @ poly.normals.T - poly.offsets).max(axis=1) <= tol
        for v, x in zip(V[inside], X[inside]):
            A, B = (v, x) if sign > 0 else (x, v)
            if not any(np.linalg.norm(A - a) <= tol for a, _ in found):
                found.append((A, B))
    return found


def _diff_cone(poly, u, d):
    """Unit generators of the difference body's normal cone at ``d u``."""
    x = d * u
    gap = np.abs(poly.diff_normals @ x - poly.diff_offsets)
    act = gap <= CONTACT_TOL * max(float(poly.diff_offsets.max()), 1.0)
    if not act.any():
        act = gap == gap.min()
    return poly.diff_normals[act]


def diametral_chords(body, u):
    """All maximal chords parallel to ``u``.

    Planar polygons are enumerated exactly; a family of parallel chords
    between two parallel edges is represented by its two extreme members.
    In higher dimensions the chords with a vertex endpoint are listed.
    """
    u = as_direction(u)
    d = float(dir_diameters(body, u[None, :])[0])
    if isinstance(body, Polytope):
        chords = []
        if body.dim == 2:
            for A, B in _chord_endpoints(body, u, d):
                arc_b = _arc_at(body, B)
                arc_a = _arc_at(body, A)
                arc = _intersect_arcs(arc_b, ((arc_a[0] + np.pi) % (2 * np.pi), arc_a[1]))
                if arc is None:
                    continue
                ends = np.array([angle_direction(arc[0]), angle_direction(arc[0] + arc[1])])
                strip = float(np.min(ends @ (B - A)))
                chords.append(DiametralChord(A, B, u, strip, ends))
        else:
            cone = _diff_cone(body, u, d)
            strip = float(np.min(cone @ (d * u)))
            for A, B in _chord_endpoints(body, u, d):
                chords.append(DiametralChord(A, B, u, strip, cone))
        if not chords:
            raise InconsistencyError(f"no diametral chord with admissible normals for u={u}")
        return chords
    if isinstance(body, Ellipsoid):
        B = 0.5 * d * u
        nu = body.outer_normal(B)
        return [DiametralChord(-B, B, u, float(np.dot(2 * B, nu)), nu[None, :])]
    if isinstance(body, Ball):
        A, B = body.center - body.radius * u, body.center + body.radius * u
        return [DiametralChord(A, B, u, 2.0 * body.radius, u[None, :])]
    if isinstance(body, SlabBall):
        return _slab_chords(body, u, d)
    raise TypeError(f"unsupported body {body!r}")


def _slab_chords(body, u, d):
    h, R = body.h, body.rim
    if abs(u[0]) < h or R == 0.0:
        return [DiametralChord(-u, u.copy(), u, 2.0, u[None, :])]
    # orient so the chord runs from x1 = -h to x1 = +h
    sgn = 1.0 if u[0] > 0 else -1.0
    v = sgn * u
    rest = v[1:]
    rn = np.linalg.norm(rest)
    e = np.zeros(body.dim)
    if rn > 0:
        e[1:] = rest / rn
    else:
        e[1] = 1.0
    e1 = np.zeros(body.dim)
    e1[0] = 1.0
    rise = 2 * h * rn / v[0]
    chords = []
    for y in sorted({-R, R - rise}):
        A = -h * e1 + y * e
        B = A + d * v
        if sgn < 0:
            A, B = B, A
        chords.append(DiametralChord(A, B, u, 2.0 * h, sgn * e1[None, :]))
    return chords


def r_of(body, u):
    """Smallest distance between parallel supporting hyperplanes through the ends of a diametral chord."""
    u = as_direction(u)
    if isinstance(body, Polytope) and body.dim > 2:
        return r_of_cone(body, u)
    return min(c.strip_width for c in diametral_chords(body, u))


def r_of_cone(poly, u):
    """``r`` via the normal cone of the difference body at ``d(u) u``.

    Every diametral chord for ``u`` admits exactly the normals of that cone;
    ``<d u, v> / |v|`` is quasiconcave on it, so the minimum sits on one of
    the generating facet normals.
    """
    u = as_direction(u)
    d = float(poly.diff_radial(u[None, :])[0])
    return float(np.min(_diff_cone(poly, u, d) @ (d * u)))


def q_of(body, u):
    u = as_direction(u)
    d = dir_diameter(body, u)
    r = r_of(body, u)
    if r <= 0:
        raise InconsistencyError("zero strip width for a full-dimensional body")
    return d * _sqrt_nonneg(d * d / (r * r) - 1.0)


def directional_sample(body, u):
    u = as_direction(u)
    w = width(body, u)
    d = dir_diameter(body, u)
    s = s_of(body, u)
    r = r_of(body, u)
    return DirectionalSample(
        u=u,
        w=w,
        d=d,
        s=s,
        p=_sqrt_nonneg(s * s - w * w, s * s),
        r=r,
        q=d * _sqrt_nonneg(d * d / (r * r) - 1.0),
    )


def profile(body, U):
    """Rows ``(w, d, s, p, r, q)`` for each direction in ``U``."""
    rows = []
    for u in np.atleast_2d(U):
        smp = directional_sample(body, u)
        rows.append((smp.w, smp.d, smp.s, smp.p, smp.r, smp.q))
    return np.array(rows)


# ---------------------------------------------------------------- genericity and refined constants


def genericity(poly, u):
    if not isinstance(poly, Polytope):
        raise BodyError("genericity is defined for polytopes")
    u = as_direction(u)
    gw = len(poly.contact_set(u)) == 1 and len(poly.contact_set(-u)) == 1
    chords = diametral_chords(poly, u)
    gd = False
    if len(chords) == 1:
        ends = [len(poly.active_facets(x)) for x in (chords[0].A, chords[0].B)]
        is_vertex = [min(np.linalg.norm(poly.vertices - x, axis=1)) <= CONTACT_TOL * poly.scale
                     for x in (chords[0].A, chords[0].B)]
        gd = sorted(is_vertex) == [False, True] and ends[is_vertex.index(False)] == 1
    return GenericityFlag(gw, gd)


def _polytope_candidates(poly):
    # p and q are even, so one direction per antipodal pair suffices
    V = poly.vertices
    i, j = np.triu_indices(len(V), k=1)
    return np.concatenate([poly.normals, poly.diff_normals, normalize(V[i] - V[j])])


def hat_constants(body, resolution=4096, seed=0):
    """``M_hat = max p`` and ``N_hat = max q`` over candidates plus a sweep.

    For polygons the candidate set (edge normals and vertex-difference
    directions) contains the maximisers, so the result is exact; the sweep
    only adds directions. Otherwise the values are estimates.
    """
    sweep = sample_directions(body.dim, resolution, seed)
    if isinstance(body, Polytope):
        cand = np.concatenate([_polytope_candidates(body), sweep])
        exact = body.dim == 2
    else:
        cand = np.concatenate([sweep, np.eye(body.dim), _special_directions(body)])
        exact = False
    P = np.array([p_of(body, u) for u in cand])
    Q = np.array([q_of(body, u) for u in cand])
    iM, iN = int(P.argmax()), int(Q.argmax())
    M_hat, N_hat = float(P[iM]), float(Q[iN])
    M_dir, N_dir = cand[iM], cand[iN]
    if body.dim == 2 and not isinstance(body, Polytope):
        M_hat, M_dir = _refine_planar(lambda u: p_of(body, u), M_hat, M_dir)
        N_hat, N_dir = _refine_planar(lambda u: q_of(body, u), N_hat, N_dir)
    if isinstance(body, Polytope):
        n_sweep = len(sweep)
        flags = [genericity(body, u).generic_for_diameter for u in sweep]
        generic_q = Q[-n_sweep:][np.array(flags, dtype=bool)]
        N_generic = float(generic_q.max()) if generic_q.size else float("nan")
    else:
        N_generic = N_hat
    return HatConstants(M_hat, N_hat, N_generic, exact, M_dir, N_dir)


def _special_directions(body):
    if isinstance(body, SlabBall) and body.h < 1:
        a = body.critical_angle
        out = np.zeros((2, body.dim))
        out[0, :2] = [np.cos(a), np.sin(a)]
        out[1, :2] = [np.cos(a), -np.sin(a)]
        return out
    return np.zeros((0, body.dim))


def _refine_planar(fun, best, direction, width=None):
    theta0 = float(np.arctan2(direction[1], direction[0]))
    width = width or 4e-3
    res = minimize_scalar(lambda t: -fun(angle_direction(t)), bounds=(theta0 - width, theta0 + width),
                          method="bounded", options={"xatol": 1e-12})
    if -res.fun > best:
        return float(-res.fun), angle_direction(res.x)
    return best, direction

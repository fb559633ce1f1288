"""Unit-sphere helpers: projective distance, great-circle arcs and seeded samplers."""

from dataclasses import dataclass

import numpy as np

UNIT_TOL = 1e-12


def normalize(v):
    """Return ``v`` scaled to unit length along the last axis."""
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def as_direction(u):
    u = np.asarray(u, dtype=float)
    norm = np.linalg.norm(u)
    if not np.isfinite(norm) or norm == 0.0:
        raise ValueError("direction must be a finite nonzero vector")
    if abs(norm - 1.0) > UNIT_TOL:
        u = u / norm
    return u


def projective_distance(u, v):
    """Spherical distance with antipodes identified, ``arccos |<u, v>|``.

    Works elementwise on stacked directions of shape ``(..., n)``. The result
    lies in ``[0, pi/2]`` and is unchanged when either argument is negated.
    Evaluated as ``2 atan2(|u - v'|, |u + v'|)`` with ``v' = +-v`` facing ``u``;
    plain ``arccos`` loses about half the digits for nearby directions.
    """
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    sign = np.where(np.sum(u * v, axis=-1) < 0, -1.0, 1.0)[..., None]
    v = sign * v
    return 2.0 * np.arctan2(np.linalg.norm(u - v, axis=-1), np.linalg.norm(u + v, axis=-1))


def euclid_min_distance(u, v):
    """``min(|u - v|, |u + v|)``, the chordal analogue of :func:`projective_distance`."""
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    return np.minimum(np.linalg.norm(u - v, axis=-1), np.linalg.norm(u + v, axis=-1))


def rotate_toward(u, tangent, angle):
    """Walk ``angle`` radians from ``u`` along the great circle with unit tangent ``tangent``."""
    angle = np.asarray(angle, float)[..., None]
    return np.cos(angle) * u + np.sin(angle) * tangent


def tangent_toward(u, v):
    """Unit tangent at ``u`` of the great circle heading to ``v``."""
    t = np.asarray(v, float) - np.dot(u, v) * np.asarray(u, float)
    norm = np.linalg.norm(t)
    if norm < UNIT_TOL:
        raise ValueError("no unique great circle through parallel directions")
    return t / norm


def random_tangent(u, rng):
    """Uniformly oriented unit tangent vector at ``u``."""
    while True:
        t = rng.standard_normal(len(u))
        t -= np.dot(t, u) * u
        norm = np.linalg.norm(t)
        if norm > 1e-8:
            return t / norm


@dataclass(frozen=True)
class GeodesicArc:
    """Shorter great-circle arc between two unit directions."""

    start: np.ndarray
    end: np.ndarray

    def __post_init__(self):
        start = as_direction(self.start)
        end = as_direction(self.end)
        if start.shape != end.shape:
            raise ValueError("arc endpoints differ in dimension")
        if np.linalg.norm(start - end) <= UNIT_TOL or np.linalg.norm(start + end) <= UNIT_TOL:
            raise ValueError("arc endpoints must be neither equal nor antipodal")
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "end", end)

    @property
    def length(self):
        return float(np.arccos(np.clip(np.dot(self.start, self.end), -1.0, 1.0)))

    @property
    def tangent(self):
        return tangent_toward(self.start, self.end)

    def point(self, t):
        """Point at fraction ``t`` of the arc (spherical linear interpolation)."""
        return geodesic_point(self, t)


def geodesic_point(arc, t):
    theta = arc.length
    if t == 1.0:
        return arc.end.copy()
    p = rotate_toward(arc.start, arc.tangent, t * theta)
    return p / np.linalg.norm(p)


def _generator(seed):
    # Philox is counter based, so row i depends only on (seed, i).
    return np.random.Generator(np.random.Philox(key=seed))


def sample_directions(n, count, seed):
    """Deterministic, uniformly distributed unit vectors, shape ``(count, n)``."""
    if n < 2 or count < 1:
        raise ValueError("need n >= 2 and count >= 1")
    g = _generator(seed).standard_normal((count, n))
    norms = np.linalg.norm(g, axis=1)
    bad = norms < 1e-300
    if np.any(bad):
        g[bad] = np.eye(n)[0]
        norms[bad] = 1.0
    return g / norms[:, None]


def sample_pairs(n, count, seed, min_rho=1e-6):
    """Seeded pairs of directions with projective distance at least ``min_rho``.

    Returns two arrays of shape ``(count, n)``. Candidate pairs closer than
    ``min_rho`` are discarded, so ratios built on these pairs never divide by
    a near-zero distance.
    """
    if not 0.0 < min_rho < np.pi / 2:
        raise ValueError("min_rho must lie in (0, pi/2)")
    rng = _generator(seed)
    us, vs, have = [], [], 0
    while have < count:
        batch = max(2 * (count - have), 16)
        u = normalize(rng.standard_normal((batch, n)))
        v = normalize(rng.standard_normal((batch, n)))
        keep = projective_distance(u, v) >= min_rho
        us.append(u[keep])
        vs.append(v[keep])
        have += int(keep.sum())
    return np.concatenate(us)[:count], np.concatenate(vs)[:count]


def canonical_sign(u, tol=1e-12):
    """Flip ``u`` so that its first non-negligible coordinate is positive."""
    u = np.asarray(u, float)
    for x in u:
        if abs(x) > tol:
            return (u if x > 0 else -u) + 0.0
    return u + 0.0


def angle_direction(theta):
    return np.array([np.cos(theta), np.sin(theta)])

"""Convex bodies with support-function evaluation.

Four concrete representations share one small interface:

* ``support(u)`` returns ``h_K(u) = max <x, u>`` and the contact set,
* ``support_values(U)`` evaluates ``h_K`` on a stack of directions,
* ``chord_intervals(P, D)`` clips the lines ``P + t D`` against the body.

Polytopes also carry their difference body ``K - K`` as facet data; the
support function of that body is the width function of ``K`` and its
radial function is the directional diameter.
"""

import json
from collections.abc import Mapping

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .geometry import as_direction

CONTACT_TOL = 1e-9
PARALLEL_TOL = 1e-12


class BodyError(ValueError):
    """Raised for body descriptions that do not define a convex body."""


def _merge_facets(normals, offsets, tol=1e-9):
    keep_n, keep_b = [], []
    for a, b in zip(normals, offsets):
        if any(np.linalg.norm(a - c) < tol for c in keep_n):
            continue
        keep_n.append(a)
        keep_b.append(b)
    return np.array(keep_n), np.array(keep_b)


def _hull(points):
    """Extreme points and merged facet inequalities ``normals @ x <= offsets``."""
    points = np.asarray(points, dtype=float)
    n = points.shape[1]
    if len(points) < n + 1:
        raise BodyError(f"need at least {n + 1} vertices in dimension {n}; body is not full-dimensional")
    centered = points - points.mean(axis=0)
    rank = np.linalg.matrix_rank(centered, tol=1e-10 * max(1.0, np.abs(centered).max()))
    if rank < n:
        raise BodyError("vertices are not full-dimensional (empty interior)")
    try:
        hull = ConvexHull(points)
    except QhullError as exc:
        raise BodyError(f"convex hull failed: {exc}") from exc
    normals, offsets = _merge_facets(hull.equations[:, :-1], -hull.equations[:, -1])
    return points[hull.vertices], normals, offsets


class Body:
    """Common interface; subclasses implement the support function."""

    dim: int
    kind: str

    def support(self, u):
        u = as_direction(u)
        contact = self.contact_set(u)
        return float(self.support_values(u[None, :])[0]), contact

    def width_values(self, U):
        U = np.atleast_2d(U)
        return self.support_values(U) + self.support_values(-U)

    def chord_lengths(self, points, dirs):
        t0, t1 = self.chord_intervals(points, dirs)
        return np.maximum(t1 - t0, 0.0)


class Polytope(Body):
    """Convex hull of finitely many points (V-representation).

    Parameters
    ----------
    vertices : array_like, shape (m, n)
        Generating points. Interior and duplicate points are discarded so
        ``vertices`` holds exactly the extreme points; in the plane they are
        stored counterclockwise.
    """

    kind = "polytope"

    def __init__(self, vertices):
        pts = np.asarray(vertices, dtype=float)
        if pts.ndim != 2 or pts.shape[1] < 2:
            raise BodyError("vertices must be an (m, n) array with n >= 2")
        if not np.all(np.isfinite(pts)):
            raise BodyError("vertex coordinates must be finite")
        self.vertices, self.normals, self.offsets = _hull(pts)
        self.dim = pts.shape[1]
        self.scale = float(np.linalg.norm(self.vertices, axis=1).max())
        diffs = (self.vertices[:, None, :] - self.vertices[None, :, :]).reshape(-1, self.dim)
        self.diff_vertices, self.diff_normals, self.diff_offsets = _hull(diffs)

    def __repr__(self):
        return f"Polytope({len(self.vertices)} vertices, dim={self.dim})"

    @classmethod
    def box(cls, sides):
        sides = np.asarray(sides, float)
        corners = np.array(np.meshgrid(*[[0.0, a] for a in sides], indexing="ij"))
        return cls(corners.reshape(len(sides), -1).T)

    @classmethod
    def regular(cls, m, circumradius=1.0, phase=0.0):
        theta = phase + 2 * np.pi * np.arange(m) / m
        return cls(circumradius * np.column_stack([np.cos(theta), np.sin(theta)]))

    @classmethod
    def circumscribed(cls, m, radius=1.0):
        """Regular m-gon whose inscribed circle has the given radius.

        Edge normals sit at angles ``2 pi k / m``, so the polygons for
        m, 2m, 4m, ... are nested.
        """
        return cls.regular(m, radius / np.cos(np.pi / m), phase=np.pi / m)

    def support_values(self, U):
        return (np.atleast_2d(U) @ self.vertices.T).max(axis=1)

    def contact_set(self, u, tol=CONTACT_TOL):
        """Vertices within ``tol * scale`` of the supporting hyperplane."""
        proj = self.vertices @ np.asarray(u, float)
        return self.vertices[proj >= proj.max() - tol * self.scale]

    def contains(self, x, tol=CONTACT_TOL):
        return bool(np.max(self.normals @ np.asarray(x, float) - self.offsets) <= tol * self.scale)

    def active_facets(self, x, tol=CONTACT_TOL):
        """Indices of the facets whose hyperplanes pass through ``x``."""
        gap = self.offsets - self.normals @ np.asarray(x, float)
        return np.flatnonzero(np.abs(gap) <= tol * self.scale)

    def chord_intervals(self, points, dirs):
        P = np.atleast_2d(points)
        D = np.atleast_2d(dirs)
        num = self.offsets[None, :] - P @ self.normals.T
        den = D @ self.normals.T
        # lines within round-off of parallel to a facet are treated as parallel
        parallel = np.abs(den) <= PARALLEL_TOL * np.linalg.norm(D, axis=1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = num / den
        hi = np.where(~parallel & (den > 0), ratio, np.inf).min(axis=1)
        lo = np.where(~parallel & (den < 0), ratio, -np.inf).max(axis=1)
        blocked = np.any(parallel & (num < -CONTACT_TOL * self.scale), axis=1)
        lo = np.where(blocked, np.inf, lo)
        return lo, hi

    def diff_radial(self, U):
        """Radial function of the difference body, i.e. the directional diameter."""
        den = np.atleast_2d(U) @ self.diff_normals.T
        with np.errstate(divide="ignore"):
            ratio = np.where(den > 0, self.diff_offsets / np.where(den > 0, den, 1.0), np.inf)
        return ratio.min(axis=1)

    # planar helpers

    def _require_planar(self):
        if self.dim != 2:
            raise BodyError("operation is defined for planar polygons only")

    def edges(self):
        self._require_planar()
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def edge_normals(self):
        """Outward unit normals; row i belongs to the edge from vertex i to i+1."""
        a, b = self.edges()
        e = b - a
        nrm = np.column_stack([e[:, 1], -e[:, 0]])
        return nrm / np.linalg.norm(nrm, axis=1, keepdims=True)

    def vertex_index(self, vertex, tol=1e-9):
        dist = np.linalg.norm(self.vertices - np.asarray(vertex, float), axis=1)
        i = int(dist.argmin())
        if dist[i] > tol * max(self.scale, 1.0):
            raise BodyError(f"{vertex} is not a vertex of the polygon")
        return i


def normal_cone_2d(poly, vertex):
    """Arc ``(start, end)`` in radians of outward normals at a polygon vertex.

    ``start`` is the normal of the incoming edge and lies in ``[0, 2 pi)``;
    ``end`` is the normal of the outgoing edge, ``start < end < start + pi``.
    """
    i = poly.vertex_index(vertex)
    normals = poly.edge_normals()
    n_in, n_out = normals[i - 1], normals[i]
    start = np.arctan2(n_in[1], n_in[0]) % (2 * np.pi)
    width = (np.arctan2(n_out[1], n_out[0]) - start) % (2 * np.pi)
    return float(start), float(start + width)


def difference_body(poly):
    """``K + (-K)`` as a new polytope."""
    return Polytope(poly.diff_vertices)


def _quadratic_interval(a, b, c):
    disc = b * b - 4 * a * c
    root = np.sqrt(np.maximum(disc, 0.0))
    lo = (-b - root) / (2 * a)
    hi = (-b + root) / (2 * a)
    empty = disc < 0
    return np.where(empty, np.inf, lo), np.where(empty, -np.inf, hi)


class Ellipsoid(Body):
    """Centered, axis-aligned ellipsoid ``sum (x_i / a_i)^2 <= 1``."""

    kind = "ellipsoid"

    def __init__(self, semiaxes):
        a = np.asarray(semiaxes, dtype=float)
        if a.ndim != 1 or len(a) < 2:
            raise BodyError("ellipsoid needs at least two semiaxes")
        if not np.all(np.isfinite(a)) or np.any(a <= 0):
            raise BodyError("semiaxes must be positive")
        self.semiaxes = a
        self.dim = len(a)
        self.scale = float(a.max())

    def __repr__(self):
        return f"Ellipsoid({self.semiaxes.tolist()})"

    def support_values(self, U):
        return np.sqrt(((np.atleast_2d(U) * self.semiaxes) ** 2).sum(axis=1))

    def contact_set(self, u, tol=CONTACT_TOL):
        u = np.asarray(u, float)
        x = self.semiaxes**2 * u
        return (x / np.sqrt(np.dot(x, u)))[None, :]

    def outer_normal(self, x):
        g = np.asarray(x, float) / self.semiaxes**2
        return g / np.linalg.norm(g)

    def radial(self, U):
        return 1.0 / np.sqrt(((np.atleast_2d(U) / self.semiaxes) ** 2).sum(axis=1))

    def contains(self, x, tol=CONTACT_TOL):
        return bool(np.sum((np.asarray(x, float) / self.semiaxes) ** 2) <= 1 + tol)

    def chord_intervals(self, points, dirs):
        P = np.atleast_2d(points) / self.semiaxes
        D = np.atleast_2d(dirs) / self.semiaxes
        return _quadratic_interval((D * D).sum(1), 2 * (P * D).sum(1), (P * P).sum(1) - 1)


class Ball(Body):
    kind = "ball"

    def __init__(self, radius, center):
        c = np.asarray(center, dtype=float)
        if c.ndim != 1 or len(c) < 2 or not np.all(np.isfinite(c)):
            raise BodyError("ball center must be a finite vector of dimension >= 2")
        if not np.isfinite(radius) or radius <= 0:
            raise BodyError("radius must be positive")
        self.radius = float(radius)
        self.center = c
        self.dim = len(c)
        self.scale = float(np.linalg.norm(c) + radius)

    def __repr__(self):
        return f"Ball(radius={self.radius}, center={self.center.tolist()})"

    def support_values(self, U):
        U = np.atleast_2d(U)
        return U @ self.center + self.radius * np.linalg.norm(U, axis=1)

    def contact_set(self, u, tol=CONTACT_TOL):
        return (self.center + self.radius * np.asarray(u, float))[None, :]

    def contains(self, x, tol=CONTACT_TOL):
        return bool(np.linalg.norm(np.asarray(x, float) - self.center) <= self.radius * (1 + tol))

    def chord_intervals(self, points, dirs):
        P = (np.atleast_2d(points) - self.center) / self.radius
        D = np.atleast_2d(dirs) / self.radius
        return _quadratic_interval((D * D).sum(1), 2 * (P * D).sum(1), (P * P).sum(1) - 1)


class SlabBall(Body):
    """Unit ball cut by the slab ``|x_1| <= half_width``.

    With ``half_width >= 1`` the slab is inactive and the body is the unit
    ball. Thickness is ``2 * min(half_width, 1)``, diameter 2.
    """

    kind = "slab_ball"

    def __init__(self, half_width, dim=2):
        if not np.isfinite(half_width) or half_width <= 0:
            raise BodyError("half_width must be positive")
        if int(dim) != dim or dim < 2:
            raise BodyError("dim must be an integer >= 2")
        self.half_width = float(half_width)
        self.dim = int(dim)
        self.h = min(self.half_width, 1.0)
        self.rim = float(np.sqrt(1.0 - self.h**2))
        self.scale = 1.0

    def __repr__(self):
        return f"SlabBall(half_width={self.half_width}, dim={self.dim})"

    @property
    def critical_angle(self):
        """Angle from e1 beyond which the round part carries the support."""
        return float(np.arccos(self.h))

    def support_values(self, U):
        U = np.atleast_2d(U)
        u1 = np.abs(U[:, 0])
        rest = np.linalg.norm(U[:, 1:], axis=1)
        return np.where(u1 <= self.h, np.linalg.norm(U, axis=1), self.h * u1 + self.rim * rest)

    def contact_set(self, u, tol=CONTACT_TOL):
        u = np.asarray(u, float)
        u1 = u[0]
        if abs(u1) <= self.h:
            return u[None, :].copy()
        rest = u[1:]
        norm = np.linalg.norm(rest)
        side = np.sign(u1) * self.h
        if norm > tol:
            return np.concatenate([[side], self.rim * rest / norm])[None, :]
        # flat face: report the two rim points along e2, which realise
        # every distance that matters for s
        e2 = np.zeros(self.dim - 1)
        e2[0] = self.rim
        if self.rim == 0.0:
            return np.concatenate([[side], e2])[None, :]
        return np.array([np.concatenate([[side], e2]), np.concatenate([[side], -e2])])

    def contains(self, x, tol=CONTACT_TOL):
        x = np.asarray(x, float)
        return bool(np.linalg.norm(x) <= 1 + tol and abs(x[0]) <= self.h + tol)

    def chord_intervals(self, points, dirs):
        P = np.atleast_2d(points)
        D = np.atleast_2d(dirs)
        lo, hi = _quadratic_interval((D * D).sum(1), 2 * (P * D).sum(1), (P * P).sum(1) - 1)
        p1, d1 = P[:, 0], D[:, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            ta = (-self.h - p1) / d1
            tb = (self.h - p1) / d1
        flat = d1 == 0
        slo = np.where(flat, np.where(np.abs(p1) <= self.h, -np.inf, np.inf), np.minimum(ta, tb))
        shi = np.where(flat, np.where(np.abs(p1) <= self.h, np.inf, -np.inf), np.maximum(ta, tb))
        return np.maximum(lo, slo), np.minimum(hi, shi)


def _rotation_applied(doc, vertices):
    rot = doc.get("rotation")
    if rot is not None:
        R = np.asarray(rot, float)
        if R.shape != (vertices.shape[1],) * 2:
            raise BodyError("rotation must be an n x n matrix")
        if not np.allclose(R.T @ R, np.eye(len(R)), atol=1e-9):
            raise BodyError("rotation matrix must be orthogonal")
        vertices = vertices @ R.T
    shift = doc.get("translation")
    if shift is not None:
        shift = np.asarray(shift, float)
        if shift.shape != (vertices.shape[1],):
            raise BodyError("translation dimension mismatch")
        vertices = vertices + shift
    return vertices


def parse_body(text):
    """Build a body from its JSON description (a string or an already-decoded mapping).

    Accepted documents::

        {"type": "polytope", "vertices": [[x, y, ...], ...]}
        {"type": "ellipsoid", "semiaxes": [a, b, ...]}
        {"type": "ball", "radius": r, "center": [...]}
        {"type": "slab_ball", "half_width": h, "dim": n}

    Polytopes may add ``"rotation"`` (orthogonal matrix) and ``"translation"``;
    both are applied to the vertices here and nowhere else.
    """
    if isinstance(text, Mapping):
        doc = text
    elif not isinstance(text, (str, bytes, bytearray)):
        raise BodyError(f"expected a JSON document or a mapping, got {type(text).__name__}")
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise BodyError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, Mapping) or "type" not in doc:
        raise BodyError("body document must be an object with a 'type' field")
    kind = doc["type"]
    try:
        if kind == "polytope":
            verts = np.asarray(doc["vertices"], dtype=float)
            if verts.ndim != 2:
                raise BodyError("vertices must all have the same dimension")
            return Polytope(_rotation_applied(doc, verts))
        if kind == "ellipsoid":
            return Ellipsoid(doc["semiaxes"])
        if kind == "ball":
            center = doc.get("center")
            if center is None:
                center = [0.0] * int(doc.get("dim", 2))
            return Ball(float(doc["radius"]), center)
        if kind == "slab_ball":
            return SlabBall(float(doc["half_width"]), doc.get("dim", 2))
    except KeyError as exc:
        raise BodyError(f"missing field {exc} for body type {kind!r}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, BodyError):
            raise
        raise BodyError(f"malformed {kind} document: {exc}") from exc
    raise BodyError(f"unknown body type {kind!r}")


def load_body(path):
    with open(path, encoding="utf-8") as fh:
        return parse_body(fh.read())


def body_document(body):
    """Inverse of :func:`parse_body`."""
    if isinstance(body, Polytope):
        return {"type": "polytope", "vertices": body.vertices.tolist()}
    if isinstance(body, Ellipsoid):
        return {"type": "ellipsoid", "semiaxes": body.semiaxes.tolist()}
    if isinstance(body, Ball):
        return {"type": "ball", "radius": body.radius, "center": body.center.tolist()}
    if isinstance(body, SlabBall):
        return {"type": "slab_ball", "half_width": body.half_width, "dim": body.dim}
    raise TypeError(f"not a body: {body!r}")

"""Worked examples with closed forms, recomputed through the generic code paths.

Three families are covered:

* the 3-4-5 triangle, whose refined constants ``M_hat = 4`` and
  ``N_hat = 20/3`` are attained as suprema of the difference quotients and
  as one-sided limits along a specific geodesic,
* axis-parallel boxes, where the same kind of geodesic limits recover
  ``M`` and ``N`` themselves,
* the ellipse ``x^2/a^2 + y^2/b^2 <= 1`` with explicit ``w, d, s, p, r, q``.
"""

from dataclasses import asdict, dataclass

import numpy as np

from .bodies import Ellipsoid, Polytope
from .geometry import angle_direction, normalize
from .harness import geodesic_limit, sup_delta_estimate
from .metrics import body_stats, directional_sample, hat_constants

TRIANGLE = ((0.0, 0.0), (5.0, 0.0), (3.2, 2.4))
BOXES = ((1.0, 2.0), (1.0, 2.0, 3.0))
ELLIPSE = (2.0, 1.0)
ELLIPSE_ANGLES = 100
LIMIT_MESHES = (1e-3, 1e-4, 1e-5, 1e-6)


@dataclass(frozen=True)
class ExampleRow:
    name: str
    computed: float
    expected: float
    tolerance: float
    relative: bool

    @property
    def deviation(self):
        err = abs(self.computed - self.expected)
        return err / abs(self.expected) if self.relative else err

    @property
    def passed(self):
        return bool(self.deviation <= self.tolerance)

    def to_dict(self):
        doc = asdict(self)
        doc["deviation"] = self.deviation
        doc["passed"] = self.passed
        return doc


def ellipse_formulas(a, b, alpha):
    """Closed forms of ``w, d, s, p, r, q`` at ``u = (cos alpha, sin alpha)``.

    ``alpha`` may be an array; each entry of the returned dict has its shape.
    """
    c2, s2 = np.cos(alpha) ** 2, np.sin(alpha) ** 2
    wide = a * a * c2 + b * b * s2
    narrow = a * a * s2 + b * b * c2
    twist = np.abs((a * a - b * b) * np.sin(2 * alpha))
    return {
        "w": 2 * np.sqrt(wide),
        "d": 2 * a * b / np.sqrt(narrow),
        "s": 2 * np.sqrt((a**4 * c2 + b**4 * s2) / wide),
        "p": twist / np.sqrt(wide),
        "r": 2 * a * b * np.sqrt(narrow / (a**4 * s2 + b**4 * c2)),
        "q": a * b * twist / narrow**1.5,
    }


def ellipse_deviations(a=ELLIPSE[0], b=ELLIPSE[1], count=ELLIPSE_ANGLES, relative=False):
    """Largest deviation per quantity between computed and closed-form values.

    With ``relative=True`` the error is divided by the closed-form value,
    or by the diameter ``2 max(a, b)`` where that value is below
    ``1e-6`` of the diameter (round-off zeros such as ``p`` on the axes).
    """
    body = Ellipsoid([a, b])
    delta = 2 * max(a, b)
    alpha = 2 * np.pi * np.arange(count) / count
    expected = ellipse_formulas(a, b, alpha)
    computed = {k: np.empty(count) for k in expected}
    for i, t in enumerate(alpha):
        smp = directional_sample(body, angle_direction(t))
        for k in computed:
            computed[k][i] = getattr(smp, k)
    out = {}
    for k in expected:
        err = np.abs(computed[k] - expected[k])
        if relative:
            err = err / np.maximum(np.abs(expected[k]), 1e-6 * delta)
        out[k] = float(err.max())
    return out


def triangle_rows(seed=42, tolerance=0.01):
    K = Polytope(TRIANGLE)
    A, B, C = (np.array(p) for p in TRIANGLE)
    c = np.linalg.norm(B - A)
    side_b = C - A
    e, f = B - A, C - A
    area = 0.5 * abs(e[0] * f[1] - e[1] * f[0])
    h_b = 2 * area / np.linalg.norm(side_b)
    M_hat = float(np.sqrt(c * c - h_b * h_b))
    N_hat = float(c / h_b * M_hat)
    v_hat = normalize(B - A)
    u_hat = normalize(np.array([side_b[1], -side_b[0]]))
    if np.dot(u_hat, v_hat) < 0:
        u_hat = -u_hat
    hat = hat_constants(K)
    return [
        ExampleRow("triangle sup dw vs M_hat", sup_delta_estimate(K, "width", seed=seed), M_hat, tolerance, True),
        ExampleRow("triangle sup dd vs N_hat", sup_delta_estimate(K, "diameter", seed=seed), N_hat, tolerance, True),
        ExampleRow("triangle geodesic dw at u_hat",
                   geodesic_limit(K, u_hat, v_hat, "width", LIMIT_MESHES).values[-1], M_hat, tolerance, True),
        ExampleRow("triangle geodesic dd at v_hat",
                   geodesic_limit(K, v_hat, u_hat, "diameter", LIMIT_MESHES).values[-1], N_hat, tolerance, True),
        ExampleRow("triangle max p vs M_hat", hat.M_hat, M_hat, 1e-9, True),
        ExampleRow("triangle max q vs N_hat", hat.N_hat, N_hat, 1e-9, True),
    ]


def box_limits(sides, meshes=LIMIT_MESHES):
    """One-sided geodesic quotients at ``e1`` (width) and at the main diagonal (diameter).

    Returns ``(dw, dd, M, N)`` where ``dw`` and ``dd`` are the quotients at
    the smallest mesh.
    """
    K = Polytope.box(sides)
    stats = body_stats(K)
    e1 = np.eye(len(sides))[0]
    diag = normalize(np.asarray(sides, float))
    dw = geodesic_limit(K, e1, diag, "width", meshes).values[-1]
    dd = geodesic_limit(K, diag, e1, "diameter", meshes).values[-1]
    return dw, dd, stats.M, stats.N


def box_rows(tolerance=0.01):
    rows = []
    for sides in BOXES:
        dw, dd, M, N = box_limits(sides)
        label = "x".join(f"{a:g}" for a in sides)
        rows.append(ExampleRow(f"box {label} geodesic dw at e1 vs M", dw, M, tolerance, True))
        rows.append(ExampleRow(f"box {label} geodesic dd at diagonal vs N", dd, N, tolerance, True))
    return rows


def ellipse_rows(tolerance=1e-9):
    devs = ellipse_deviations()
    return [ExampleRow(f"ellipse {k} over {ELLIPSE_ANGLES} angles", v, 0.0, tolerance, False) for k, v in devs.items()]


def paper_examples(seed=42):
    """All example rows: triangle, boxes, ellipse."""
    return triangle_rows(seed) + box_rows() + ellipse_rows()

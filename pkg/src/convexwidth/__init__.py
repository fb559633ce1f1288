"""Width, diameter and point-diameter functions of convex bodies and their Lipschitz moduli."""

__version__ = "0.1.0"

from .bodies import Ball, BodyError, Ellipsoid, Polytope, SlabBall, difference_body, load_body, parse_body  # noqa: E402
from .metrics import (  # noqa: E402
    body_stats,
    dir_diameter,
    global_diameter,
    hat_constants,
    lipschitz_constants,
    p_of,
    q_of,
    r_of,
    s_of,
    thickness,
    width,
)

__all__ = [
    "Ball",
    "BodyError",
    "Ellipsoid",
    "Polytope",
    "SlabBall",
    "body_stats",
    "difference_body",
    "dir_diameter",
    "global_diameter",
    "hat_constants",
    "lipschitz_constants",
    "load_body",
    "p_of",
    "parse_body",
    "q_of",
    "r_of",
    "s_of",
    "thickness",
    "width",
]

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convexwidth.bodies import (
    Ball,
    BodyError,
    Ellipsoid,
    Polytope,
    SlabBall,
    body_document,
    difference_body,
    load_body,
    normal_cone_2d,
    parse_body,
)
from convexwidth.geometry import normalize, sample_directions
from oracles import random_polygon

SQUARE = [[0, 0], [1, 0], [1, 1], [0, 1]]
TRIANGLE = [[0, 0], [5, 0], [3.2, 2.4]]


def as_set(points):
    return {tuple(np.round(p, 12)) for p in np.atleast_2d(points)}


def test_parse_square():
    body = parse_body(json.dumps({"type": "polytope", "vertices": SQUARE}))
    assert isinstance(body, Polytope)
    assert len(body.vertices) == 4


def test_parse_reduces_to_hull():
    doc = {"type": "polytope", "vertices": SQUARE + [[1, 1], [0.5, 0.5], [0.2, 0.7]]}
    body = parse_body(doc)
    assert as_set(body.vertices) == as_set(SQUARE)


def test_parse_segment_is_not_full_dimensional():
    with pytest.raises(BodyError, match="not full-dimensional"):
        parse_body({"type": "polytope", "vertices": [[0, 0], [1, 1]]})


@pytest.mark.parametrize(
    "doc",
    [
        {"type": "polytope", "vertices": [[0, 0], [1, 0], [0, 1, 2]]},
        {"type": "polytope", "vertices": [[0, 0], [1, 1], [2, 2], [3, 3]]},
        {"type": "ellipsoid", "semiaxes": [1, 0]},
        {"type": "ellipsoid", "semiaxes": [1, -2]},
        {"type": "ball", "radius": 0, "center": [0, 0]},
        {"type": "ball", "center": [0, 0]},
        {"type": "slab_ball", "half_width": -0.5},
        {"type": "torus"},
        {"vertices": SQUARE},
    ],
)
def test_parse_errors(doc):
    with pytest.raises(BodyError):
        parse_body(doc)


@pytest.mark.parametrize("text", ["{not json", "[1, 2, 3]", "null"])
def test_parse_invalid_documents(text):
    with pytest.raises(BodyError):
        parse_body(text)


def test_parse_rejects_non_documents():
    with pytest.raises(BodyError):
        parse_body([1, 2, 3])


def test_parse_rotation_and_translation():
    c, s = np.cos(0.3), np.sin(0.3)
    doc = {"type": "polytope", "vertices": SQUARE, "rotation": [[c, -s], [s, c]], "translation": [2, 3]}
    body = parse_body(doc)
    expected = np.asarray(SQUARE, float) @ np.array([[c, -s], [s, c]]).T + [2, 3]
    assert as_set(body.vertices) == as_set(expected)


def test_parse_rejects_non_orthogonal_rotation():
    with pytest.raises(BodyError):
        parse_body({"type": "polytope", "vertices": SQUARE, "rotation": [[2, 0], [0, 1]]})


@pytest.mark.parametrize(
    "body",
    [Polytope(TRIANGLE), Ellipsoid([2, 1, 3]), Ball(1.5, [1, -2]), SlabBall(0.4, 3)],
    ids=lambda b: b.kind,
)
def test_document_round_trip(body, tmp_path):
    path = tmp_path / "body.json"
    path.write_text(json.dumps(body_document(body)), encoding="utf-8")
    again = load_body(path)
    U = sample_directions(body.dim, 50, seed=0)
    assert np.allclose(again.support_values(U), body.support_values(U))


def test_square_support_and_contact():
    value, contact = Polytope(SQUARE).support([1, 0])
    assert value == 1.0
    assert as_set(contact) == {(1.0, 0.0), (1.0, 1.0)}


@pytest.mark.parametrize(
    "u, expected",
    [
        ([1, 0], {(1.0, 0.0), (1.0, 1.0)}),
        ([1, 1], {(1.0, 1.0)}),
    ],
)
def test_square_contact_set(u, expected):
    assert as_set(Polytope(SQUARE).contact_set(normalize(np.asarray(u, float)), tol=1e-9)) == expected


def test_triangle_contact_set_bottom():
    assert as_set(Polytope(TRIANGLE).contact_set(np.array([0.0, -1.0]))) == {(0.0, 0.0), (5.0, 0.0)}


@pytest.mark.parametrize("alpha", np.linspace(0, 2 * np.pi, 9))
def test_ellipse_support(alpha):
    u = np.array([np.cos(alpha), np.sin(alpha)])
    value, contact = Ellipsoid([2, 1]).support(u)
    assert value == pytest.approx(np.sqrt(4 * np.cos(alpha) ** 2 + np.sin(alpha) ** 2), rel=1e-14)
    assert np.allclose(contact[0], np.array([4 * np.cos(alpha), np.sin(alpha)]) / value)
    assert np.dot(contact[0], u) == pytest.approx(value, rel=1e-14)


def test_ball_support():
    u = normalize(np.array([0.3, -0.7]))
    value, contact = Ball(1.0, [0, 0]).support(u)
    assert value == pytest.approx(1.0)
    assert np.allclose(contact[0], u)


def test_polytope_support_is_exact_vertex_max():
    rng = np.random.default_rng(2)
    for _ in range(20):
        K = Polytope(random_polygon(rng, 9))
        U = sample_directions(2, 40, seed=int(rng.integers(1000)))
        assert np.array_equal(K.support_values(U), (U @ K.vertices.T).max(axis=1))


@pytest.mark.parametrize(
    "vertex, expected",
    [((1, 1), (0.0, 90.0)), ((0, 0), (180.0, 270.0)), ((1, 0), (270.0, 360.0))],
)
def test_square_normal_cones(vertex, expected):
    start, end = normal_cone_2d(Polytope(SQUARE), vertex)
    assert np.degrees([start, end]) == pytest.approx(expected)


def test_equilateral_apex_normal_cone():
    tri = Polytope([[0, 0], [1, 0], [0.5, np.sqrt(3) / 2]])
    start, end = normal_cone_2d(tri, (0.5, np.sqrt(3) / 2))
    # exterior angle at a 60 degree corner
    assert np.degrees(end - start) == pytest.approx(120.0)
    assert np.degrees(0.5 * (start + end)) == pytest.approx(90.0)


def test_normal_cone_of_non_vertex():
    with pytest.raises(BodyError):
        normal_cone_2d(Polytope(SQUARE), (0.5, 0.0))


def test_difference_body_of_square():
    D = difference_body(Polytope(SQUARE))
    assert as_set(D.vertices) == {(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)}


def test_difference_body_of_right_triangle():
    D = difference_body(Polytope([[0, 0], [1, 0], [0, 1]]))
    assert as_set(D.vertices) == {(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, -1.0), (-1.0, 1.0)}


def test_difference_body_support_is_width():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = int(rng.integers(2, 4))
        K = Polytope(rng.normal(size=(n + 4, n)))
        D = difference_body(K)
        U = sample_directions(n, 10, seed=int(rng.integers(10_000)))
        assert np.allclose(D.support_values(U), K.width_values(U), atol=1e-12)
        # central symmetry
        assert np.allclose(D.support_values(U), D.support_values(-U), atol=1e-12)


def test_difference_facets_match_difference_body():
    K = Polytope(TRIANGLE)
    U = sample_directions(2, 200, seed=1)
    radial = K.diff_radial(U)
    # radial points lie on the boundary of K - K
    pts = radial[:, None] * U
    D = difference_body(K)
    gaps = (pts @ D.normals.T - D.offsets).max(axis=1)
    assert np.all(np.abs(gaps) < 1e-12)


def test_full_dimensional_width_positive():
    for K in [Polytope(TRIANGLE), Ellipsoid([2, 1]), Ball(0.1, [3, 3]), SlabBall(0.05)]:
        U = sample_directions(2, 100, seed=5)
        assert np.all(K.width_values(U) > 0)


@settings(max_examples=25, deadline=None)
@given(st.floats(1.0, 5.0), st.integers(2, 4), st.integers(0, 2**16))
def test_slab_ball_wide_slab_is_unit_ball(h, dim, seed):
    slab, ball = SlabBall(h, dim), Ball(1.0, np.zeros(dim))
    U = sample_directions(dim, 1000, seed)
    assert np.allclose(slab.support_values(U), ball.support_values(U), atol=1e-15)


def test_slab_ball_support_piecewise():
    K = SlabBall(0.5)
    assert K.support([1, 0])[0] == pytest.approx(0.5)
    assert K.support([0, 1])[0] == pytest.approx(1.0)
    alpha = K.critical_angle
    assert alpha == pytest.approx(np.arccos(0.5))
    u = np.array([np.cos(alpha), np.sin(alpha)])
    assert K.support(u)[0] == pytest.approx(1.0)
    u = np.array([np.cos(0.3), np.sin(0.3)])
    assert K.support(u)[0] == pytest.approx(0.5 * np.cos(0.3) + np.sqrt(0.75) * np.sin(0.3))


def test_slab_ball_face_contact_has_two_corners():
    contact = SlabBall(0.5).contact_set(np.array([1.0, 0.0]))
    assert as_set(contact) == {(0.5, np.round(np.sqrt(0.75), 12)), (0.5, -np.round(np.sqrt(0.75), 12))}


@pytest.mark.parametrize("body", [Polytope(TRIANGLE), Ellipsoid([2, 1]), Ball(1, [0.5, 0.5]), SlabBall(0.3)],
                         ids=lambda b: b.kind)
def test_contact_points_attain_support(body):
    for u in sample_directions(2, 50, seed=11):
        value, contact = body.support(u)
        assert np.allclose(contact @ u, value, atol=1e-9)


def test_chord_intervals_of_square():
    K = Polytope(SQUARE)
    lo, hi = K.chord_intervals([[0.5, 0.5], [0.5, 0.0], [2.0, 2.0]], [[1, 0], [1, 0], [1, 0]])
    assert hi[0] - lo[0] == pytest.approx(1.0)
    # a line along an edge still meets the body in that edge
    assert hi[1] - lo[1] == pytest.approx(1.0)
    assert K.chord_lengths([[2.0, 2.0]], [[1.0, 0.0]])[0] == 0.0

"""Geometry, masks, and action atoms."""
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ifg_explorer.scene_model import (
    EVERYTHING,
    NOTHING,
    ActionAtom,
    ActionKind,
    Box,
    Collider,
    GameObjectDef,
    InteractableSpec,
    SocketSpec,
    Sphere,
    Vec3,
    intersects,
    layers_overlap,
)

finite = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)
positive = st.floats(min_value=0.01, max_value=5.0, allow_nan=False)
vecs = st.builds(Vec3, finite, finite, finite)
shapes = st.one_of(
    st.builds(Sphere, positive),
    st.builds(Box, st.builds(Vec3, positive, positive, positive)),
)


def test_vec3_arithmetic():
    a = Vec3(1.0, 2.0, 3.0)
    b = Vec3(-1.0, 0.5, 2.0)
    assert a + b == Vec3(0.0, 2.5, 5.0)
    assert a - b == Vec3(2.0, 1.5, 1.0)
    assert a.scaled(2.0) == Vec3(2.0, 4.0, 6.0)
    assert Vec3(3.0, 0.0, 4.0).length() == 5.0
    assert a.distance_to(a) == 0.0


def test_vec3_normalized_zero_raises():
    with pytest.raises(ValueError):
        Vec3(0.0, 0.0, 0.0).normalized()


def test_sphere_sphere_touching_counts_as_hit():
    a, b = Sphere(0.5), Sphere(0.5)
    assert intersects(a, Vec3(0, 0, 0), b, Vec3(1.0, 0, 0))
    assert not intersects(a, Vec3(0, 0, 0), b, Vec3(1.0 + 1e-9, 0, 0))


def test_box_box_axis_separation():
    a = Box(Vec3(0.5, 0.5, 0.5))
    b = Box(Vec3(0.25, 0.25, 0.25))
    assert intersects(a, Vec3(0, 0, 0), b, Vec3(0.75, 0, 0))  # touching faces
    assert not intersects(a, Vec3(0, 0, 0), b, Vec3(0.76, 0, 0))
    assert intersects(a, Vec3(0, 0, 0), b, Vec3(0.7, 0.7, 0.7))


def test_sphere_box_corner_cases():
    box = Box(Vec3(1.0, 1.0, 1.0))
    s = Sphere(0.5)
    # sphere just off the +x face
    assert intersects(s, Vec3(1.49, 0, 0), box, Vec3(0, 0, 0))
    assert not intersects(s, Vec3(1.51, 0, 0), box, Vec3(0, 0, 0))
    # diagonal from the corner (1,1,1): closest point is the corner itself
    d = 0.5 / math.sqrt(3.0)
    near = Vec3(1 + d * 0.99, 1 + d * 0.99, 1 + d * 0.99)
    far = Vec3(1 + d * 1.01, 1 + d * 1.01, 1 + d * 1.01)
    assert intersects(s, near, box, Vec3(0, 0, 0))
    assert not intersects(s, far, box, Vec3(0, 0, 0))
    # sphere center inside the box
    assert intersects(s, Vec3(0.2, -0.3, 0.9), box, Vec3(0, 0, 0))


def _grid_min_distance(center, box, box_center, n=24):
    """Sampled distance from a point to a box volume (independent of clamping)."""
    h = box.half_extents
    best = math.inf
    for i in range(n + 1):
        for j in range(n + 1):
            for k in range(n + 1):
                p = Vec3(
                    box_center.x - h.x + 2 * h.x * i / n,
                    box_center.y - h.y + 2 * h.y * j / n,
                    box_center.z - h.z + 2 * h.z * k / n,
                )
                best = min(best, center.distance_to(p))
    return best


@settings(max_examples=40, deadline=None)
@given(
    center=st.builds(Vec3, st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3)),
    radius=st.floats(0.05, 1.5),
    half=st.builds(Vec3, st.floats(0.1, 1.2), st.floats(0.1, 1.2), st.floats(0.1, 1.2)),
)
def test_sphere_box_matches_sampled_oracle(center, radius, half):
    box = Box(half)
    sampled = _grid_min_distance(center, box, Vec3(0, 0, 0))
    margin = 0.2  # grid resolution slack; skip the ambiguous band
    if sampled <= radius - margin:
        assert intersects(Sphere(radius), center, box, Vec3(0, 0, 0))
    elif sampled >= radius + margin:
        assert not intersects(Sphere(radius), center, box, Vec3(0, 0, 0))


@settings(max_examples=100, deadline=None)
@given(sa=shapes, ca=vecs, sb=shapes, cb=vecs)
def test_intersects_symmetric(sa, ca, sb, cb):
    assert intersects(sa, ca, sb, cb) == intersects(sb, cb, sa, ca)


@settings(max_examples=100, deadline=None)
@given(r=positive, grow=st.floats(0.0, 3.0), ca=vecs, sb=shapes, cb=vecs)
def test_growing_a_sphere_never_loses_contact(r, grow, ca, sb, cb):
    if intersects(Sphere(r), ca, sb, cb):
        assert intersects(Sphere(r + grow), ca, sb, cb)


@settings(max_examples=100, deadline=None)
@given(sa=shapes, ca=vecs, sb=shapes, cb=vecs, shift=vecs)
def test_intersects_translation_invariant(sa, ca, sb, cb, shift):
    assert intersects(sa, ca, sb, cb) == intersects(sa, ca + shift, sb, cb + shift)


def test_layer_mask_basics():
    assert layers_overlap(0b0110, 0b0100)
    assert not layers_overlap(0b0110, 0b1001)
    assert not layers_overlap(EVERYTHING, NOTHING)
    assert layers_overlap(EVERYTHING, 1 << 31)


@given(a=st.integers(0, EVERYTHING), b=st.integers(0, EVERYTHING))
def test_layer_overlap_commutes_and_nothing_annihilates(a, b):
    assert layers_overlap(a, b) == layers_overlap(b, a)
    assert not layers_overlap(a, NOTHING)
    if a != NOTHING:
        assert layers_overlap(a, EVERYTHING)


def test_move_atom_normalizes_direction():
    atom = ActionAtom.move(Vec3(0.0, 0.0, 2.0), 0.5)
    assert atom.kind is ActionKind.MOVE
    assert abs(atom.direction.length() - 1.0) < 1e-12
    assert atom.direction.z == 1.0


def test_move_atom_rejects_bad_args():
    with pytest.raises(ValueError):
        ActionAtom.move(Vec3(1, 0, 0), 0.0)
    with pytest.raises(ValueError):
        ActionAtom.move(Vec3(0, 0, 0), 1.0)


def test_rotate_atom_sign_collapses():
    assert ActionAtom.rotate(5, 1.0).axis_sign == 1
    assert ActionAtom.rotate(-2, 1.0).axis_sign == -1


def test_shape_validation():
    with pytest.raises(ValueError):
        Sphere(0.0)
    with pytest.raises(ValueError):
        Sphere(-1.0)
    with pytest.raises(ValueError):
        Box(Vec3(1.0, 0.0, 1.0))


def test_activatable_requires_grabbable():
    with pytest.raises(ValueError):
        InteractableSpec(grabbable=False, activatable=True)
    InteractableSpec(grabbable=True, activatable=True)  # fine


def test_socket_spec_validation():
    with pytest.raises(ValueError):
        SocketSpec(Vec3(0, 0, 0), 0.0)
    with pytest.raises(ValueError):
        SocketSpec(Vec3(math.inf, 0, 0), 0.1)


def test_object_bound_radius_and_bottom():
    obj = GameObjectDef(
        id="o",
        name="o",
        position=Vec3(0, 1, 0),
        colliders=(
            Collider(Sphere(0.2), Vec3(0.0, 0.3, 0.0)),
            Collider(Box(Vec3(0.1, 0.2, 0.1)), Vec3(0.0, -0.1, 0.0)),
        ),
    )
    assert obj.bound_radius() == pytest.approx(0.3 + 0.2)  # sphere dominates
    assert obj.bottom_offset() == pytest.approx(-0.3)  # box reaches lowest
    assert not obj.has_interaction()
    assert not obj.is_trigger_only()


def test_trigger_only_detection():
    obj = GameObjectDef(
        id="t", name="t", position=Vec3(0, 0, 0),
        colliders=(Collider(Sphere(0.1), is_trigger=True),),
    )
    assert obj.is_trigger_only()
    assert not GameObjectDef(id="n", name="n", position=Vec3(0, 0, 0)).is_trigger_only()

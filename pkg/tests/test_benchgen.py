"""Benchmark generator: count laws, determinism, bug and smell seeding."""
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ifg_explorer.benchgen import BenchSpec, generate_scene, spec_from_dict, truth_to_json
from ifg_explorer.errors import PackingError
from ifg_explorer.ifg import EVERYTHING, build_ifg
from ifg_explorer.scene_model import NOTHING
from ifg_explorer.scene_parser import scene_to_json


def spec(**kw):
    base = dict(fire=2, manipulate=8, socket=2, custom=1, seed=42, area=10.0)
    base.update(kw)
    return BenchSpec(**base)


def test_spec_validation():
    with pytest.raises(ValueError):
        spec(manipulate=3)  # fewer than fire + socket
    with pytest.raises(ValueError):
        spec(fire=-1)
    with pytest.raises(ValueError):
        spec(area=1.0)
    with pytest.raises(ValueError):
        spec(is_trigger_bugs=(99,))
    with pytest.raises(ValueError):
        spec(is_trigger_bugs=(0, 0))
    with pytest.raises(ValueError):
        spec(is_trigger_bugs=(0,), nothing_mask_bugs=(0,))  # same victim twice
    with pytest.raises(ValueError):
        spec(everything_sockets=(5,))
    with pytest.raises(ValueError):
        spec(locking_fraction=1.5)


def test_spec_from_dict_round_trip_and_unknown_keys():
    doc = {
        "sceneId": "x",
        "fire": 1,
        "manipulate": 4,
        "socket": 1,
        "custom": 0,
        "seed": 3,
        "area": 8.0,
        "isTriggerBugs": [1],
        "nothingMaskBugs": [0],
        "everythingSockets": [0],
        "lockingFraction": 1.0,
    }
    s = spec_from_dict(doc)
    assert s.scene_id == "x" and s.is_trigger_bugs == (1,) and s.locking_fraction == 1.0
    with pytest.raises(ValueError):
        spec_from_dict({**doc, "surprise": 1})


def test_object_roster_matches_spec_arithmetic():
    scene, truth = generate_scene(spec())
    ids = [o.id for o in scene.objects]
    # manipulate counts total manipulate flows: fire and broker objects
    # contribute theirs, leaving manipulate - fire - socket plain movables
    assert ids == [
        "fire0", "fire1",
        "manip0", "manip1", "manip2", "manip3", "manip4",
        "broker0", "socket0", "broker1", "socket1",
        "custom0",
    ]
    assert truth["counts"] == {"Fire": 2, "Manipulate": 8, "Socket": 2, "Custom": 1}


def test_truth_flows_agree_with_the_graph_builder():
    scene, truth = generate_scene(spec())
    graph = build_ifg(scene)
    by_cat = {cat: [] for cat in ("Fire", "Manipulate", "Socket")}
    for flow in graph.flows():
        by_cat[flow.category.value].append(flow.flow_id)
    for cat, ids in by_cat.items():
        assert sorted(ids) == truth["flows"][cat], cat


def test_generation_is_deterministic():
    a_scene, a_truth = generate_scene(spec())
    b_scene, b_truth = generate_scene(spec())
    assert scene_to_json(a_scene) == scene_to_json(b_scene)
    assert truth_to_json(a_truth) == truth_to_json(b_truth)
    c_scene, _ = generate_scene(spec(seed=43))
    assert scene_to_json(c_scene) != scene_to_json(a_scene)


def test_bug_seeding_targets_plain_movables():
    scene, truth = generate_scene(spec(is_trigger_bugs=(0,), nothing_mask_bugs=(2,)))
    objs = scene.objects_by_id()
    assert all(c.is_trigger for c in objs["manip0"].colliders)
    assert objs["manip2"].interactable.interaction_layers == NOTHING
    assert truth["buggedObjects"] == [
        {"id": "manip0", "kind": "IsTrigger"},
        {"id": "manip2", "kind": "NothingMask"},
    ]
    assert truth["unresponsive"] == ["User->manip0#0", "User->manip2#0"]
    # bugged or not, the flows still appear in the graph and the totals
    assert truth["counts"]["Manipulate"] == 8


def test_everything_socket_draws_every_grabbable():
    scene, truth = generate_scene(spec(everything_sockets=(0,)))
    objs = scene.objects_by_id()
    assert objs["socket0"].socket.interaction_layers == EVERYTHING
    assert truth["smellSockets"] == ["socket0"]
    graph = build_ifg(scene)
    into_socket0 = [e for e in graph.edges if e.target == "socket0"]
    grabbables = [
        o for o in scene.objects
        if o.interactable is not None and o.interactable.grabbable and o.id != "socket0"
    ]
    assert len(into_socket0) == len(grabbables)
    # the truth's socket flow list absorbs the extra pairs too
    assert sorted(e.label[0].interaction_id for e in into_socket0
                  if e.source != "User") == [
        f for f in truth["flows"]["Socket"] if f.endswith("->socket0#0")
    ]


def test_locking_fraction_marks_leading_sockets():
    scene, truth = generate_scene(spec(locking_fraction=0.5))
    objs = scene.objects_by_id()
    assert objs["socket0"].socket.locking
    assert not objs["socket1"].socket.locking
    assert truth["lockingSockets"] == ["socket0"]


def test_minimum_separation_and_height_band():
    scene, _ = generate_scene(spec(seed=7))
    radii = {o.id: o.bound_radius() for o in scene.objects}
    objs = list(scene.objects)
    for i, a in enumerate(objs):
        assert 0.5 - radii[a.id] <= a.position.y <= 1.5 + radii[a.id]
        for b in objs[i + 1:]:
            gap = a.position.distance_to(b.position) - radii[a.id] - radii[b.id]
            assert gap >= 0.1, (a.id, b.id, gap)  # stated minimum clearance
    for s in scene.spawn_points:
        for o in objs:
            assert o.position.distance_to(s) >= 0.5  # never inside the avatar


def test_packing_failure_is_explicit():
    with pytest.raises(PackingError):
        generate_scene(spec(fire=6, manipulate=40, socket=6, custom=10, area=2.0))


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_generated_scenes_parse_back_identically(seed):
    scene, _ = generate_scene(spec(seed=seed))
    from ifg_explorer.scene_parser import parse_scene

    text = scene_to_json(scene)
    result = parse_scene(text)
    assert result.ok and result.diagnostics == []
    assert scene_to_json(result.scene) == text
    assert result.scene == scene

"""Deterministic kinematic world: motion, grabs, triggers, sockets, events."""
import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ifg_explorer.errors import SpawnIndexError
from ifg_explorer.scene_model import (
    GRAB_PRESS,
    GRAB_RELEASE,
    NOTHING,
    TRIGGER_PRESS,
    TRIGGER_RELEASE,
    ActionAtom,
    Vec3,
)
from ifg_explorer.sim import (
    CONTROLLER_OFFSET,
    EventKind,
    Locomotion,
    SimConfig,
    SimEvent,
    event_to_dict,
    spawn,
)

from conftest import grabbable, make_scene, socket_holder, sphere

HOME = Vec3(0.3, 1.0, 0.3)  # controller rest pose over spawn (0,0,0)


def world_with(objects, **kw):
    return spawn(make_scene(objects), 0, **kw)


def kinds(events):
    return [e.kind for e in events]


# -- config ------------------------------------------------------------------

def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(dt=0.0)
    with pytest.raises(ValueError):
        SimConfig(budget_seconds=-1.0)
    with pytest.raises(ValueError):
        SimConfig(dt=0.02, budget_seconds=0.03)  # not an even step count
    cfg = SimConfig(budget_seconds=1.0)
    assert cfg.budget_steps == 50
    assert cfg.steps_per_second == 50


def test_spawn_index_out_of_bounds():
    scene = make_scene([grabbable("cube", (1, 1, 0))])
    with pytest.raises(SpawnIndexError):
        spawn(scene, 3)


def test_spawn_places_avatar_and_controller():
    w = world_with([grabbable("cube", (1, 1, 0))])
    assert w.avatar_pos == Vec3(0, 0, 0)
    assert w.controller_pos == HOME
    assert w.sim_time == 0.0


# -- motion ------------------------------------------------------------------

def test_walk_is_clamped_to_avatar_speed():
    w = world_with([grabbable("cube", (5, 1, 0))])
    w.step(Locomotion(Vec3(10.0, 0.0, 0.0)))  # asks for far more than one tick allows
    assert w.avatar_pos.x == pytest.approx(0.04)  # 2.0 m/s * 0.02 s
    assert w.controller_pos.x == pytest.approx(HOME.x + 0.04)
    w.step(Locomotion(Vec3(0.01, 0.0, 0.0)))  # under the cap passes through
    assert w.avatar_pos.x == pytest.approx(0.05)


def test_walk_ignores_vertical_component():
    w = world_with([grabbable("cube", (5, 1, 0))])
    w.step(Locomotion(Vec3(0.0, 5.0, 0.0)))
    assert w.avatar_pos == Vec3(0, 0, 0)


def test_controller_cannot_leave_reach():
    w = world_with([grabbable("cube", (5, 1, 0))])
    push = ActionAtom.move(Vec3(1.0, 0.0, 0.0), 0.02)
    for _ in range(200):  # 4 m requested, reach is 1 m
        w.step(push)
    assert w.controller_pos.distance_to(w.controller_home) <= 1.0 + 1e-9
    assert w.controller_pos.x == pytest.approx(HOME.x + 1.0)


def test_walking_drags_an_out_of_reach_controller():
    w = world_with([grabbable("cube", (5, 1, 0))])
    for _ in range(100):
        w.step(ActionAtom.move(Vec3(0.0, 0.0, 1.0), 0.02))
    w.step(Locomotion(Vec3(0.04, 0.0, 0.0)))
    # home moved with the avatar; the controller is re-clamped next push
    w.step(ActionAtom.move(Vec3(0.0, 0.0, 1.0), 0.02))
    assert w.controller_pos.distance_to(w.controller_home) <= 1.0 + 1e-9


def test_teleport_resets_pose():
    scene = make_scene([grabbable("cube", (5, 1, 0))], spawns=((0, 0, 0), (3, 0, 3)))
    w = spawn(scene, 0)
    w.step(Locomotion(Vec3(0.04, 0, 0)))
    w.step(ActionAtom.teleport(1))
    assert w.avatar_pos == Vec3(3, 0, 3)
    assert w.controller_pos == Vec3(3, 0, 3) + CONTROLLER_OFFSET
    assert not w.events  # a valid teleport is silent


def test_invalid_teleport_raises_runtime_event():
    w = world_with([grabbable("cube", (5, 1, 0))])
    events = w.step(ActionAtom.teleport(7))
    assert kinds(events) == [EventKind.RUNTIME_ERROR]


def test_unknown_input_raises_runtime_event():
    w = world_with([grabbable("cube", (5, 1, 0))])
    events = w.step("mash the keyboard")
    assert kinds(events) == [EventKind.RUNTIME_ERROR]


def test_sim_time_is_stable_arithmetic():
    w = world_with([grabbable("cube", (5, 1, 0))])
    for _ in range(3):
        w.step(None)
    assert w.sim_time == 0.06  # no float drift in reported times


# -- hover -------------------------------------------------------------------

def test_hover_enter_and_exit():
    w = world_with([grabbable("cube", (HOME.x, HOME.y, HOME.z + 0.5))])
    approach = ActionAtom.move(Vec3(0, 0, 1.0), 0.02)
    seen = []
    for _ in range(30):
        seen += w.step(approach)
    assert kinds(seen) == [EventKind.HOVER_ENTER]
    retreat = ActionAtom.move(Vec3(0, 0, -1.0), 0.02)
    seen = []
    for _ in range(30):
        seen += w.step(retreat)
    assert kinds(seen) == [EventKind.HOVER_EXIT]


# -- grab --------------------------------------------------------------------

def test_grab_and_release_cycle():
    w = world_with([grabbable("cube", (HOME.x, HOME.y, HOME.z))])
    events = w.step(GRAB_PRESS)
    assert EventKind.SELECT_ENTER in kinds(events)
    assert w.held_object_id == "cube"
    # held object follows the controller
    w.step(ActionAtom.move(Vec3(1, 0, 0), 0.02))
    assert w.poses["cube"] == w.controller_pos
    events = w.step(GRAB_RELEASE)
    assert EventKind.SELECT_EXIT in kinds(events)
    assert w.held_object_id is None


def test_nearest_touching_object_wins_the_grab():
    w = world_with(
        [
            grabbable("far", (HOME.x, HOME.y, HOME.z + 0.12)),
            grabbable("near", (HOME.x, HOME.y, HOME.z + 0.05)),
        ]
    )
    w.step(None)
    w.step(GRAB_PRESS)
    assert w.held_object_id == "near"


def test_grab_press_away_from_everything_is_silent():
    w = world_with([grabbable("cube", (5, 1, 0))])
    events = w.step(GRAB_PRESS)
    assert events == []


def test_repeated_grab_press_is_ignored_while_down():
    w = world_with([grabbable("cube", (HOME.x, HOME.y, HOME.z))])
    w.step(GRAB_PRESS)
    events = w.step(GRAB_PRESS)
    assert EventKind.SELECT_ENTER not in kinds(events)


def test_trigger_only_collider_defeats_grab():
    cube = grabbable(
        "ghost", (HOME.x, HOME.y, HOME.z), collider=sphere(trigger=True)
    )
    w = world_with([cube])
    events = w.step(GRAB_PRESS)
    contact = [e for e in events if e.kind is EventKind.CONTACT_WHILE_ACTING]
    assert len(contact) == 1
    assert contact[0].subject == "ghost" and contact[0].action == "grab"
    assert w.held_object_id is None


def test_nothing_mask_defeats_grab():
    cube = grabbable("mute", (HOME.x, HOME.y, HOME.z), layers=NOTHING)
    w = world_with([cube])
    events = w.step(GRAB_PRESS)
    assert [e.subject for e in events if e.kind is EventKind.CONTACT_WHILE_ACTING] == ["mute"]
    assert w.held_object_id is None


def test_drop_below_floor_rests_on_ground():
    w = world_with([grabbable("cube", (HOME.x, HOME.y, HOME.z))])
    w.step(GRAB_PRESS)
    dive = ActionAtom.move(Vec3(0, -1.0, 0), 0.02)
    for _ in range(60):  # carry the cube under the floor plane
        w.step(dive)
    w.step(GRAB_RELEASE)
    assert w.poses["cube"].y == pytest.approx(0.1)  # sphere radius above ground
    # a release at chest height keeps its height: kinematic world, no gravity
    w2 = world_with([grabbable("cube", (HOME.x, HOME.y, HOME.z))])
    w2.step(GRAB_PRESS)
    w2.step(GRAB_RELEASE)
    assert w2.poses["cube"].y == pytest.approx(HOME.y)


# -- trigger -----------------------------------------------------------------

def test_fire_requires_holding_an_activatable():
    gun = grabbable("gun", (HOME.x, HOME.y, HOME.z), activatable=True)
    w = world_with([gun])
    w.step(GRAB_PRESS)
    events = w.step(TRIGGER_PRESS)
    assert kinds(events) == [EventKind.ACTIVATED]
    # repeat fire needs a release first
    assert w.step(TRIGGER_PRESS) == []
    w.step(TRIGGER_RELEASE)
    assert kinds(w.step(TRIGGER_PRESS)) == [EventKind.ACTIVATED]


def test_trigger_on_held_plain_object_complains():
    w = world_with([grabbable("cube", (HOME.x, HOME.y, HOME.z))])
    w.step(GRAB_PRESS)
    events = w.step(TRIGGER_PRESS)
    assert [(e.kind, e.subject, e.action) for e in events] == [
        (EventKind.CONTACT_WHILE_ACTING, "cube", "trigger")
    ]


def test_trigger_while_touching_unheld_object_complains():
    gun = grabbable("gun", (HOME.x, HOME.y, HOME.z), activatable=True)
    w = world_with([gun])
    w.step(None)
    events = w.step(TRIGGER_PRESS)
    assert [(e.kind, e.subject) for e in events] == [
        (EventKind.CONTACT_WHILE_ACTING, "gun")
    ]


def test_trigger_in_empty_air_is_silent():
    w = world_with([grabbable("cube", (5, 1, 0))])
    assert w.step(TRIGGER_PRESS) == []


# -- sockets -----------------------------------------------------------------

def socket_scene(locking=False, socket_layers=None, key_layers=None):
    from ifg_explorer.scene_model import EVERYTHING

    return make_scene(
        [
            grabbable("key", (HOME.x, HOME.y, HOME.z),
                      layers=EVERYTHING if key_layers is None else key_layers),
            socket_holder("slot", (HOME.x, HOME.y - 0.36, HOME.z),
                          layers=EVERYTHING if socket_layers is None else socket_layers,
                          locking=locking),
        ]
    )


def test_release_in_zone_snaps_to_attach_point():
    w = spawn(socket_scene(), 0)
    w.step(GRAB_PRESS)
    # attach point sits 0.16 above the slot center = 0.2 below the key
    for _ in range(12):
        w.step(ActionAtom.move(Vec3(0, -1.0, 0), 0.02))
    events = w.step(GRAB_RELEASE)
    snapped = [e for e in events if e.kind is EventKind.SOCKET_SNAPPED]
    assert [(e.subject, e.socket) for e in snapped] == [("key", "slot")]
    assert w.poses["key"] == w.attach_point_world("slot")
    assert w.occupancy["slot"] == "key"


def test_release_outside_zone_does_not_snap():
    w = spawn(socket_scene(), 0)
    w.step(GRAB_PRESS)
    events = w.step(GRAB_RELEASE)  # still ~0.2 m above, zone is 0.15
    assert EventKind.SOCKET_SNAPPED not in kinds(events)
    assert w.occupancy["slot"] is None


def test_layer_mismatch_blocks_the_snap():
    w = spawn(socket_scene(socket_layers=0b100, key_layers=0b010), 0)
    w.step(GRAB_PRESS)
    for _ in range(12):
        w.step(ActionAtom.move(Vec3(0, -1.0, 0), 0.02))
    events = w.step(GRAB_RELEASE)
    assert EventKind.SOCKET_SNAPPED not in kinds(events)


def test_occupied_socket_rejects_second_guest():
    objs = list(socket_scene().objects)
    objs.append(grabbable("spare", (HOME.x + 0.4, HOME.y, HOME.z)))
    w = spawn(make_scene(objs), 0)
    w.step(GRAB_PRESS)
    for _ in range(12):
        w.step(ActionAtom.move(Vec3(0, -1.0, 0), 0.02))
    w.step(GRAB_RELEASE)
    assert w.occupancy["slot"] == "key"
    # bring the spare to the same spot and drop it
    spare_pos = Vec3(HOME.x + 0.4, HOME.y, HOME.z)
    for _ in range(60):
        delta = spare_pos - w.controller_pos
        if delta.length() < 1e-6:
            break
        w.step(ActionAtom.move(delta, 0.02))
    w.step(GRAB_PRESS)
    assert w.held_object_id == "spare"
    target = w.attach_point_world("slot")
    for _ in range(60):
        delta = target - w.controller_pos
        if delta.length() < 1e-6:
            break
        w.step(ActionAtom.move(delta, 0.02))
    events = w.step(GRAB_RELEASE)
    assert EventKind.SOCKET_SNAPPED not in kinds(events)
    assert w.occupancy["slot"] == "key"


def test_grabbing_the_occupant_vacates_a_normal_socket():
    w = spawn(socket_scene(), 0)
    w.step(GRAB_PRESS)
    for _ in range(12):
        w.step(ActionAtom.move(Vec3(0, -1.0, 0), 0.02))
    w.step(GRAB_RELEASE)
    # reach down to the snapped key and pull it back out
    target = w.attach_point_world("slot")
    for _ in range(60):
        delta = target - w.controller_pos
        if delta.length() < 1e-6:
            break
        w.step(ActionAtom.move(delta, 0.02))
    events = w.step(GRAB_PRESS)
    assert EventKind.SELECT_ENTER in kinds(events)
    assert w.held_object_id == "key"
    assert w.occupancy["slot"] is None


def test_locking_socket_keeps_its_occupant():
    w = spawn(socket_scene(locking=True), 0)
    w.step(GRAB_PRESS)
    for _ in range(12):
        w.step(ActionAtom.move(Vec3(0, -1.0, 0), 0.02))
    w.step(GRAB_RELEASE)
    assert w.occupancy["slot"] == "key"
    target = w.attach_point_world("slot")
    for _ in range(60):
        delta = target - w.controller_pos
        if delta.length() < 1e-6:
            break
        w.step(ActionAtom.move(delta, 0.02))
    events = w.step(GRAB_PRESS)
    assert w.held_object_id is None
    assert w.occupancy["slot"] == "key"
    contact = [e for e in events if e.kind is EventKind.CONTACT_WHILE_ACTING]
    assert [e.subject for e in contact] == ["key"]


# -- events ------------------------------------------------------------------

def test_event_dict_shape_and_key_order():
    ev = SimEvent(1.5, EventKind.CONTACT_WHILE_ACTING, subject="cube", action="grab")
    assert list(event_to_dict(ev).items()) == [
        ("t", 1.5),
        ("kind", "ContactWhileActing"),
        ("subject", "cube"),
        ("action", "grab"),
    ]
    snap = SimEvent(2.0, EventKind.SOCKET_SNAPPED, subject="key", socket="slot")
    assert event_to_dict(snap) == {
        "t": 2.0,
        "kind": "SocketSnapped",
        "subject": "key",
        "socket": "slot",
    }


# -- determinism -------------------------------------------------------------

@settings(max_examples=20, deadline=None)
@given(
    seed=st.integers(0, 2**16),
    script=st.lists(st.integers(0, 5), min_size=1, max_size=120),
)
def test_identical_scripts_produce_identical_worlds(seed, script):
    def drive(world):
        moves = {
            0: None,
            1: Locomotion(Vec3(0.04, 0, 0)),
            2: ActionAtom.move(Vec3(0, 0, 1.0), 0.02),
            3: GRAB_PRESS,
            4: GRAB_RELEASE,
            5: TRIGGER_PRESS,
        }
        for code in script:
            world.step(moves[code])
        return world.state_signature(), world.events

    scene = socket_scene()
    sig_a, ev_a = drive(spawn(scene, 0, seed=seed))
    sig_b, ev_b = drive(spawn(scene, 0, seed=seed))
    assert sig_a == sig_b
    assert ev_a == ev_b

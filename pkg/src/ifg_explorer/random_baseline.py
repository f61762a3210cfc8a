"""Monkey-style random baseline strategy.

Draws one atomic decision per action interval: walk a random direction,
push the controller a random direction, or press grab/trigger with a
random hold duration.  Releases are scheduled asynchronously, so a trigger
press can land while a grab is still held — composite interactions are
possible by chance, never by plan.  The graph argument is used solely for
coverage accounting; planning never reads it.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from typing import Optional

from .ifg import InteractionFlowGraph, build_ifg
from .scene_model import (
    GRAB_PRESS,
    GRAB_RELEASE,
    TRIGGER_PRESS,
    TRIGGER_RELEASE,
    ActionAtom,
    Vec3,
)
from .session import Session
from .sim import Locomotion, SimConfig


@dataclass(frozen=True)
class RandomParams:
    action_interval: float = 0.1
    hold_min: float = 0.1
    hold_max: float = 0.5
    reset_probability: float = 0.02
    seed: int = 0

    def __post_init__(self) -> None:
        if self.action_interval <= 0:
            raise ValueError("action_interval must be positive")
        if not 0 < self.hold_min < self.hold_max:
            raise ValueError("hold range must satisfy 0 < min < max")
        if not 0 <= self.reset_probability < 1:
            raise ValueError("reset_probability must be in [0, 1)")


def drive_random_session(
    scene,
    graph: InteractionFlowGraph,
    config: Optional[SimConfig] = None,
    params: Optional[RandomParams] = None,
) -> Session:
    """Run the random input loop to budget exhaustion; returns the session."""
    params = params or RandomParams()
    rng = random.Random(params.seed)
    spawn_index = rng.randrange(len(scene.spawn_points))
    session = Session(scene, graph, config, params.seed, spawn_index)
    world = session.world
    cfg = session.config
    interval_steps = max(1, round(params.action_interval / cfg.dt))
    walk_step = cfg.avatar_speed * cfg.dt

    motion = None
    grab_release_at = None
    trigger_release_at = None
    decision_due = False

    while not session.exhausted:
        n = world.step_count + 1
        if (n - 1) % interval_steps == 0:
            decision_due = True
        inp = None
        if grab_release_at is not None and n >= grab_release_at:
            inp = GRAB_RELEASE
            grab_release_at = None
        elif trigger_release_at is not None and n >= trigger_release_at:
            inp = TRIGGER_RELEASE
            trigger_release_at = None
        elif decision_due:
            decision_due = False
            if rng.random() < params.reset_probability:
                inp = ActionAtom.teleport(rng.randrange(len(scene.spawn_points)))
                motion = None
            else:
                choice = rng.randrange(4)
                if choice == 0:
                    angle = rng.uniform(0.0, 2.0 * math.pi)
                    motion = Locomotion(
                        Vec3(math.cos(angle) * walk_step, 0.0, math.sin(angle) * walk_step)
                    )
                    inp = motion
                elif choice == 1:
                    y = rng.uniform(-1.0, 1.0)
                    angle = rng.uniform(0.0, 2.0 * math.pi)
                    r = math.sqrt(max(0.0, 1.0 - y * y))
                    direction = Vec3(r * math.cos(angle), y, r * math.sin(angle))
                    motion = ActionAtom.move(direction, cfg.dt)
                    inp = motion
                elif choice == 2:
                    hold = rng.uniform(params.hold_min, params.hold_max)
                    inp = GRAB_PRESS
                    grab_release_at = n + max(1, round(hold / cfg.dt))
                    motion = None
                else:
                    hold = rng.uniform(params.hold_min, params.hold_max)
                    inp = TRIGGER_PRESS
                    trigger_release_at = n + max(1, round(hold / cfg.dt))
                    motion = None
        elif motion is not None:
            inp = motion
        session.tick(inp)

    session.finish()
    return session


def run_random_session(
    scene,
    graph: Optional[InteractionFlowGraph] = None,
    config: Optional[SimConfig] = None,
    params: Optional[RandomParams] = None,
    smell_threshold: Optional[int] = None,
):
    """Run one full random session; returns (TestReport, timeline rows)."""
    if graph is None:
        graph = build_ifg(scene)
    started = time.perf_counter()
    session = drive_random_session(scene, graph, config, params)
    kwargs = {} if smell_threshold is None else {"smell_threshold": smell_threshold}
    report = session.build_report(
        "random", wall_clock_seconds=time.perf_counter() - started, **kwargs
    )
    return report, session.rows

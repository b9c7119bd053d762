"""Built-in fixture problems.

Every fixture is a world p-graph in which each physical pose is a pair of
vertices: an observation vertex named after the pose, emitting what can
be perceived there, followed by an action vertex (pose name with a ``'``
suffix) whose edges are the motions available.  Motions absent from an
action vertex are forbidden at that pose (walls, stairs), so a plan can
only command an action common to every pose it considers possible.

track-cyclic
    ``n`` segments ``s1..sn`` on a loop.  Segment ``si`` is seen as the
    angular range ``oi``; the last two segments share the extra range
    ``o`` where the track kinks, so each of them may emit either its own
    range or ``o``.  Actions ``forward`` and ``backward`` move one segment
    around the loop.  The neighbor relation is circular in the angular
    order ``o1 .. o(n-1), o, on`` and back to ``o1``.  With six segments
    the initial belief is ``{s1, s3}`` and the goal ``{s5}``.  The reduced four-segment variant starts in ``{s1, s2}``
    with goal ``{s3}`` (the first kinked segment, as in the full track).

grid-office
    Reconstruction of a corridor with offices and stairs.  Assumptions:

    * Poses are a cell plus heading.  Corridor cells 1..6 face east
      (``1E``..``6E``); the robot may turn left/right only at cell 5 and at
      the corner cell 6, giving ``5N``, ``5S``, ``6N``, ``6S``; the
      charging station is cell 7 north of 6, reached as ``7N``.
    * ``f1``/``f2`` move one/two cells forward.  Moving into a wall, an
      office or the stairs is not an available action, so ``6E`` has no
      forward motion, ``5N`` faces an office door, ``5S`` and ``6S`` face
      the stairs.  ``f2`` from ``5E`` would hit the east wall and is absent.
    * A left turn undoes a right turn and vice versa; ``5N``/``6N`` turn
      right back to east, ``5S``/``6S`` turn left back to east.
    * Each pose emits its own observation ``y<pose>``, so the alphabet has
      11 symbols and the world 22 vertices.
    * The robot starts at ``1E`` or ``2E``; the goal is ``7N``.

corridor
    Six cells in a row; the robot starts in cell 1, 2 or 3 and must reach
    the charger in cell 6.  A camera-like alphabet colors cell 1 red,
    cell 2 gray and the rest white.  ``forward`` moves one cell; at cell 6
    it bumps the wall harmlessly and stays put, which is what lets the
    vacuous sensor succeed.
"""

from __future__ import annotations

from ..errors import InputError
from ..pgraph import ACTION, OBSERVATION, PGraph, PlanningProblem
from ..properties import ConstraintSpec, NeighborRelation

SCENARIOS = ("track-cyclic", "grid-office", "corridor")


class _Builder:
    def __init__(self):
        self.kinds = {}
        self.edges = []
        self.actions = set()
        self.observations = set()

    def pose(self, name, emits):
        self.kinds[name] = OBSERVATION
        self.kinds[name + "'"] = ACTION
        self.edges.append((name, name + "'", frozenset(emits)))
        self.observations.update(emits)

    def move(self, src, action, dst):
        self.edges.append((src + "'", dst, frozenset([action])))
        self.actions.add(action)

    def problem(self, initial, goal):
        g = PGraph(self.kinds, self.edges, initial, self.actions, self.observations)
        return PlanningProblem(g, goal)


def track_observations(segments: int = 6):
    """Observation symbols of the track in angular (neighbor) order."""
    return [f"o{i}" for i in range(1, segments)] + ["o", f"o{segments}"]


def track_cyclic(segments: int = 6, initial=None, goal=None):
    if segments < 4:
        raise InputError("the track needs at least four segments")
    b = _Builder()
    for i in range(1, segments + 1):
        emits = {f"o{i}"}
        if i >= segments - 1:
            emits.add("o")
        b.pose(f"s{i}", emits)
    for i in range(1, segments + 1):
        b.move(f"s{i}", "forward", f"s{i % segments + 1}")
        b.move(f"s{i}", "backward", f"s{(i - 2) % segments + 1}")
    if initial is None:
        initial = ["s1", "s3"] if segments >= 6 else ["s1", "s2"]
    if goal is None:
        goal = [f"s{segments - 1}"]
    problem = b.problem(initial, goal)
    nb = NeighborRelation.circular(track_observations(segments))
    return problem, ConstraintSpec(contiguous=True, neighbor=nb)


GRID_POSES = ("1E", "2E", "3E", "4E", "5E", "6E", "5N", "5S", "6N", "6S", "7N")


def grid_office():
    b = _Builder()
    for p in GRID_POSES:
        b.pose(p, {f"y{p}"})
    for i in range(1, 6):
        b.move(f"{i}E", "f1", f"{i + 1}E")
    for i in range(1, 5):
        b.move(f"{i}E", "f2", f"{i + 2}E")
    for c in ("5", "6"):
        b.move(f"{c}E", "l", f"{c}N")
        b.move(f"{c}E", "r", f"{c}S")
        b.move(f"{c}N", "r", f"{c}E")
        b.move(f"{c}S", "l", f"{c}E")
    b.move("6N", "f1", "7N")
    return b.problem(["1E", "2E"], ["7N"]), ConstraintSpec()


def corridor():
    b = _Builder()
    colors = {1: "red", 2: "gray"}
    for i in range(1, 7):
        b.pose(f"c{i}", {colors.get(i, "white")})
    for i in range(1, 7):
        b.move(f"c{i}", "forward", f"c{min(i + 1, 6)}")
    return b.problem(["c1", "c2", "c3"], ["c6"]), ConstraintSpec()


def builtin_scenario(name: str, **options):
    """Return ``(problem, spec)`` for a fixture name.

    ``track-cyclic`` accepts ``segments`` (default 6).
    """
    if name == "track-cyclic":
        return track_cyclic(**options)
    if options:
        raise InputError(f"scenario {name!r} takes no options")
    if name == "grid-office":
        return grid_office()
    if name == "corridor":
        return corridor()
    raise InputError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")

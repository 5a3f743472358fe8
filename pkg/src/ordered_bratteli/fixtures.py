"""Hand-encoded diagrams from the figures, plus the worked counterexample.

Field-by-field encodings are documented in ``docs/fixtures.md``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .construction import build_counterexample
from .diagram import EventuallyPeriodicPath, Kind, Level, OrderedBratteliDiagram, count_extreme_paths
from .dynamics import NaturalExtension
from .errors import InvalidPath
from .premorphism import OrderedEdgeSet, Premorphism

ROOT = "v0"


@dataclass
class Fixture:
    name: str
    description: str
    diagrams: dict = field(default_factory=dict)
    premorphisms: dict = field(default_factory=dict)
    paths: dict = field(default_factory=dict)
    extensions: dict = field(default_factory=dict)


def level(fibers: dict) -> Level:
    return Level.from_fibers(fibers)


def extreme_path_on(d: OrderedBratteliDiagram, kind: Kind, vertex: str) -> EventuallyPeriodicPath:
    """The extreme path that sits on ``vertex`` at every cycle level."""
    hits = [w for w in count_extreme_paths(d, kind).witnesses
            if all(w.edge(n)[0] == vertex for n in range(d.p + 1, d.p + 2 * d.c + 1))]
    if len(hits) != 1:
        raise InvalidPath(f"{len(hits)} {kind.value} paths stay on {vertex!r}")
    return hits[0]


def _stationary_layers(B: OrderedBratteliDiagram, C: OrderedBratteliDiagram, fibers: dict, top: int):
    layers = [OrderedEdgeSet([B.root], [C.root], {C.root: (B.root,)})]
    for n in range(1, top + 1):
        layers.append(OrderedEdgeSet(B.vertices(n), C.vertices(n), fibers))
    return layers


def two_odometer() -> Fixture:
    d = OrderedBratteliDiagram((level({"v": [ROOT, ROOT]}),), (level({"v": ["v", "v"]}),))
    return Fixture("two_odometer", "Binary odometer: one vertex per level, two edges.",
                   diagrams={"B": d})


def rank2() -> Fixture:
    B = OrderedBratteliDiagram(
        (level({"a": [ROOT], "b": [ROOT]}),
         level({"a": ["a", "b", "a"], "b": ["b", "a", "b", "a", "b", "a", "b"]})),
        (level({"a": ["a", "b", "a"], "b": ["b", "a", "b", "a", "b"]}),))
    C = OrderedBratteliDiagram(
        (level({"w": [ROOT] * 2}), level({"w": ["w"] * 5})),
        (level({"w": ["w"] * 4}),))
    layers = _stationary_layers(B, C, {"w": ("a", "b")}, 3)
    f = Premorphism(B, C, (0,), 1, tuple(layers[:3]), tuple(layers[3:]))
    # the two max paths wrap onto the opposite min paths
    ext = NaturalExtension({extreme_path_on(B, Kind.MAX, u): extreme_path_on(B, Kind.MIN, v)
                            for u, v in (("a", "b"), ("b", "a"))})
    return Fixture("rank2", "Rank-2 diagram with alternating cross edges and its one-vertex "
                   "cover; the induced map is a conjugacy.", diagrams={"B": B, "C": C},
                   premorphisms={"f": f}, extensions={"B": ext})


def cantor() -> Fixture:
    left = OrderedBratteliDiagram((level({"a": [ROOT], "b": [ROOT]}),),
                                  (level({"a": ["a", "b", "a"], "b": ["b"]}),))
    right = OrderedBratteliDiagram((level({"L": [ROOT], "R": [ROOT, ROOT]}),),
                                   (level({"L": ["L", "L"], "R": ["R", "R"]}),))
    # the drawn premorphism needs fibers of size 2^(n-1) over L, which no
    # periodic presentation holds; the left wing is shrunk to a single path
    target = OrderedBratteliDiagram((level({"L": [ROOT], "R": [ROOT, ROOT]}),),
                                    (level({"L": ["L"], "R": ["R", "R"]}),))
    layers = _stationary_layers(left, target, {"L": ("b",), "R": ("a", "b")}, 2)
    f = Premorphism(left, target, (0,), 1, tuple(layers[:2]), tuple(layers[2:]))
    all_a_max = extreme_path_on(left, Kind.MAX, "a")
    all_b = extreme_path_on(left, Kind.MAX, "b")
    ext_left = NaturalExtension({all_a_max: all_b, all_b: extreme_path_on(left, Kind.MIN, "a")})
    x_L = extreme_path_on(target, Kind.MAX, "L")
    ext_target = NaturalExtension({x_L: x_L, extreme_path_on(target, Kind.MAX, "R"):
                                   extreme_path_on(target, Kind.MIN, "R")})
    return Fixture("cantor", "Left: rank-2 diagram conjugate to the binary odometer. Right: two "
                   "disjoint binary odometers. f maps a periodic variant of the right diagram "
                   "onto the left one without commuting with the extended maps.",
                   diagrams={"left": left, "right": right, "target": target},
                   premorphisms={"f": f},
                   extensions={"left": ext_left, "target": ext_target})


def fig7() -> Fixture:
    B = OrderedBratteliDiagram(
        (level({"1": [ROOT], "2": [ROOT], "3": [ROOT], "4": [ROOT]}),),
        (level({"1": ["1", "4", "2"], "2": ["3", "2", "4", "2"], "3": ["3", "2", "4"],
                "4": ["1", "4", "2", "4"]}),))
    z = extreme_path_on(B, Kind.MIN, "1")
    y = extreme_path_on(B, Kind.MAX, "4")
    ext = NaturalExtension({y: extreme_path_on(B, Kind.MIN, "3"),
                            extreme_path_on(B, Kind.MAX, "2"): z})
    return Fixture("fig7", "Four-vertex diagram; z is not eventually maximal and y not "
                   "eventually minimal.", diagrams={"B": B}, paths={"z": z, "y": y},
                   extensions={"B": ext})


def fig8() -> Fixture:
    B = OrderedBratteliDiagram((level({"a": [ROOT], "b": [ROOT]}),),
                               (level({"a": ["a"], "b": ["b", "a", "b"]}),))
    a = extreme_path_on(B, Kind.MIN, "a")
    ext = NaturalExtension({a: extreme_path_on(B, Kind.MIN, "b"),
                            extreme_path_on(B, Kind.MAX, "b"): a})
    return Fixture("fig8", "Two-vertex diagram; z = y is both maximal and minimal and the "
                   "max paths contain no cylinder.", diagrams={"B": B}, paths={"z": a, "y": a},
                   extensions={"B": ext})


def semidecisive() -> Fixture:
    B = OrderedBratteliDiagram((level({"a": [ROOT], "b": [ROOT], "c": [ROOT]}),),
                               (level({"a": ["a"], "b": ["b", "a", "b"], "c": ["c", "c"]}),))
    a = extreme_path_on(B, Kind.MIN, "a")
    ext = NaturalExtension({a: extreme_path_on(B, Kind.MIN, "b"),
                            extreme_path_on(B, Kind.MAX, "b"): a,
                            extreme_path_on(B, Kind.MAX, "c"): extreme_path_on(B, Kind.MIN, "c")})
    return Fixture("semidecisive", "z eventually maximal, y not eventually minimal.",
                   diagrams={"B": B}, paths={"z": a, "y": extreme_path_on(B, Kind.MAX, "c")},
                   extensions={"B": ext})


def counterexample() -> Fixture:
    B = OrderedBratteliDiagram((level({"a": [ROOT, ROOT], "b": [ROOT, ROOT]}),),
                               (level({"a": ["a", "a"], "b": ["b", "b"]}),))
    z = extreme_path_on(B, Kind.MIN, "a")
    y = extreme_path_on(B, Kind.MAX, "b")
    ext = NaturalExtension({extreme_path_on(B, Kind.MAX, v): extreme_path_on(B, Kind.MIN, v)
                            for v in "ab"})
    res = build_counterexample(B, z, y, ext)
    return Fixture("counterexample", "Two disjoint binary odometers with z the min path of one "
                   "and y the max path of the other, extended by the construction.",
                   diagrams={"B": B, "B_prime": res.b_prime}, premorphisms={"f": res.premorphism},
                   paths={"z": z, "y": y, "x": res.x, "tx": res.tx},
                   extensions={"B": ext, "B_prime": res.lifted_extension(ext)})


FIXTURES = {
    "two_odometer": two_odometer,
    "rank2": rank2,
    "cantor": cantor,
    "fig7": fig7,
    "fig8": fig8,
    "semidecisive": semidecisive,
    "counterexample": counterexample,
}


def load_fixture(name: str) -> Fixture:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None

"""Random diagrams and premorphisms for fuzzing and demonstrations."""
from __future__ import annotations

import random
from typing import Iterator

from .diagram import Kind, Level, OrderedBratteliDiagram, count_extreme_paths, validate_diagram
from .dynamics import NaturalExtension
from .premorphism import OrderedEdgeSet, Premorphism, compose_edge_sets

NAMES = "abcdefgh"


def _random_level(rng: random.Random, prev: list, vertices: list, max_fiber: int) -> Level | None:
    fibers = {v: [rng.choice(prev) for _ in range(rng.randint(1, max_fiber))] for v in vertices}
    missing = set(prev) - {u for srcs in fibers.values() for u in srcs}
    for u in missing:
        v = rng.choice(vertices)
        if len(fibers[v]) < max_fiber:
            fibers[v].insert(rng.randint(0, len(fibers[v])), u)
        else:
            # overwrite a duplicated source so no other vertex loses its last edge
            counts = {}
            for srcs in fibers.values():
                for s in srcs:
                    counts[s] = counts.get(s, 0) + 1
            spots = [i for i, s in enumerate(fibers[v]) if counts[s] > 1]
            if not spots:
                return None
            fibers[v][rng.choice(spots)] = u
    return Level.from_fibers(fibers, vertices)


def random_diagram(rng: random.Random, max_vertices: int = 4, max_fiber: int = 4,
                   max_cycle: int = 3, max_preamble: int = 2, root: str = "v0") -> OrderedBratteliDiagram:
    """A valid eventually periodic diagram with small levels."""
    while True:
        p = rng.randint(1, max_preamble)
        c = rng.randint(1, max_cycle)
        sizes = [rng.randint(1, max_vertices) for _ in range(p + c)]
        sizes[p + c - 1] = sizes[p - 1]
        levels, prev = [], [root]
        for k in sizes:
            verts = list(NAMES[:k])
            lev = _random_level(rng, prev, verts, max_fiber)
            if lev is None:
                break
            levels.append(lev)
            prev = verts
        else:
            # the first cycle level is also entered from the last one
            first_cycle = levels[p]
            if set(prev) <= {u for srcs in first_cycle.fibers.values() for u in srcs}:
                return OrderedBratteliDiagram(tuple(levels[:p]), tuple(levels[p:]))


def random_diagram_where(rng: random.Random, predicate, **kwargs) -> OrderedBratteliDiagram:
    while True:
        d = random_diagram(rng, **kwargs)
        if predicate(d):
            return d


def unique_min(d) -> bool:
    return count_extreme_paths(d, Kind.MIN).count == 1


def several_min(d) -> bool:
    return count_extreme_paths(d, Kind.MIN).count >= 2


def random_extension(rng: random.Random, d: OrderedBratteliDiagram) -> NaturalExtension:
    """Any assignment of max paths to min paths."""
    mins = count_extreme_paths(d, Kind.MIN).witnesses
    return NaturalExtension({x: rng.choice(mins) for x in count_extreme_paths(d, Kind.MAX).witnesses})


def _layers(build, d: OrderedBratteliDiagram):
    pre = tuple(build(n) for n in range(0, d.p + 1))
    cyc = tuple(build(n) for n in range(d.p + 1, d.p + d.c + 1))
    return pre, cyc


def splitting_premorphism(rng: random.Random, B: OrderedBratteliDiagram, max_copies: int = 2) -> Premorphism:
    """Premorphism onto a diagram whose vertices are copies of those of ``B``.

    Each copy of ``v`` receives the fiber of ``v`` with every source replaced
    by some copy of it; the layers send each copy back to its original.
    """
    p, c = B.p, B.c
    top = p + c
    while True:
        copies = {0: {B.root: 1}}
        for n in range(1, top + 1):
            copies[n] = {v: rng.randint(1, max_copies) for v in B.vertices(n)}
        copies[top] = copies[p] if p else {B.root: 1}

        def names(n):
            if n == 0:
                return [B.root]
            return [f"{v}.{i}" for v in B.vertices(n) for i in range(copies[n][v])]

        def pick(n, u):
            return B.root if n == 0 else f"{u}.{rng.randrange(copies[n][u])}"

        levels = []
        for n in range(1, top + 1):
            fibers = {}
            for v in B.vertices(n):
                for i in range(copies[n][v]):
                    fibers[f"{v}.{i}"] = [pick(n - 1, u) for u in B.fiber(n, v)]
            levels.append(Level.from_fibers(fibers, names(n)))
        C = OrderedBratteliDiagram(tuple(levels[:p]), tuple(levels[p:]))
        if not validate_diagram(C).ok:
            continue

        def build(n):
            if n == 0:
                return OrderedEdgeSet([B.root], [C.root], {C.root: (B.root,)})
            return OrderedEdgeSet(B.vertices(n), C.vertices(n),
                                  {w: (w.rsplit(".", 1)[0],) for w in C.vertices(n)})

        pre, cyc = _layers(build, B)
        return Premorphism(B, C, (0,), 1, pre, cyc)


def delayed(f: Premorphism) -> Premorphism:
    """Equivalent premorphism reaching one target level further: ``g_n = f_n + 1``."""
    start = max(f.stable_level, len(f.level_preamble) - 1, 1)
    period = f.period

    def build(n):
        if n == 0:
            return f.layer(0)
        return compose_edge_sets(f.layer(n), f.span(f.level(n), f.level(n) + 1))

    levels = (0,) + tuple(f.level(n) + 1 for n in range(1, start + 1))
    pre = tuple(build(n) for n in range(start + 1))
    cyc = tuple(build(n) for n in range(start + 1, start + 1 + period))
    return Premorphism(f.source, f.target, levels, f.level_step, pre, cyc)


def doubled(d: OrderedBratteliDiagram) -> OrderedBratteliDiagram:
    """Two disjoint copies of ``d`` below one root."""
    def lev(n, L):
        fibers = {}
        for k in (0, 1):
            for v in L.vertices:
                fibers[f"{v}|{k}"] = [s if n == 1 else f"{s}|{k}" for s in L.fibers[v]]
        return Level.from_fibers(fibers, [f"{v}|{k}" for k in (0, 1) for v in L.vertices])

    levels = [lev(n, d.level(n)) for n in range(1, d.p + d.c + 1)]
    return OrderedBratteliDiagram(tuple(levels[:d.p]), tuple(levels[d.p:]))


def swap_premorphism(B: OrderedBratteliDiagram) -> Premorphism:
    """Exchange the two halves of a :func:`doubled` diagram."""
    def other(w):
        v, k = w.rsplit("|", 1)
        return f"{v}|{1 - int(k)}"

    def build(n):
        if n == 0:
            return OrderedEdgeSet([B.root], [B.root], {B.root: (B.root,)})
        return OrderedEdgeSet(B.vertices(n), B.vertices(n), {w: (other(w),) for w in B.vertices(n)})

    pre, cyc = _layers(build, B)
    return Premorphism(B, B, (0,), 1, pre, cyc)


def materialized(f: Premorphism, extra: int = 0) -> Premorphism:
    """Same premorphism with every layer up to the certified depth spelled out."""
    N = f.stable_level + f.period + extra
    P = f.period
    pre = tuple(f.layer(n) for n in range(N + 1))
    cyc = tuple(f.layer(n) for n in range(N + 1, N + 1 + P))
    return Premorphism(f.source, f.target, f.level_preamble, f.level_step, pre, cyc)


def mutate(rng: random.Random, f: Premorphism):
    """Swap two differently sourced edges of one fiber in a materialised layer.

    Returns ``(mutant, n)`` or ``None`` when no layer has a mixed fiber.
    """
    g = materialized(f)
    options = []
    for n in range(1, len(g.layer_preamble)):
        F = g.layer_preamble[n]
        for w, srcs in F.fibers.items():
            pairs = [(i, j) for i in range(len(srcs)) for j in range(i + 1, len(srcs)) if srcs[i] != srcs[j]]
            if pairs:
                options.append((n, w, pairs))
    if not options:
        return None
    n, w, pairs = rng.choice(options)
    i, j = rng.choice(pairs)
    F = g.layer_preamble[n]
    srcs = list(F.fibers[w])
    srcs[i], srcs[j] = srcs[j], srcs[i]
    fibers = dict(F.fibers)
    fibers[w] = tuple(srcs)
    layers = list(g.layer_preamble)
    layers[n] = OrderedEdgeSet(F.domain, F.codomain, fibers)
    return Premorphism(g.source, g.target, g.level_preamble, g.level_step, tuple(layers), g.layer_cycle), n


def seeds(seed: int, count: int) -> Iterator[random.Random]:
    for i in range(count):
        yield random.Random(seed * 100003 + i)

"""Brute-force reference implementations used by the tests.

Everything here works from the raw edge lists of unrolled levels and never
calls the library algorithms it is compared against.
"""
from __future__ import annotations

import random

from ordered_bratteli.diagram import EventuallyPeriodicPath, Kind, OrderedBratteliDiagram


def edges_at(d: OrderedBratteliDiagram, n: int):
    """Raw ``(source, range, rank)`` triples of level ``n``."""
    return [(e.source, e.range, e.rank) for e in d.level(n).edges]


def enumerate_paths(d: OrderedBratteliDiagram, n: int, start_level: int = 0, start=None):
    """All edge sequences from ``start`` (default: the root) through levels ``start_level+1 .. n``."""
    if start is None:
        starts = [d.root] if start_level == 0 else list(d.vertices(start_level))
    else:
        starts = [start]
    paths = [((), v) for v in starts]
    for k in range(start_level + 1, n + 1):
        level = edges_at(d, k)
        paths = [(p + ((r, rank),), r) for p, v in paths for s, r, rank in level if s == v]
    return [p for p, _ in paths]


def revlex_key(prefix):
    return tuple(r for _, r in reversed(prefix))


def towers(d: OrderedBratteliDiagram, n: int) -> dict:
    """Paths to each vertex of ``V_n``, sorted with the top edge most significant."""
    if n == 0:
        return {d.root: [()]}
    out = {v: [] for v in d.vertices(n)}
    for p in enumerate_paths(d, n):
        out[p[-1][0]].append(p)
    return {v: sorted(ps, key=revlex_key) for v, ps in out.items()}


def count_paths(d, i, j, u, v) -> int:
    return sum(1 for p in enumerate_paths(d, j, i, u) if p and p[-1][0] == v) if j > i else int(u == v)


def is_extreme(d, n, edge, kind) -> bool:
    v, r = edge
    size = sum(1 for _, rr, _ in edges_at(d, n) if rr == v)
    return r == (size - 1 if kind is Kind.MAX else 0)


def extreme_count(d: OrderedBratteliDiagram, kind: Kind, extra: int = 8) -> int:
    """Number of all-extreme prefixes at a deep level that extend all-extreme much further."""
    n = d.p + extra * d.c
    m = n + extra * d.c
    # an all-extreme prefix is fixed by its end vertex; walk upward over extreme edges
    alive = set(d.vertices(m))
    for k in range(m, n, -1):
        alive = {s for s, r, rank in edges_at(d, k) if r in alive and is_extreme(d, k, (r, rank), kind)}
    return len(alive)


def all_extensions_extreme(d, prefix, kind, extra: int = 6) -> bool:
    if not all(is_extreme(d, n, e, kind) for n, e in enumerate(prefix, start=1)):
        return False
    k = len(prefix)
    end = prefix[-1][0] if prefix else d.root
    top = max(k, d.p) + extra * d.c
    for ext in enumerate_paths(d, top, k, end):
        if not all(is_extreme(d, k + i, e, kind) for i, e in enumerate(ext, start=1)):
            return False
    return True


def connected(d, i, j) -> bool:
    return all(count_paths(d, i, j, u, v) > 0 for u in d.vertices(i) for v in d.vertices(j))


def induced_table(f, n: int) -> dict:
    """``C``-prefix of length ``f_n`` -> ``B``-prefix of length ``n``, by matching tower positions.

    Paths to ``w`` in ``C`` are matched position by position with pairs
    (``B``-path to ``v``, ``F_n`` edge ``v -> w``) ordered with the ``F`` edge
    most significant.
    """
    B, C = f.source, f.target
    tb, tc = towers(B, n), towers(C, f.level(n))
    F = f.layer(n)
    table = {}
    for w, cpaths in tc.items():
        pairs = [p for v in F.fibers[w] for p in tb[v]]
        assert len(pairs) == len(cpaths), f"tower heights differ at {w}"
        table.update(zip(cpaths, pairs))
    return table


def step_oracle(d, prefix):
    """Next prefix in the tower of the terminal vertex, or ``None`` at the top."""
    n = len(prefix)
    end = prefix[-1][0] if prefix else d.root
    tower = towers(d, n)[end]
    i = tower.index(tuple(prefix))
    return tower[i + 1] if i + 1 < len(tower) else None


def random_path(rng: random.Random, d: OrderedBratteliDiagram, head_len: int = 3):
    """A random eventually periodic path; the loop repeats a random closed walk over whole cycles."""
    start = max(head_len, d.p)
    while True:
        p = rng.choice(enumerate_paths(d, start))
        loops = rng.randint(1, 4)
        v0 = p[-1][0] if p else d.root
        walk, v = [], v0
        ok = True
        for k in range(start + 1, start + loops * d.c + 1):
            options = [(r, rank) for s, r, rank in edges_at(d, k) if s == v]
            if not options:
                ok = False
                break
            walk.append(rng.choice(options))
            v = walk[-1][0]
        if ok and v == v0:
            return EventuallyPeriodicPath(tuple(p), tuple(walk))

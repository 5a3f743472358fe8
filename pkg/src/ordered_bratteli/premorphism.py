"""Ordered edge sets, premorphisms between diagrams, and their induced maps.

A premorphism ``f: B -> C`` consists of a level map ``n -> f_n`` and ordered
edge sets ``F_n`` from ``V_n`` (a level of ``B``) to ``W_{f_n}`` (a level of
``C``).  It induces a continuous surjection from the path space of ``C`` onto
that of ``B``; the functions here compute it on prefixes and, exactly, on
eventually periodic paths.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import lcm
from typing import Mapping, Sequence

from .diagram import (EventuallyPeriodicPath, OrderedBratteliDiagram, Prefix,
                      ValidationReport, check_path, check_prefix, compose_range,
                      eventual_cycles)
from .errors import DiagramMismatch, DomainMismatch, PrefixLengthMismatch


@dataclass(frozen=True)
class OrderedEdgeSet:
    """Edges from ``domain`` to ``codomain``, totally ordered within each range fiber.

    ``fibers[w]`` lists the sources of the edges with range ``w`` by rank.
    """

    domain: tuple
    codomain: tuple
    fibers: Mapping

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        object.__setattr__(self, "codomain", tuple(self.codomain))
        object.__setattr__(self, "fibers", {w: tuple(self.fibers.get(w, ())) for w in self.codomain}
                           | {w: tuple(s) for w, s in self.fibers.items() if w not in self.codomain})

    @property
    def edges(self) -> list:
        return [(s, w, r) for w in self.codomain for r, s in enumerate(self.fibers[w])]

    def __len__(self):
        return sum(len(s) for s in self.fibers.values())

    def source_counts(self) -> dict:
        out = dict.fromkeys(self.domain, 0)
        for srcs in self.fibers.values():
            for s in srcs:
                out[s] = out.get(s, 0) + 1
        return out

    def problems(self) -> list:
        """Violated invariants as ``(subject, message)`` pairs."""
        out = []
        dom = set(self.domain)
        for w, srcs in self.fibers.items():
            if w not in self.codomain:
                out.append((w, "range is not in the codomain"))
            elif not srcs:
                out.append((w, "codomain vertex has no incoming edge"))
            for s in srcs:
                if s not in dom:
                    out.append((w, f"source {s!r} is not in the domain"))
        for s, k in self.source_counts().items():
            if k == 0:
                out.append((s, "domain vertex has no outgoing edge"))
        return out

    @classmethod
    def identity(cls, vertices: Sequence[str], other: Sequence[str] | None = None) -> "OrderedEdgeSet":
        other = vertices if other is None else other
        return cls(vertices, other, {w: (v,) for v, w in zip(vertices, other)})


def compose_edge_sets(F: OrderedEdgeSet, G: OrderedEdgeSet) -> OrderedEdgeSet:
    """``F`` from U to V followed by ``G`` from V to W, ``G``-edge most significant."""
    if set(F.codomain) != set(G.domain):
        raise DomainMismatch(f"codomain {F.codomain} does not match domain {G.domain}")
    fibers = {w: tuple(s for v in G.fibers[w] for s in F.fibers[v]) for w in G.codomain}
    return OrderedEdgeSet(F.domain, G.codomain, fibers)


def order_isomorphic(F: OrderedEdgeSet, G: OrderedEdgeSet) -> bool:
    """Whether the fibers agree position by position on sources."""
    if set(F.domain) != set(G.domain) or set(F.codomain) != set(G.codomain):
        raise DomainMismatch("edge sets have different domain or codomain")
    return all(F.fibers[w] == G.fibers[w] for w in F.codomain)


def level_edge_set(d: OrderedBratteliDiagram, i: int, j: int) -> OrderedEdgeSet:
    """All paths from ``V_i`` to ``V_j`` as an ordered edge set (identity if equal)."""
    if i == j:
        return OrderedEdgeSet.identity(d.vertices(i))
    lev = compose_range(d, i, j)
    return OrderedEdgeSet(d.vertices(i), lev.vertices, lev.fibers)


@dataclass(frozen=True)
class Premorphism:
    """Ordered premorphism ``B -> C`` in periodic presentation.

    Parameters
    ----------
    source, target : OrderedBratteliDiagram
        ``B`` and ``C``.
    level_preamble : sequence of int
        ``f_0, ..., f_q`` with ``f_0 = 0``.
    level_step : int
        ``f_{n+1} - f_n`` for ``n >= q``.
    layer_preamble : sequence of OrderedEdgeSet
        ``F_0, ..., F_r``.
    layer_cycle : sequence of OrderedEdgeSet
        Layers from ``r + 1`` on, repeated.
    """

    source: OrderedBratteliDiagram
    target: OrderedBratteliDiagram
    level_preamble: tuple
    level_step: int
    layer_preamble: tuple
    layer_cycle: tuple = ()
    _cache: dict = field(default_factory=dict, init=False, repr=False,
                         compare=False, hash=False)

    def __post_init__(self):
        for name in ("level_preamble", "layer_preamble", "layer_cycle"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    # ---------------------------------------------------------- structure
    def level(self, n: int) -> int:
        """``f_n``."""
        q = len(self.level_preamble) - 1
        if n <= q:
            return self.level_preamble[n]
        return self.level_preamble[-1] + (n - q) * self.level_step

    def layer(self, n: int) -> OrderedEdgeSet:
        """``F_n``."""
        if n < len(self.layer_preamble):
            return self.layer_preamble[n]
        if not self.layer_cycle:
            raise IndexError(f"premorphism has no layer {n}")
        return self.layer_cycle[(n - len(self.layer_preamble)) % len(self.layer_cycle)]

    def levels_for(self, length: int) -> list:
        return [n for n in range(0, length + 2) if self.level(n) == length]

    @cached_property
    def is_periodic(self) -> bool:
        return bool(self.layer_cycle) and not self.source.is_finite and not self.target.is_finite

    @cached_property
    def period(self) -> int:
        """Every per-level quantity repeats with this period from :attr:`stable_level` on."""
        if not self.is_periodic:
            return 0
        return lcm(len(self.layer_cycle), self.source.c, self.target.c)

    @cached_property
    def stable_level(self) -> int:
        if not self.is_periodic:
            return 0
        n = max(len(self.layer_preamble), len(self.level_preamble) - 1, self.source.p)
        while self.level(n) < self.target.p:
            n += 1
        return n

    @property
    def certified_depth(self) -> int:
        """Checking the squares ``n < certified_depth`` covers every level."""
        return self.stable_level + self.period + 1 if self.is_periodic else len(self.layer_preamble) - 1

    def phase(self, n: int) -> int:
        s = self.stable_level
        if not self.is_periodic or n < s:
            return n
        return s + (n - s) % self.period

    def span(self, i: int, j: int) -> OrderedEdgeSet:
        """Target paths from ``W_i`` to ``W_j``."""
        return level_edge_set(self.target, i, j)

    # ---------------------------------------------------------- squares
    def square(self, n: int):
        """Both sides of the commutativity square from level ``n`` to ``n + 1``.

        Returns ``(left, right, left_index, right_index)``; the first two are
        dicts keyed by ``w`` in ``W_{f_{n+1}}``.
        ``right[w]`` lists ``(d, segment, source)`` for ``F_n`` followed by the
        target paths ``segment`` from ``W_{f_n}``; ``left[w]`` lists
        ``(e, d', source)`` for an edge ``e`` of ``B`` at level ``n + 1``
        followed by ``d'`` in ``F_{n+1}``.  An edge ``d`` of ``F_n`` is named
        ``(range, rank)``.
        """
        key = ("square", self.phase(n))
        if key in self._cache:
            return self._cache[key]
        B, C = self.source, self.target
        a, b = self.level(n), self.level(n + 1)
        F, F1 = self.layer(n), self.layer(n + 1)
        segs = _segments(C, a, b)
        right, left = {}, {}
        for w1 in C.vertices(b):
            right[w1] = [((w, k), seg, v) for w, seg in segs[w1]
                         for k, v in enumerate(F.fibers.get(w, ()))]
            left[w1] = [((v1, r), (w1, k), u) for k, v1 in enumerate(F1.fibers.get(w1, ()))
                        for r, u in enumerate(B.fiber(n + 1, v1))]
        r_index = {w1: {(d, seg): i for i, (d, seg, _) in enumerate(rows)} for w1, rows in right.items()}
        l_index = {w1: {(e, d1): i for i, (e, d1, _) in enumerate(rows)} for w1, rows in left.items()}
        self._cache[key] = (left, right, l_index, r_index)
        return self._cache[key]

    def forward(self, n: int, d, segment: tuple):
        """``(e_{n+1}, d_{n+1})`` matched with ``(d_n, segment)``."""
        left, right, _, r_index = self.square(n)
        w1 = segment[-1][0] if segment else d[0]
        i = r_index[w1][(d, segment)]
        e, d1, _ = left[w1][i]
        return e, d1

    def backward(self, n: int, e, d1):
        """``(d_n, segment)`` matched with ``(e_{n+1}, d_{n+1})``."""
        left, right, l_index, _ = self.square(n)
        i = l_index[d1[0]][(e, d1)]
        d, seg, _ = right[d1[0]][i]
        return d, seg

    def root_edge(self):
        return (self.target.root, 0)


def _segments(C: OrderedBratteliDiagram, a: int, b: int) -> dict:
    """Target paths from level ``a`` to each vertex of level ``b`` as ``(start, edges)``."""
    table = {w: [(w, ())] for w in C.vertices(a)}
    for k in range(a + 1, b + 1):
        table = {w: [(start, seg + ((w, r),)) for r, u in enumerate(C.fiber(k, w))
                     for start, seg in table[u]]
                 for w in C.vertices(k)}
    return table


# ----------------------------------------------------------------- validation

def validate_premorphism(f: Premorphism, depth: int | None = None) -> ValidationReport:
    """Check the level map, every layer, and the commutativity squares ``n < depth``.

    Without ``depth`` the certified depth is used, which covers all levels of
    a periodic presentation.
    """
    report = ValidationReport()
    B, C = f.source, f.target
    if not f.level_preamble or f.level_preamble[0] != 0:
        report.add(0, "level_map", "f_0 must be 0")
        return report
    if any(b < a for a, b in zip(f.level_preamble, f.level_preamble[1:])):
        report.add(0, "level_map", "level map must be non-decreasing")
    if f.level_step < 1:
        report.add(0, "level_map", "periodic step must be at least 1")
    if not f.layer_preamble:
        report.add(0, "layers", "F_0 is missing")
        return report
    if depth is None:
        depth = f.certified_depth
    F0 = f.layer(0)
    if F0.fibers.get(C.root) != (B.root,) or len(F0) != 1:
        report.add(0, "F_0", "F_0 must be the single edge between the roots")
    for n in range(0, depth + 1):
        try:
            F = f.layer(n)
            dom, cod = B.vertices(n), C.vertices(f.level(n))
        except Exception as exc:  # level beyond a finite presentation
            report.add(n, "layer", str(exc))
            break
        if set(F.domain) != set(dom) or set(F.codomain) != set(cod):
            report.add(n, f"F_{n}", "domain/codomain differ from the diagram levels")
            continue
        for subject, msg in F.problems():
            report.add(n, f"F_{n} {subject}", msg)
    if not report.ok:
        return report
    for n in range(0, depth):
        try:
            left, right, _, _ = f.square(n)
        except Exception as exc:
            report.add(n, "square", str(exc))
            break
        for w1 in left:
            ls = [u for *_, u in left[w1]]
            rs = [u for *_, u in right[w1]]
            if ls != rs:
                report.add(n, f"fiber {w1}",
                           f"square {n}->{n + 1} not order isomorphic: {ls} vs {rs}")
    return report


# -------------------------------------------------------------- induced map

def induced_states(f: Premorphism, c_prefix, n: int | None = None):
    """Image of a target prefix together with the ``F``-edges realising it."""
    c_prefix = check_prefix(f.target, c_prefix)
    if n is None:
        candidates = f.levels_for(len(c_prefix))
        if not candidates:
            raise PrefixLengthMismatch(f"no level n with f_n = {len(c_prefix)}")
        n = candidates[-1]
    elif f.level(n) != len(c_prefix):
        raise PrefixLengthMismatch(f"f_{n} = {f.level(n)} but prefix has length {len(c_prefix)}")
    d = f.root_edge()
    edges, states = [], [d]
    for k in range(n):
        seg = c_prefix[f.level(k):f.level(k + 1)]
        e, d = f.forward(k, d, seg)
        edges.append(e)
        states.append(d)
    return tuple(edges), states


def induced_map_prefix(f: Premorphism, c_prefix, n: int | None = None) -> Prefix:
    """The length-``n`` source prefix determined by a length-``f_n`` target prefix.

    When several ``n`` share the same ``f_n`` the largest is used.
    """
    return induced_states(f, c_prefix, n)[0]


def preimage_prefixes(f: Premorphism, b_prefix) -> list:
    """All length-``f_n`` target prefixes mapped onto ``b_prefix`` (length ``n``)."""
    b_prefix = check_prefix(f.source, b_prefix)
    n = len(b_prefix)
    end = b_prefix[-1][0] if b_prefix else f.source.root
    F = f.layer(n)
    out = []
    for w in F.codomain:
        for k, v in enumerate(F.fibers[w]):
            if v != end:
                continue
            d, segs = (w, k), []
            for j in range(n - 1, -1, -1):
                d, seg = f.backward(j, b_prefix[j], d)
                segs.append(seg)
            out.append(tuple(e for seg in reversed(segs) for e in seg))
    return out


def induced_map_path(f: Premorphism, x: EventuallyPeriodicPath) -> EventuallyPeriodicPath:
    """Exact image of an eventually periodic target path."""
    C = f.target
    check_path(C, x)
    s, P = f.stable_level, f.period
    L = len(x.loop)
    d, k = f.root_edge(), 0
    edges, seen = [], {}
    while True:
        a = f.level(k)
        if k >= s and a >= len(x.head):
            key = ((k - s) % P, (a - len(x.head)) % L, d)
            if key in seen:
                k0 = seen[key]
                return EventuallyPeriodicPath(tuple(edges[:k0]), tuple(edges[k0:]))
            seen[key] = k
        seg = tuple(x.edge(j) for j in range(a + 1, f.level(k + 1) + 1))
        e, d = f.forward(k, d, seg)
        edges.append(e)
        k += 1


def _preimage_sets(f: Premorphism, y: EventuallyPeriodicPath):
    """Start level ``N``, period ``Q`` and the edge sets ``D_n`` for ``n <= N + Q``."""
    B = f.source
    check_path(B, y)
    N = max(f.stable_level, len(y.head) + 1)
    Q = lcm(f.period, len(y.loop))

    def D(n):
        end = y.edge(n)[0] if n else B.root
        F = f.layer(n)
        return [(w, k) for w in F.codomain for k, v in enumerate(F.fibers[w]) if v == end]

    return N, Q, D


def preimage_paths(f: Premorphism, y: EventuallyPeriodicPath) -> list:
    """Every target path mapped onto ``y``, exactly.

    Preimages correspond to coherent sequences of ``F``-edges over ``y``; they
    are the inverse limit of the backward maps, which is periodic beyond
    level ``N``.
    """
    N, Q, D = _preimage_sets(f, y)

    def back(n, d1):
        return f.backward(n, y.edge(n + 1), d1)

    def down(d1, top):
        # from a state at level top to level N, collecting segments
        segs = []
        for j in range(top - 1, N - 1, -1):
            d1, seg = back(j, d1)
            segs.append(seg)
        return d1, segs

    phi = {d: down(d, N + Q)[0] for d in D(N + Q)}
    out = set()
    for cyc in eventual_cycles(phi):
        out.update(_cycle_preimages(N, Q, cyc, back))
    return sorted(out, key=str)


def _cycle_preimages(N, Q, cyc, back) -> list:
    """One preimage per element of a cycle of the composite backward map."""
    L = len(cyc)
    paths = []
    for i in range(L):
        # state at level N + L*Q is cyc[i]; its image chain visits the cycle
        d, segs = cyc[i], []
        for j in range(N + L * Q - 1, -1, -1):
            d, seg = back(j, d)
            segs.append(seg)
        segs.reverse()
        head = tuple(e for seg in segs[:N] for e in seg)
        loop = tuple(e for seg in segs[N:] for e in seg)
        paths.append(EventuallyPeriodicPath(head, loop))
    return paths


def fiber_bound(f: Premorphism, y: EventuallyPeriodicPath) -> int:
    """Largest number of ``F_n`` edges leaving the vertices of ``y``.

    This bounds the number of preimages of ``y``; it is always finite in a
    periodic presentation.
    """
    N, Q, D = _preimage_sets(f, y)
    return max(len(D(n)) for n in range(0, N + Q + 1))


# --------------------------------------------------------------- equivalence

def premorphisms_equivalent(f: Premorphism, g: Premorphism, depth: int | None = None) -> bool:
    """Whether ``F_n S_{f_n,m}`` and ``G_n S_{g_n,m}`` agree for all ``n <= depth``.

    Here ``m = max(f_n, g_n)``.  The default depth certifies all levels when
    both level maps share their step.
    """
    if f.source != g.source or f.target != g.target:
        raise DiagramMismatch("premorphisms must share source and target diagrams")
    if depth is None:
        depth = max(f.certified_depth, g.certified_depth) + lcm(max(f.period, 1), max(g.period, 1))
    for n in range(depth + 1):
        a, b = f.level(n), g.level(n)
        m = max(a, b)
        lhs = compose_edge_sets(f.layer(n), f.span(a, m))
        rhs = compose_edge_sets(g.layer(n), g.span(b, m))
        if not order_isomorphic(lhs, rhs):
            return False
    return True


def _periodic_layers(build, start: int, period: int):
    pre = [build(n) for n in range(start)]
    cyc = [build(n) for n in range(start, start + period)]
    return pre, cyc


def compose_premorphisms(f: Premorphism, g: Premorphism) -> Premorphism:
    """``f: B -> C`` then ``g: C -> D`` gives ``B -> D`` with ``h_n = g_{f_n}``."""
    if f.target != g.source:
        raise DiagramMismatch("target of the first premorphism must be the source of the second")
    step = f.level_step * g.level_step
    # h_n is arithmetic once n and f_n are past both level preambles
    q = len(f.level_preamble) - 1
    while f.level(q) < len(g.level_preamble) - 1:
        q += 1
    start = max(q, f.stable_level, len(f.layer_preamble), 1)
    while f.level(start) < max(len(g.layer_preamble), g.stable_level):
        start += 1
    period = lcm(max(f.period, 1), max(g.period, 1), max(len(f.layer_cycle), 1), max(len(g.layer_cycle), 1))

    def build(n):
        return compose_edge_sets(f.layer(n), g.layer(f.level(n)))

    pre, cyc = _periodic_layers(build, start, period)
    return Premorphism(f.source, g.target, tuple(g.level(f.level(n)) for n in range(start + 1)),
                       step, tuple(pre), tuple(cyc))


def identity_premorphism(d: OrderedBratteliDiagram) -> Premorphism:
    layers = [OrderedEdgeSet.identity(d.vertices(n)) for n in range(0, d.p + 1)]
    cycle = [OrderedEdgeSet.identity(d.vertices(n)) for n in range(d.p + 1, d.p + d.c + 1)]
    return Premorphism(d, d, (0,), 1, tuple(layers), tuple(cycle))


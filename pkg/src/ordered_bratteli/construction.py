"""Counterexample construction, decisiveness, rank-2 reduction, factoring checks."""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from math import lcm

from .diagram import (EventuallyPeriodicPath, Kind, Level, OrderedBratteliDiagram,
                      all_prefixes, check_path, count_extreme_paths, extreme_set_has_interior,
                      is_infinite_space, is_simple, telescope_periodic)
from .dynamics import (NaturalExtension, default_extension, first_non_extreme, is_eventually_extreme,
                       is_extreme_path, vershik_step_infinite)
from .errors import MaxPathNoExtension, NotExtreme, NotRank2, PatternMismatch
from .premorphism import (OrderedEdgeSet, Premorphism, induced_map_path,
                          preimage_paths)


# --------------------------------------------------------------- construction

@dataclass(frozen=True)
class ConstructionResult:
    """Output of :func:`build_counterexample`.

    ``bookkeeping[n - 1]`` describes the fiber of the new vertex at level
    ``n``: the sources copied from the fiber of ``y_n`` (``h``) and of
    ``z_n`` (``g``), the resulting fiber, and the two premorphism edges into
    the new vertex (sources of the lower edge first).
    """

    b_prime: OrderedBratteliDiagram
    premorphism: Premorphism
    x: EventuallyPeriodicPath
    tx: EventuallyPeriodicPath
    new_vertex: str
    bookkeeping: tuple

    def lifted_extension(self, ext_B: NaturalExtension) -> NaturalExtension:
        """Extension on the new diagram that agrees with ``ext_B`` on the old paths.

        A max path through the new vertices (there is one exactly when ``z``
        is eventually maximal) is sent to ``ext_B`` of its image.
        """
        source = self.premorphism.source
        old = set(count_extreme_paths(source, Kind.MAX).witnesses)
        out = {}
        for w in count_extreme_paths(self.b_prime, Kind.MAX).witnesses:
            out[w] = ext_B(w) if w in old else ext_B(induced_map_path(self.premorphism, w))
        return NaturalExtension(out)


def _fresh_name(d: OrderedBratteliDiagram, base: str = "new") -> str:
    taken = d.vertex_names
    name = base
    while name in taken:
        name += "'"
    return name


def build_counterexample(B: OrderedBratteliDiagram, z: EventuallyPeriodicPath,
                         y: EventuallyPeriodicPath, ext_B: NaturalExtension | None = None) -> ConstructionResult:
    """Extend ``B`` by one vertex per level so the induced map fails to commute at one point.

    The new diagram contains ``B`` unchanged.  A new vertex at level ``n``
    receives copies of the edges into the range of ``y_n`` followed by copies
    of the edges into the range of ``z_n``; for ``n >= 2`` the last ``y``-copy
    and the first ``z``-copy are one edge, which comes from the previous new
    vertex.  The path ``x`` through those shared edges maps onto ``y`` while
    its successor maps onto ``z``.

    Raises
    ------
    NotExtreme
        If ``z`` is not a min path or ``y`` not a max path.
    """
    check_path(B, z)
    check_path(B, y)
    if not is_extreme_path(B, z, Kind.MIN):
        raise NotExtreme(f"{z} is not an infinite min path")
    if not is_extreme_path(B, y, Kind.MAX):
        raise NotExtreme(f"{y} is not an infinite max path")
    if ext_B is not None and ext_B(y) == z:
        warnings.warn("z equals the extension image of y; the construction will not break factoring",
                      stacklevel=2)
    new = _fresh_name(B)
    n0 = max(B.p, len(z.head), len(y.head), 1)
    period = lcm(B.c, len(z.loop), len(y.loop))
    top = n0 + period

    levels, layers, book, ranks = [], [OrderedEdgeSet([B.root], [B.root], {B.root: (B.root,)})], [], []
    for n in range(1, top + 1):
        ry, rz = y.edge(n)[0], z.edge(n)[0]
        h, g = B.fiber(n, ry), B.fiber(n, rz)
        if n == 1:
            fiber = h + g
        else:
            fiber = h[:-1] + (new,) + g[1:]
        base = B.level(n)
        fibers = dict(base.fibers)
        fibers[new] = fiber
        levels.append(Level.from_fibers(fibers, (new,) + base.vertices))
        layer = {v: (v,) for v in base.vertices}
        layer[new] = (ry, rz)
        layers.append(OrderedEdgeSet(base.vertices, (new,) + base.vertices, layer))
        ranks.append(len(h) - 1)
        book.append({"level": n, "new_vertex": new, "h": h, "g": g, "fiber": fiber,
                     "premorphism_fiber": (ry, rz)})
    b_prime = OrderedBratteliDiagram(tuple(levels[:n0]), tuple(levels[n0:]))
    f = Premorphism(B, b_prime, (0,), 1, tuple(layers[:n0 + 1]), tuple(layers[n0 + 1:]))
    x_edges = [(new, r) for r in ranks]
    x = EventuallyPeriodicPath(tuple(x_edges[:n0]), tuple(x_edges[n0:]))
    tx = x.with_prefix(((new, ranks[0] + 1),))
    return ConstructionResult(b_prime, f, x, tx, new, tuple(book))


# -------------------------------------------------------------- decisiveness

@dataclass(frozen=True)
class DecisivenessClassification:
    z_eventually_maximal: bool
    y_eventually_minimal: bool
    max_set_interior_empty: bool
    verdict: str  # "Decisive", "NotDecisive" or "SemiDecisiveOnly"
    case: str | None  # "1", "2", "simple" or None
    notes: tuple = ()


def classify_decisiveness(B: OrderedBratteliDiagram, z: EventuallyPeriodicPath, y: EventuallyPeriodicPath,
                          result: ConstructionResult | None = None,
                          ext_B: NaturalExtension | None = None) -> DecisivenessClassification:
    """Whether the constructed diagram is decisive, assuming ``B`` is.

    Decisiveness of ``B`` itself cannot be decided here.  What is checked is
    that ``B`` has as many max as min paths and that ``ext_B``, when given,
    pairs them bijectively; if that fails the verdict is ``NotDecisive``.
    """
    zmax = is_eventually_extreme(B, z, Kind.MAX)
    ymin = is_eventually_extreme(B, y, Kind.MIN)
    empty = not extreme_set_has_interior(B, Kind.MAX)
    notes = ["decisiveness of the input diagram is assumed, not proved"]
    n_max = count_extreme_paths(B, Kind.MAX).count
    n_min = count_extreme_paths(B, Kind.MIN).count
    surrogate = n_max == n_min
    if ext_B is not None:
        surrogate = surrogate and not ext_B.problems(B) and ext_B.is_bijective()
    if not surrogate:
        notes.append(f"input fails the surrogate check ({n_max} max paths, {n_min} min paths)")
        return DecisivenessClassification(zmax, ymin, empty, "NotDecisive", None, tuple(notes))
    if not zmax and not ymin:
        return DecisivenessClassification(zmax, ymin, empty, "Decisive", "1", tuple(notes))
    if zmax and ymin and empty:
        return DecisivenessClassification(zmax, ymin, empty, "Decisive", "2", tuple(notes))
    if is_simple(B) and is_infinite_space(B):
        return DecisivenessClassification(zmax, ymin, empty, "Decisive", "simple", tuple(notes))
    return DecisivenessClassification(zmax, ymin, empty, "SemiDecisiveOnly", None, tuple(notes))


@dataclass(frozen=True)
class UniqueMin:
    unique: bool
    witnesses: tuple


def unique_min_witness(B: OrderedBratteliDiagram) -> UniqueMin:
    mins = count_extreme_paths(B, Kind.MIN)
    return UniqueMin(mins.count == 1, mins.witnesses)


# ------------------------------------------------------------ rank 2 reduction

@dataclass(frozen=True)
class TwoOdometers:
    """The diagram splits into two single-vertex diagrams after ``cuts``."""

    diagram: OrderedBratteliDiagram
    components: tuple
    cuts: str


@dataclass(frozen=True)
class OdometerConjugacy:
    """``premorphism`` maps the one-vertex ``odometer`` bijectively onto ``diagram``."""

    diagram: OrderedBratteliDiagram
    odometer: OrderedBratteliDiagram
    premorphism: Premorphism
    cuts: str


def _candidates(B: OrderedBratteliDiagram, window: int):
    yield B, "every level", lambda k: k
    first = max(B.p, 1)
    for mult in range(1, window + 1):
        step = mult * B.c
        for offset in range(step):
            a = first + offset
            yield (telescope_periodic(B, a, step), f"levels {a} + {step}k",
                   lambda k, a=a, step=step: 0 if k == 0 else a + (k - 1) * step)


def _split(D: OrderedBratteliDiagram):
    """Components of a diagram without cross edges in its cycle, or ``None``."""
    top = D.p + D.c
    follow = {}
    for n in range(D.p + 1, top + 1):
        step = {}
        for v, srcs in D.level(n).fibers.items():
            if len(set(srcs)) != 1:
                return None
            step[v] = srcs[0]
        if sorted(step.values()) != sorted(D.vertices(n - 1)):
            return None
        follow[n] = {u: v for v, u in step.items()}
    comps = []
    for v in D.vertices(D.p):
        # the vertex sequence may swap halves each cycle, so follow two cycles
        chain, u = [], v
        for n in range(D.p + 1, D.p + 2 * D.c + 1):
            u = follow[D.phase(n)][u]
            chain.append((n, u))
        if u != v:
            return None
        height = D.heights(D.p)[v]
        pre = (Level.from_fibers({"v": (D.root,) * height}),) if D.p else ()
        cyc = tuple(Level.from_fibers({"v": ("v",) * len(D.fiber(n, w))}) for n, w in chain)
        if not D.p:
            return None
        comps.append(OrderedBratteliDiagram(pre, cyc))
    return tuple(comps)


def _orderings(D: OrderedBratteliDiagram):
    """Vertex orderings making every level's concatenated fiber a power of the previous ordering."""
    last = D.p + 2 * D.c

    def concat(n, order):
        return tuple(s for v in order for s in D.fiber(n, v))

    def search(n, chosen):
        if n > last:
            if chosen[D.p] == chosen[last]:
                yield list(chosen)
            return
        prev = chosen[-1]
        for order in itertools.permutations(D.vertices(n)):
            word = concat(n, order)
            if len(word) % len(prev) == 0 and word == prev * (len(word) // len(prev)):
                chosen.append(order)
                yield from search(n + 1, chosen)
                chosen.pop()

    yield from search(1, [(D.root,)])


def _odometer(D: OrderedBratteliDiagram, orders: list):
    name = "w"
    last = D.p + 2 * D.c
    sizes = [len(D.level(n).edges) // len(orders[n - 1]) for n in range(1, last + 1)]
    levels = [Level.from_fibers({name: ((D.root,) if n == 1 else (name,)) * k})
              for n, k in enumerate(sizes, start=1)]
    C = OrderedBratteliDiagram(tuple(levels[:D.p]), tuple(levels[D.p:]))
    layers = [OrderedEdgeSet(D.vertices(n), C.vertices(n), {C.vertices(n)[0]: orders[n]})
              for n in range(0, last + 1)]
    f = Premorphism(D, C, (0,), 1, tuple(layers[:D.p + 1]), tuple(layers[D.p + 1:]))
    return C, f


def _pairing(B: OrderedBratteliDiagram, ext: NaturalExtension, cut_level) -> str:
    """``"same"`` if ``ext`` keeps every max path on its own vertices at the cut levels, else ``"cross"``."""
    span = max(B.p, 1) + 8 * max(B.c, 1)
    same = True
    for y, z in ext.assignment.items():
        cut_vertices = lambda w: [w.edge(cut_level(k))[0] for k in range(span, 2 * span)]
        if cut_vertices(y) != cut_vertices(z):
            same = False
    return "same" if same else "cross"


def rank2_reduce(B: OrderedBratteliDiagram, ext: NaturalExtension | None = None, window: int = 3):
    """Recognise a rank-2 diagram as two odometers or as one odometer up to conjugacy.

    Telescopings with cycle steps of up to ``window`` cycle lengths are tried.
    If ``ext`` is given, the found structure must match it: two odometers
    send each max path to the min path on its own vertices, the conjugacy
    case to the other one.

    Raises
    ------
    NotRank2
        If a level past the preamble does not have exactly two vertices.
    PatternMismatch
        If neither structure is found within the window.
    """
    B.require_infinite()
    for n in range(B.p, B.p + B.c + 1):
        if n and len(B.vertices(n)) != 2:
            raise NotRank2(f"level {n} has {len(B.vertices(n))} vertices")
    for D, cuts, cut_level in _candidates(B, window):
        pairing = _pairing(B, ext, cut_level) if ext is not None else None
        comps = _split(D)
        if comps is not None and pairing in (None, "same"):
            return TwoOdometers(D, comps, cuts)
        if pairing in (None, "cross"):
            for orders in _orderings(D):
                C, f = _odometer(D, orders)
                return OdometerConjugacy(D, C, f, cuts)
    raise PatternMismatch(f"no rank-2 structure found within {window} cycle periods")


# ------------------------------------------------------------------ factoring

@dataclass
class FactoringReport:
    verdict: str  # "pass" or "fail"
    witnesses: list = field(default_factory=list)
    equiv_conditions: dict = field(default_factory=dict)
    sweep_depth: int = 0
    sweep_checked: int = 0
    sweep_failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def _first_difference(a: EventuallyPeriodicPath, b: EventuallyPeriodicPath) -> int:
    n = 1
    while a.edge(n) == b.edge(n):
        n += 1
    return n


def _sweep(f: Premorphism, depth: int, budget: int):
    B, C = f.source, f.target
    checked, reached, failures = 0, 0, []
    # image and F-edge of every target prefix at the previous level
    memo = {(): ((), f.root_edge())}
    for k in range(1, depth + 1):
        m, m0 = f.level(k), f.level(k - 1)
        if C.total_paths(m) > budget - checked:
            break
        # towers come out bottom first, so successors are neighbours
        towers = {}
        for p in all_prefixes(C, m):
            towers.setdefault(p[-1][0] if p else C.root, []).append(p)
        towers = list(towers.values())
        step = {}
        for tower in towers:
            for p in tower:
                edges, d = memo[p[:m0]]
                e, d = f.forward(k - 1, d, p[m0:])
                step[p] = (edges + (e,), d)
        memo = step
        b_next = {}
        for v in B.vertices(k):
            tower = all_prefixes(B, k, end=v)
            b_next.update(zip(tower, tower[1:]))
        for tower in towers:
            checked += len(tower)
            for p, sp in zip(tower, tower[1:]):
                s_image = b_next.get(memo[p][0])
                if s_image is not None and memo[sp][0] != s_image:
                    failures.append({"prefix": p, "level": k})
        reached = k
    return reached, checked, failures


def _conditions(f: Premorphism, y, x, e_next, tx, upto: int) -> dict:
    """Edge-level restatement of ``alpha(T x) = ext(y)`` for one preimage ``x``.

    For a max ``x`` the minimal ``F``-edge at the vertex of ``T x`` must
    start where ``ext(y)`` is.  Otherwise let ``k`` be the first level whose
    target level reaches the first non-max edge of ``x``: below ``k`` the same
    minimal-edge condition applies, from ``k`` on the successor of the ``F``-edge
    carrying ``x`` must start where ``ext(y)`` is.
    """
    B, C = f.source, f.target
    ell = first_non_extreme(C, x, Kind.MAX)
    k = None
    if ell is not None:
        k = next(n for n in range(upto + ell + 2) if f.level(n) >= ell)
    d, states = f.root_edge(), [f.root_edge()]
    for n in range(upto):
        seg = tuple(x.edge(j) for j in range(f.level(n) + 1, f.level(n + 1) + 1))
        _, d = f.forward(n, d, seg)
        states.append(d)
    failed = None
    for n in range(1, upto + 1):
        target = e_next.edge(n)[0]
        if k is None or n < k:
            w = tx.edge(f.level(n))[0] if f.level(n) else C.root
            ok = f.layer(n).fibers[w][0] == target
        else:
            w, r = states[n]
            fib = f.layer(n).fibers[w]
            ok = r + 1 < len(fib) and fib[r + 1] == target
        if not ok:
            failed = n
            break
    return {"max_path": str(y), "preimage": str(x), "case": 1 if k is None else 2,
            "k": k, "holds": failed is None, "failed_level": failed}


def check_factoring(f: Premorphism, depth: int = 8, ext_B: NaturalExtension | None = None,
                    ext_C: NaturalExtension | None = None, budget: int = 50_000) -> FactoringReport:
    """Decide whether the induced map commutes with the extended Vershik maps.

    Commutation can only fail over the max paths of the source diagram, and
    their preimages are computed exactly; each is tested by comparing the
    image of its successor with the extension of its image.  A budgeted
    sweep over target prefixes checks the prefix-level equivariance too.
    """
    B, C = f.source, f.target
    ext_B = default_extension(B, ext_B)
    if ext_B is None:
        raise MaxPathNoExtension("the source diagram needs an extension rule")
    ext_C = default_extension(C, ext_C)
    report = FactoringReport("pass")
    pairs = []
    for y in count_extreme_paths(B, Kind.MAX).witnesses:
        expected = ext_B(y)
        for x in preimage_paths(f, y):
            if is_extreme_path(C, x, Kind.MAX) and ext_C is None:
                raise MaxPathNoExtension(f"target max path {x} needs an extension rule")
            tx = vershik_step_infinite(C, x, ext_C)
            actual = induced_map_path(f, tx)
            upto = depth
            if actual != expected:
                n = _first_difference(actual, expected)
                upto = max(depth, n)
                report.verdict = "fail"
                report.witnesses.append({"path": x, "level": n, "expected_prefix": expected.prefix(n),
                                         "actual_prefix": actual.prefix(n), "max_path": y})
            cond = _conditions(f, y, x, expected, tx, upto)
            cond["exact"] = actual == expected
            pairs.append(cond)
    reached, checked, failures = _sweep(f, depth, budget)
    report.sweep_depth, report.sweep_checked, report.sweep_failures = reached, checked, failures
    if failures:
        report.verdict = "fail"
    report.equiv_conditions = {
        "pairs": pairs,
        "agrees_with_exact": all(p["holds"] == p["exact"] for p in pairs),
    }
    return report

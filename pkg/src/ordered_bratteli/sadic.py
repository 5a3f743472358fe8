"""Substitutions read off a diagram, and the symbolic view of premorphisms.

Level ``i`` of a diagram is the morphism ``V_i -> V_{i-1}*`` sending a vertex
to the sources of its fiber in rank order.  A premorphism turns into a
sequence of morphisms ``W_{f_k} -> V_k*`` the same way, and its squares
become rectangles of word maps.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .diagram import EventuallyPeriodicPath, Kind, OrderedBratteliDiagram, all_prefixes, count_extreme_paths
from .dynamics import NaturalExtension, default_extension, orbit_segment
from .errors import MaxPathNoExtension, PrefixLengthMismatch
from .premorphism import Premorphism, induced_map_path, induced_states, preimage_paths


@dataclass(frozen=True)
class SadicMorphism:
    """Non-erasing morphism between free monoids on finite alphabets."""

    domain_alphabet: tuple
    codomain_alphabet: tuple
    images: dict

    def __post_init__(self):
        object.__setattr__(self, "domain_alphabet", tuple(self.domain_alphabet))
        object.__setattr__(self, "codomain_alphabet", tuple(self.codomain_alphabet))
        object.__setattr__(self, "images", {a: tuple(w) for a, w in self.images.items()})
        for a in self.domain_alphabet:
            if not self.images.get(a):
                raise ValueError(f"letter {a!r} has an empty image")

    def __call__(self, word: Iterable) -> tuple:
        return self.apply(word)

    def apply(self, word: Iterable) -> tuple:
        out = []
        for a in word:
            out.extend(self.images[a])
        return tuple(out)

    def compose(self, inner: "SadicMorphism") -> "SadicMorphism":
        """``self ∘ inner``: apply ``inner`` first."""
        return SadicMorphism(inner.domain_alphabet, self.codomain_alphabet,
                             {a: self.apply(w) for a, w in inner.images.items()})

    def incidence_matrix(self) -> np.ndarray:
        """Entry ``[b, a]`` counts the occurrences of ``b`` in the image of ``a``."""
        row = {b: i for i, b in enumerate(self.codomain_alphabet)}
        m = np.zeros((len(self.codomain_alphabet), len(self.domain_alphabet)), dtype=np.int64)
        for j, a in enumerate(self.domain_alphabet):
            for b in self.images[a]:
                m[row[b], j] += 1
        return m

    def lengths(self) -> dict:
        return {a: len(w) for a, w in self.images.items()}


def is_letter_surjective(m: SadicMorphism) -> bool:
    """Every codomain letter occurs in some image."""
    seen = {b for w in m.images.values() for b in w}
    return set(m.codomain_alphabet) <= seen


def extract_morphism(d: OrderedBratteliDiagram, i: int) -> SadicMorphism:
    """Level ``i`` as a morphism ``V_i -> V_{i-1}*``."""
    vertices = d.vertices(i)
    return SadicMorphism(vertices, d.vertices(i - 1), {v: d.fiber(i, v) for v in vertices})


def compose_morphisms(d: OrderedBratteliDiagram, i: int, j: int) -> SadicMorphism:
    """Levels ``i+1 .. j`` composed into ``V_j -> V_i*``.

    The image of ``v`` lists the level-``i`` starting vertex of every path
    from ``V_i`` to ``v``, in reverse-lexicographic order.
    """
    if not i < j:
        raise ValueError(f"need i < j, got {i}, {j}")
    m = extract_morphism(d, j)
    for k in range(j - 1, i, -1):
        m = extract_morphism(d, k).compose(m)
    return m


def identity_morphism(alphabet: Sequence) -> SadicMorphism:
    return SadicMorphism(alphabet, alphabet, {a: (a,) for a in alphabet})


def _target_span(f: Premorphism, k: int) -> SadicMorphism:
    a, b = f.level(k - 1), f.level(k)
    if a == b:
        return identity_morphism(f.target.vertices(a))
    return compose_morphisms(f.target, a, b)


def eta(f: Premorphism, k: int) -> SadicMorphism:
    """``W_{f_k} -> V_k*`` reading each ``F_k`` fiber in order."""
    F = f.layer(k)
    return SadicMorphism(F.codomain, F.domain, dict(F.fibers))


def premorphism_to_eta(f: Premorphism, depth: int | None = None) -> list:
    """The morphisms for ``k = 0 .. depth``; ``depth`` defaults to the certified depth."""
    depth = f.certified_depth if depth is None else depth
    return [eta(f, k) for k in range(depth + 1)]


@dataclass
class RectangleReport:
    ok: bool
    depth: int
    failures: list = field(default_factory=list)

    @property
    def failed_levels(self) -> list:
        return sorted({x["level"] for x in self.failures})


def check_commuting_rectangles(f: Premorphism, depth: int | None = None) -> RectangleReport:
    """Compare ``eta_{k-1} ∘ sigma^C`` with ``sigma^B_k ∘ eta_k`` letter by letter.

    Rectangle ``k`` carries the same data as the square from level ``k - 1``
    to ``k``, so checking up to the certified depth covers a periodic
    premorphism.
    """
    depth = f.certified_depth if depth is None else depth
    report = RectangleReport(True, depth)
    for k in range(1, depth + 1):
        left = eta(f, k - 1).compose(_target_span(f, k))
        right = extract_morphism(f.source, k).compose(eta(f, k))
        for w in f.target.vertices(f.level(k)):
            lw, rw = left.images.get(w), right.images.get(w)
            if lw != rw:
                report.ok = False
                report.failures.append({"level": k, "symbol": w, "left": lw, "right": rw})
    return report


# ------------------------------------------------------------ tower words

class Cylinder(NamedTuple):
    """Label of a depth-``k`` cylinder: its terminal vertex and edge ranks."""

    vertex: str
    ranks: tuple

    def __str__(self):
        return f"{self.vertex}[{','.join(map(str, self.ranks))}]"


def cylinder(d: OrderedBratteliDiagram, prefix) -> Cylinder:
    return Cylinder(prefix[-1][0] if prefix else d.root, tuple(r for _, r in prefix))


def cylinder_prefix(label: Cylinder, d: OrderedBratteliDiagram) -> tuple:
    """Recover the prefix by walking down from the terminal vertex."""
    out, v = [], label.vertex
    for n in range(len(label.ranks), 0, -1):
        edge = (v, label.ranks[n - 1])
        out.append(edge)
        v = d.source(n, edge)
    return tuple(reversed(out))


def tower_word(d: OrderedBratteliDiagram, k: int, m: int, v: str) -> tuple:
    """Depth-``k`` cylinders of the paths to ``v`` at level ``m``, bottom of the tower first."""
    if not 0 <= k <= m:
        raise ValueError(f"need 0 <= k <= m, got k={k}, m={m}")
    return tuple(cylinder(d, p[:k]) for p in all_prefixes(d, m, end=v))


@dataclass(frozen=True)
class OneBlockCode:
    mapping: dict

    def __call__(self, word: Iterable) -> tuple:
        return apply(self, word)


def apply(code: OneBlockCode, word: Iterable) -> tuple:
    return tuple(code.mapping[a] for a in word)


def one_block_code(d: OrderedBratteliDiagram, k: int) -> OneBlockCode:
    """Truncation of depth-``k`` cylinders to depth ``k - 1``."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    return OneBlockCode({cylinder(d, p): cylinder(d, p[:-1]) for p in all_prefixes(d, k)})


# ------------------------------------------------------------ factor pipeline

@dataclass
class PipelineReport:
    ok: bool
    index: int
    word_len: int
    starts: list = field(default_factory=list)
    truncation_ok: bool = True
    shift_ok: bool = True
    witness: dict | None = None


def factor_code(f: Premorphism, i: int) -> OneBlockCode:
    """Level-``f_i`` target cylinders to the level-``i`` source cylinders they induce."""
    B, C = f.source, f.target
    return OneBlockCode({cylinder(C, p): cylinder(B, induced_states(f, p, i)[0])
                         for p in all_prefixes(C, f.level(i))})


def _itinerary(d, x, depth, length, ext):
    return tuple(cylinder(d, y.prefix(depth)) for y in orbit_segment(d, x, length, ext))


def sliding_block_pipeline(f: Premorphism, i: int, word_len: int = 100,
                           ext_B: NaturalExtension | None = None,
                           ext_C: NaturalExtension | None = None,
                           starts: Sequence[EventuallyPeriodicPath] | None = None) -> PipelineReport:
    """Check the factor codes on orbit words of the target diagram.

    ``pi_i`` sends a level-``f_i`` target cylinder to its induced source
    cylinder.  Two things are compared on words of length ``word_len``:
    truncating then coding with ``pi_{i-1}`` against coding with ``pi_i``
    then truncating, and the coded itinerary of ``x`` against the itinerary
    of the image of ``x``.  The second fails exactly when the induced map does
    not intertwine the two Vershik maps along the orbit.

    Orbits start at the min paths of the target and at every preimage of a
    source max path, unless ``starts`` is given.
    """
    if i < 1:
        raise PrefixLengthMismatch(f"pipeline index must be at least 1, got {i}")
    B, C = f.source, f.target
    ext_B, ext_C = default_extension(B, ext_B), default_extension(C, ext_C)
    if starts is None:
        starts = list(count_extreme_paths(C, Kind.MIN).witnesses)
        for y in count_extreme_paths(B, Kind.MAX).witnesses:
            starts.extend(x for x in preimage_paths(f, y) if x not in starts)
    pi, pi_prev = factor_code(f, i), factor_code(f, i - 1)
    gamma = _truncation(C, f.level(i - 1), f.level(i))
    beta = one_block_code(B, i)
    report = PipelineReport(True, i, word_len, [str(x) for x in starts])
    for x in starts:
        try:
            word_C = _itinerary(C, x, f.level(i), word_len, ext_C)
            word_B = _itinerary(B, induced_map_path(f, x), i, word_len, ext_B)
        except MaxPathNoExtension as exc:
            raise MaxPathNoExtension(f"{exc}; pass ext_B/ext_C to the pipeline") from None
        if pi_prev(gamma(word_C)) != beta(pi(word_C)):
            report.ok = report.truncation_ok = False
        coded = pi(word_C)
        if coded != word_B:
            t = next(t for t in range(word_len) if coded[t] != word_B[t])
            report.ok = report.shift_ok = False
            if report.witness is None:
                report.witness = {"start": x, "position": t, "coded": coded[t], "itinerary": word_B[t],
                                  "coded_word": coded, "itinerary_word": word_B}
    return report


def _truncation(d: OrderedBratteliDiagram, a: int, b: int) -> OneBlockCode:
    return OneBlockCode({cylinder(d, p): cylinder(d, p[:a]) for p in all_prefixes(d, b)})


__all__ = [
    "SadicMorphism", "is_letter_surjective", "extract_morphism", "compose_morphisms",
    "identity_morphism", "eta", "premorphism_to_eta", "RectangleReport", "check_commuting_rectangles",
    "Cylinder", "cylinder", "cylinder_prefix", "tower_word", "OneBlockCode", "apply",
    "one_block_code", "PipelineReport", "factor_code", "sliding_block_pipeline",
]

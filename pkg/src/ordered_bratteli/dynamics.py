"""Vershik successor and predecessor on prefixes and on infinite paths."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import lcm
from typing import Mapping

from .diagram import (EventuallyPeriodicPath, Kind, OrderedBratteliDiagram, Prefix,
                      check_path, check_prefix, count_extreme_paths, extreme_prefix_to,
                      extreme_rank, is_extreme_edge)
from .errors import InvalidPath, MaxPathNoExtension


def _step(d: OrderedBratteliDiagram, prefix: Prefix, kind: Kind) -> Prefix | None:
    # kind is the extreme that blocks the step: MAX for successor, MIN for predecessor
    reset = Kind.MIN if kind is Kind.MAX else Kind.MAX
    delta = 1 if kind is Kind.MAX else -1
    for n, edge in enumerate(prefix, start=1):
        if not is_extreme_edge(d, n, edge, kind):
            new = (edge[0], edge[1] + delta)
            below = extreme_prefix_to(d, n - 1, d.source(n, new), reset)
            return below + (new,) + prefix[n:]
    return None


def vershik_step(d: OrderedBratteliDiagram, prefix) -> Prefix | None:
    """Successor of a prefix, or ``None`` when every edge is maximal.

    ``None`` means the successor depends on edges beyond the prefix.
    """
    return _step(d, check_prefix(d, prefix), Kind.MAX)


def vershik_predecessor(d: OrderedBratteliDiagram, prefix) -> Prefix | None:
    """Predecessor of a prefix, or ``None`` when every edge is minimal."""
    return _step(d, check_prefix(d, prefix), Kind.MIN)


@dataclass
class NaturalExtension:
    """Images of the infinite max paths, each an infinite min path."""

    assignment: Mapping = field(default_factory=dict)

    def __call__(self, x: EventuallyPeriodicPath) -> EventuallyPeriodicPath:
        try:
            return self.assignment[x]
        except KeyError:
            raise MaxPathNoExtension(f"no image assigned to max path {x}") from None

    def problems(self, d: OrderedBratteliDiagram) -> list:
        """Reasons this rule is not a natural extension on ``d`` (empty if it is)."""
        maxes = set(count_extreme_paths(d, Kind.MAX).witnesses)
        mins = set(count_extreme_paths(d, Kind.MIN).witnesses)
        out = [f"max path {x} has no image" for x in sorted(maxes - set(self.assignment), key=str)]
        out += [f"{x} is not a max path" for x in self.assignment if x not in maxes]
        out += [f"image {y} is not a min path" for y in self.assignment.values() if y not in mins]
        return out

    def is_bijective(self) -> bool:
        return len(set(self.assignment.values())) == len(self.assignment)

    @classmethod
    def unique_min(cls, d: OrderedBratteliDiagram) -> "NaturalExtension":
        """Send every max path to the only min path; fails if that is not unique."""
        mins = count_extreme_paths(d, Kind.MIN)
        if mins.count != 1:
            raise MaxPathNoExtension(f"diagram has {mins.count} min paths, no default extension")
        target = mins.witnesses[0]
        return cls({x: target for x in count_extreme_paths(d, Kind.MAX).witnesses})


def default_extension(d: OrderedBratteliDiagram, ext: NaturalExtension | None) -> NaturalExtension | None:
    if ext is not None:
        return ext
    try:
        return NaturalExtension.unique_min(d)
    except MaxPathNoExtension:
        return None


def _scan_length(d: OrderedBratteliDiagram, x: EventuallyPeriodicPath) -> int:
    return max(len(x.head), d.p) + lcm(len(x.loop), d.c)


def first_non_extreme(d: OrderedBratteliDiagram, x: EventuallyPeriodicPath, kind: Kind) -> int | None:
    """Lowest level whose edge is not extreme, or ``None`` if ``x`` is all-extreme."""
    for n in range(1, _scan_length(d, x) + 1):
        if not is_extreme_edge(d, n, x.edge(n), kind):
            return n
    return None


def is_extreme_path(d, x, kind) -> bool:
    return first_non_extreme(d, x, kind) is None


def is_eventually_extreme(d: OrderedBratteliDiagram, x: EventuallyPeriodicPath, kind: Kind) -> bool:
    """Whether all edges from some level on are extreme; decided on one full period."""
    start = max(len(x.head), d.p)
    return all(is_extreme_edge(d, n, x.edge(n), kind)
               for n in range(start + 1, start + lcm(len(x.loop), d.c) + 1))


def _step_infinite(d, x, kind, ext):
    n = first_non_extreme(d, x, kind)
    if n is None:
        if ext is None:
            raise MaxPathNoExtension(f"{x} is all-{kind.value} and no extension rule applies")
        return ext(x)
    return x.with_prefix(_step(d, x.prefix(n), kind))


def vershik_step_infinite(d: OrderedBratteliDiagram, x: EventuallyPeriodicPath,
                          ext: NaturalExtension | None = None) -> EventuallyPeriodicPath:
    """Successor of an infinite path.

    Max paths go through ``ext``; without one, a diagram with a single min
    path sends them there.
    """
    check_path(d, x)
    ext = default_extension(d, ext) if is_extreme_path(d, x, Kind.MAX) else ext
    return _step_infinite(d, x, Kind.MAX, ext)


def vershik_predecessor_infinite(d: OrderedBratteliDiagram, x: EventuallyPeriodicPath,
                                 ext: NaturalExtension | None = None) -> EventuallyPeriodicPath:
    """Predecessor; min paths are pulled back through a bijective ``ext``."""
    check_path(d, x)
    inverse = None
    if ext is not None and ext.is_bijective():
        inverse = NaturalExtension({v: k for k, v in ext.assignment.items()})
    return _step_infinite(d, x, Kind.MIN, inverse)


def orbit_segment(d: OrderedBratteliDiagram, x: EventuallyPeriodicPath, length: int,
                  ext: NaturalExtension | None = None) -> list:
    """``[x, Tx, ..., T^(length-1) x]``."""
    check_path(d, x)
    ext = default_extension(d, ext)
    out = [x]
    for _ in range(length - 1):
        out.append(_step_infinite(d, out[-1], Kind.MAX, ext))
    return out


def truncation_itinerary(d: OrderedBratteliDiagram, x: EventuallyPeriodicPath, k: int,
                         length: int, ext: NaturalExtension | None = None) -> list:
    """Depth-``k`` prefixes along the forward orbit of ``x``."""
    return [y.prefix(k) for y in orbit_segment(d, x, length, ext)]


def resolve_extreme_tail(d: OrderedBratteliDiagram, prefix: Prefix, kind: Kind) -> EventuallyPeriodicPath:
    """Extend ``prefix`` by extreme edges forever.

    Raises
    ------
    InvalidPath
        If no such extension exists or it is not unique.
    """
    prefix = check_prefix(d, prefix)
    n = len(prefix)
    end = prefix[-1][0] if prefix else d.root
    matches = {w.with_prefix(prefix) for w in count_extreme_paths(d, kind).witnesses
               if (w.edge(n)[0] if n else d.root) == end}
    if len(matches) != 1:
        raise InvalidPath(f"all_{kind.value} tail after {len(prefix)} edges ending at {end!r} "
                          f"has {len(matches)} possible continuations")
    return matches.pop()


__all__ = [
    "NaturalExtension", "vershik_step", "vershik_predecessor", "vershik_step_infinite",
    "vershik_predecessor_infinite", "orbit_segment", "truncation_itinerary",
    "is_eventually_extreme", "is_extreme_path", "first_non_extreme", "resolve_extreme_tail",
    "extreme_rank",
]

"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``python tests/test_acceptance.py`` for the report, or through
pytest, where each criterion is its own test (``-s`` shows the lines).
"""
from __future__ import annotations

import random
import sys
import time
import warnings
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from ordered_bratteli import (Kind, build_counterexample, check_factoring, classify_decisiveness,  # noqa: E402
                              count_extreme_paths, fiber_bound, identity_premorphism, induced_map_path,
                              induced_map_prefix, premorphisms_equivalent, rank2_reduce,
                              validate_premorphism, vershik_predecessor, vershik_step)
from ordered_bratteli.construction import OdometerConjugacy, TwoOdometers, unique_min_witness  # noqa: E402
from ordered_bratteli.dynamics import is_eventually_extreme  # noqa: E402
from ordered_bratteli.fixtures import load_fixture  # noqa: E402
from ordered_bratteli.generators import (delayed, doubled, mutate, random_diagram,  # noqa: E402
                                         random_diagram_where, random_extension, splitting_premorphism,
                                         swap_premorphism, unique_min)
from ordered_bratteli.premorphism import compose_premorphisms  # noqa: E402
from ordered_bratteli.sadic import (check_commuting_rectangles, compose_morphisms, one_block_code,  # noqa: E402
                                    sliding_block_pipeline, tower_word)

from cases import random_premorphism  # noqa: E402

SEED = 20240


def report(number: int, title: str, limit: float):
    """Run a criterion body, print its line, and fail on a problem or a slow run."""
    def wrap(body):
        def run():
            t0 = time.perf_counter()
            problems = body()
            dt = time.perf_counter() - t0
            if dt > limit:
                problems.append(f"took {dt:.1f} s, limit {limit:.0f} s")
            status = "PASS" if not problems else "FAIL"
            print(f"{status} criterion {number}: {title} ({dt:.1f} s)")
            for p in problems[:5]:
                print(f"    {p}")
            assert not problems, problems
        run.__name__ = body.__name__
        return run
    return wrap


# ------------------------------------------------------------ 1

def _check_construction(B, z, y, ext, res):
    problems = []
    f, x = res.premorphism, res.x
    if not validate_premorphism(f).ok:
        problems.append(f"invalid premorphism for {z}, {y}")
    for n in range(1, 21):
        if induced_map_prefix(f, x.prefix(f.level(n)), n) != y.prefix(n):
            problems.append(f"prefix {n} of x does not map onto y")
            break
    rep = check_factoring(f, 8, ext, res.lifted_extension(ext), budget=5000)
    paths = [w["path"] for w in rep.witnesses]
    if rep.verdict != "fail" or paths != [x]:
        problems.append(f"verdict {rep.verdict}, witnesses {[str(p) for p in paths]}, expected [{x}]")
    return problems


@report(1, "construction breaks factoring with witness x", 30)
def test_criterion_1_counterexample():
    problems = []
    fx = load_fixture("counterexample")
    B, z, y, ext = fx.diagrams["B"], fx.paths["z"], fx.paths["y"], fx.extensions["B"]
    problems += _check_construction(B, z, y, ext, build_counterexample(B, z, y, ext))
    rng = random.Random(SEED + 1)
    done = 0
    while done < 50:
        B = random_diagram(rng, max_vertices=4, max_cycle=3)
        ext = random_extension(rng, B)
        y = rng.choice(count_extreme_paths(B, Kind.MAX).witnesses)
        options = [m for m in count_extreme_paths(B, Kind.MIN).witnesses if m != ext(y)]
        if not options:
            continue
        z = rng.choice(options)
        problems += _check_construction(B, z, y, ext, build_counterexample(B, z, y, ext))
        done += 1
    return problems


# ------------------------------------------------------------ 2

def _unique_min_premorphisms(rng, count):
    out = []
    while len(out) < count:
        B = random_diagram_where(rng, unique_min, max_vertices=3, max_cycle=2)
        f = splitting_premorphism(rng, B)
        if rng.random() < 0.3:
            f = delayed(f)
        if unique_min_witness(f.target).unique:
            out.append(f)
    return out


@report(2, "unique min target implies factoring", 60)
def test_criterion_2_unique_min_factors():
    problems = []
    for f in _unique_min_premorphisms(random.Random(SEED + 2), 50):
        rep = check_factoring(f, 12)
        if not rep.passed:
            problems.append(f"fail on {f.target.vertices(1)}: {rep.witnesses[:1]} {rep.sweep_failures[:1]}")
    return problems


# ------------------------------------------------------------ 3

@report(3, "induced map is onto, keeps extreme prefixes, is equivariant", 60)
def test_criterion_3_prefix_properties():
    problems = []
    rng = random.Random(SEED + 3)
    for _ in range(30):
        f = random_premorphism(rng)
        B, C = f.source, f.target
        for n in range(0, 6):
            table = oracles.induced_table(f, n)
            images = set(table.values())
            missing = [p for p in oracles.enumerate_paths(B, n) if p not in images]
            if missing:
                problems.append(f"level {n}: {missing[0]} has no preimage")
            for q, p in table.items():
                m = len(q)
                for kind in (Kind.MIN, Kind.MAX):
                    if all(oracles.is_extreme(C, k, e, kind) for k, e in enumerate(q, 1)) and \
                            not all(oracles.is_extreme(B, k, e, kind) for k, e in enumerate(p, 1)):
                        problems.append(f"level {n}: {kind.name} prefix {q} maps to {p}")
                sq, sp = oracles.step_oracle(C, q), oracles.step_oracle(B, p)
                if sq is not None and sp is not None and table[sq] != sp:
                    problems.append(f"level {n}: step of {q} (length {m}) is not equivariant")
    return problems


# ------------------------------------------------------------ 4

def _agree_brute(f, g, depth=6):
    L = max(f.level(depth), g.level(depth))
    tf = {n: oracles.induced_table(f, n) for n in range(depth + 1)}
    tg = {n: oracles.induced_table(g, n) for n in range(depth + 1)}
    for q in oracles.enumerate_paths(f.target, L):
        for n in range(depth + 1):
            if tf[n][q[:f.level(n)]] != tg[n][q[:g.level(n)]]:
                return False
    return True


def _pairs(rng, count):
    out = []
    kinds = ["delay", "compose", "swap", "swap2", "swap_delay"]
    while len(out) < count:
        kind = kinds[len(out) % len(kinds)]
        B = random_diagram(rng, max_vertices=2, max_fiber=2, max_cycle=2)
        if kind == "delay":
            f = splitting_premorphism(rng, B)
            out.append((f, delayed(f)))
        elif kind == "compose":
            f = splitting_premorphism(rng, B)
            out.append((f, compose_premorphisms(f, delayed(identity_premorphism(f.target)))))
        else:
            D = doubled(B)
            s, e = swap_premorphism(D), identity_premorphism(D)
            if kind == "swap":
                out.append((s, e))
            elif kind == "swap2":
                out.append((compose_premorphisms(s, s), e))
            else:
                out.append((compose_premorphisms(s, delayed(e)), e))
    return out


@report(4, "equivalence agrees with brute-force induced maps", 60)
def test_criterion_4_equivalence():
    problems = []
    seen = set()
    for f, g in _pairs(random.Random(SEED + 4), 20):
        fast, slow = premorphisms_equivalent(f, g), _agree_brute(f, g)
        seen.add(slow)
        if fast != slow:
            problems.append(f"equivalent={fast} but brute force says {slow}")
    if seen != {True, False}:
        problems.append(f"only saw outcomes {seen}")
    return problems


# ------------------------------------------------------------ 5

@report(5, "fiber bound dominates preimage counts", 30)
def test_criterion_5_fiber_bound():
    problems = []
    rng = random.Random(SEED + 5)
    for _ in range(30):
        f = random_premorphism(rng)
        ys = list(count_extreme_paths(f.source, Kind.MAX).witnesses)
        ys += [induced_map_path(f, oracles.random_path(rng, f.target)) for _ in range(3)]
        tables = [oracles.induced_table(f, n) for n in range(6)]
        for y in ys:
            K = fiber_bound(f, y)
            for n, table in enumerate(tables):
                size = sum(1 for p in table.values() if p == y.prefix(n))
                if size > K:
                    problems.append(f"{size} preimages of {y.prefix(n)} exceed bound {K}")
    for name in ("fig7", "fig8", "rank2"):
        d = next(iter(load_fixture(name).diagrams.values()))
        e = identity_premorphism(d)
        for y in count_extreme_paths(d, Kind.MAX).witnesses:
            if fiber_bound(e, y) != 1:
                problems.append(f"identity on {name} reports K={fiber_bound(e, y)}")
        for n in range(6):
            if any(q != p for q, p in oracles.induced_table(e, n).items()):
                problems.append(f"identity on {name} has a non-singleton fiber at {n}")
    return problems


# ------------------------------------------------------------ 6

@report(6, "rank 2 fixtures reduce to the expected odometers", 10)
def test_criterion_6_rank2():
    problems = []
    fx = load_fixture("rank2")
    out = rank2_reduce(fx.diagrams["B"], fx.extensions["B"])
    if not isinstance(out, OdometerConjugacy):
        return [f"rank2 gave {type(out).__name__}"]
    for n in range(11):
        if out.diagram.total_paths(n) != out.odometer.total_paths(n):
            problems.append(f"path counts differ at level {n}")
    for n in range(8):
        values = list(oracles.induced_table(out.premorphism, n).values())
        if len(values) != len(set(values)):
            problems.append(f"non-singleton preimage at level {n}")
    cantor = load_fixture("cantor")
    if not isinstance(rank2_reduce(cantor.diagrams["right"]), TwoOdometers):
        problems.append("cantor right is not two odometers")
    if not isinstance(rank2_reduce(cantor.diagrams["left"]), OdometerConjugacy):
        problems.append("cantor left is not an odometer conjugacy")
    return problems


# ------------------------------------------------------------ 7

@report(7, "decisiveness classification of the fixtures", 10)
def test_criterion_7_decisiveness():
    problems = []
    for name, expected in (("fig7", ("Decisive", "1")), ("fig8", ("Decisive", "2"))):
        fx = load_fixture(name)
        c = classify_decisiveness(fx.diagrams["B"], fx.paths["z"], fx.paths["y"], ext_B=fx.extensions["B"])
        if (c.verdict, c.case) != expected:
            problems.append(f"{name}: {c.verdict} case {c.case}, expected {expected}")
    fx = load_fixture("semidecisive")
    B, z, y = fx.diagrams["B"], fx.paths["z"], fx.paths["y"]
    if not is_eventually_extreme(B, z, Kind.MAX) or is_eventually_extreme(B, y, Kind.MIN):
        problems.append("semidecisive fixture does not have the intended z and y")
    c = classify_decisiveness(B, z, y, ext_B=fx.extensions["B"])
    if c.verdict not in ("NotDecisive", "SemiDecisiveOnly"):
        problems.append(f"semidecisive: {c.verdict}")
    return problems


# ------------------------------------------------------------ 8

@report(8, "s-adic rectangles, morphism lengths, tower words, pipeline", 120)
def test_criterion_8_sadic():
    problems = []
    rng = random.Random(SEED + 8)
    valid = 0
    for i in range(50):
        f = random_premorphism(rng)
        g, n = f, None
        if i % 2:
            m = mutate(rng, random_premorphism(rng, "construction"))
            if m is not None:
                g, n = m
        rect, val = check_commuting_rectangles(g), validate_premorphism(g)
        if rect.ok != val.ok:
            problems.append(f"rectangles {rect.ok} but validation {val.ok}")
        if n is not None and (rect.ok or not set(rect.failed_levels) <= {n, n + 1}):
            problems.append(f"mutation of layer {n} reported at {rect.failed_levels}")
        valid += rect.ok
    if valid in (0, 50):
        problems.append("fuzzing did not mix valid and invalid premorphisms")
    for _ in range(10):
        d = random_diagram(rng, max_vertices=3, max_fiber=2, max_cycle=2)
        for n in range(1, 7):
            lengths = compose_morphisms(d, 0, n).lengths()
            for v in d.vertices(n):
                if lengths[v] != len(oracles.enumerate_paths(d, n)) - sum(
                        1 for p in oracles.enumerate_paths(d, n) if p[-1][0] != v):
                    problems.append(f"|sigma(0,{n}]({v})| is not the path count")
            for k in range(1, n + 1):
                code = one_block_code(d, k)
                for v in d.vertices(n):
                    if code(tower_word(d, k, n, v)) != tower_word(d, k - 1, n, v):
                        problems.append(f"truncating tower word {k},{n},{v} failed")
    for f in _unique_min_premorphisms(rng, 5):
        r = sliding_block_pipeline(f, rng.randint(1, 3), 100)
        if not r.ok:
            problems.append(f"pipeline fails on a passing premorphism: {r.witness}")
    fx = load_fixture("counterexample")
    r = sliding_block_pipeline(fx.premorphisms["f"], 2, 100, fx.extensions["B"], fx.extensions["B_prime"])
    if not r.truncation_ok or r.shift_ok or r.witness is None or r.witness["start"] != fx.paths["x"]:
        problems.append("pipeline did not catch the counterexample at x")
    return problems


# ------------------------------------------------------------ 9

@report(9, "successor/predecessor round trip and tower order", 30)
def test_criterion_9_dynamics():
    problems = []
    rng = random.Random(SEED + 9)
    for _ in range(30):
        d = random_diagram(rng, max_vertices=3, max_fiber=3, max_cycle=2)
        for n in range(0, 6):
            for v, tower in oracles.towers(d, n).items():
                for a, b in zip(tower, tower[1:] + [None]):
                    if vershik_step(d, a) != b:
                        problems.append(f"step of {a} is not {b}")
                    if b is not None and vershik_predecessor(d, b) != a:
                        problems.append(f"predecessor of {b} is not {a}")
                if vershik_predecessor(d, tower[0]) is not None:
                    problems.append(f"bottom of tower {v} has a predecessor")
    return problems


CRITERIA = [test_criterion_1_counterexample, test_criterion_2_unique_min_factors,
            test_criterion_3_prefix_properties, test_criterion_4_equivalence, test_criterion_5_fiber_bound,
            test_criterion_6_rank2, test_criterion_7_decisiveness, test_criterion_8_sadic,
            test_criterion_9_dynamics]


if __name__ == "__main__":
    warnings.simplefilter("ignore")
    failed = 0
    for criterion in CRITERIA:
        try:
            criterion()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)

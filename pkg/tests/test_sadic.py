import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from cases import SHAPES, random_premorphism
from ordered_bratteli import PrefixLengthMismatch, identity_premorphism, validate_premorphism
from ordered_bratteli.construction import rank2_reduce
from ordered_bratteli.fixtures import load_fixture
from ordered_bratteli.generators import mutate, random_diagram, random_extension
from ordered_bratteli.sadic import (Cylinder, SadicMorphism, check_commuting_rectangles, compose_morphisms,
                                    cylinder, cylinder_prefix, eta, extract_morphism, factor_code,
                                    is_letter_surjective, one_block_code, premorphism_to_eta,
                                    sliding_block_pipeline, tower_word)

SEEDS = st.integers(0, 10**6)
FAST = settings(max_examples=30, deadline=None)


def odometer():
    return load_fixture("two_odometer").diagrams["B"]


# ------------------------------------------------------------ morphisms

def test_odometer_morphisms():
    d = odometer()
    assert extract_morphism(d, 2).images == {"v": ("v", "v")}
    assert compose_morphisms(d, 1, 3).images == {"v": ("v",) * 4}
    assert compose_morphisms(d, 0, 2).images == {"v": (d.root,) * 4}
    with pytest.raises(ValueError):
        compose_morphisms(d, 2, 2)


def test_compose_applies_inner_first():
    inner = SadicMorphism("ab", "xy", {"a": "xy", "b": "y"})
    outer = SadicMorphism("xy", "01", {"x": "0", "y": "11"})
    assert outer.compose(inner).images == {"a": ("0", "1", "1"), "b": ("1", "1")}


def test_empty_image_rejected():
    with pytest.raises(ValueError):
        SadicMorphism("a", "x", {"a": ""})


@FAST
@given(SEEDS)
def test_composed_morphism_lists_path_starts(seed):
    d = random_diagram(random.Random(seed), max_vertices=3, max_fiber=3, max_cycle=2)
    for i in range(0, 3):
        for j in range(i + 1, i + 4):
            m = compose_morphisms(d, i, j)
            for v in d.vertices(j):
                paths = sorted((p for p in oracles.enumerate_paths(d, j, i) if p[-1][0] == v),
                               key=oracles.revlex_key)
                starts = tuple(d.fiber(i + 1, p[0][0])[p[0][1]] for p in paths)
                assert m.images[v] == starts
            # lengths are path counts, and the incidence matrix is the adjacency product
            counts = np.array([[oracles.count_paths(d, i, j, u, v) for v in d.vertices(j)]
                               for u in d.vertices(i)])
            assert (m.incidence_matrix() == counts).all()
            assert m.lengths() == {v: int(counts[:, k].sum()) for k, v in enumerate(d.vertices(j))}
            assert is_letter_surjective(m)


@FAST
@given(SEEDS)
def test_morphisms_match_telescoping(seed):
    from ordered_bratteli import telescope

    d = random_diagram(random.Random(seed), max_vertices=3, max_fiber=3, max_cycle=2)
    t = telescope(d, [1, 3], 3)
    assert extract_morphism(t, 2).images == compose_morphisms(d, 1, 3).images


# ------------------------------------------------------------ eta and rectangles

def test_eta_of_identity():
    d = load_fixture("fig7").diagrams["B"]
    for k, m in enumerate(premorphism_to_eta(identity_premorphism(d), 4)):
        assert m.images == {v: (v,) for v in d.vertices(k)}


def test_eta_of_construction():
    fx = load_fixture("counterexample")
    f, y, z = fx.premorphisms["f"], fx.paths["y"], fx.paths["z"]
    for k in range(1, 6):
        assert eta(f, k).images["new"] == (y.edge(k)[0], z.edge(k)[0])
        assert is_letter_surjective(eta(f, k))


@FAST
@given(SEEDS, st.sampled_from(SHAPES))
def test_rectangles_hold_for_valid_premorphisms(seed, shape):
    f = random_premorphism(random.Random(seed), shape)
    assert check_commuting_rectangles(f).ok


@FAST
@given(SEEDS)
def test_rectangles_localise_mutations(seed):
    rng = random.Random(seed)
    f = random_premorphism(rng, "construction")
    m = mutate(rng, f)
    if m is None:
        return
    g, n = m
    report = check_commuting_rectangles(g)
    assert not report.ok and not validate_premorphism(g).ok
    assert set(report.failed_levels) <= {n, n + 1}


# ------------------------------------------------------------ tower words and codes

def test_odometer_tower_word():
    d = odometer()
    word = tower_word(d, 1, 3, "v")
    assert [str(c) for c in word] == ["v[0]", "v[1]"] * 4
    assert tower_word(d, 0, 2, "v") == (Cylinder(d.root, ()),) * 4


@FAST
@given(SEEDS)
def test_tower_words_are_morphism_images(seed):
    d = random_diagram(random.Random(seed), max_vertices=3, max_fiber=3, max_cycle=2)
    for k in range(0, 3):
        for m in range(k + 1, k + 3):
            sigma = compose_morphisms(d, k, m)
            for v in d.vertices(m):
                word = tower_word(d, k, m, v)
                assert word == tuple(cylinder(d, p[:k]) for p in oracles.towers(d, m)[v])
                assert word == tuple(c for u in sigma.images[v] for c in tower_word(d, k, k, u))


@FAST
@given(SEEDS)
def test_cylinder_labels_round_trip(seed):
    d = random_diagram(random.Random(seed), max_vertices=3, max_fiber=3, max_cycle=2)
    for p in oracles.enumerate_paths(d, 3):
        assert cylinder_prefix(cylinder(d, p), d) == p


def test_one_block_code():
    d = odometer()
    code = one_block_code(d, 2)
    assert code([Cylinder("v", (1, 0)), Cylinder("v", (0, 1))]) == (Cylinder("v", (1,)), Cylinder("v", (0,)))
    with pytest.raises(ValueError):
        one_block_code(d, 0)


@FAST
@given(SEEDS, st.sampled_from(SHAPES))
def test_factor_code_matches_induced_table(seed, shape):
    f = random_premorphism(random.Random(seed), shape)
    for i in range(0, 4):
        code = factor_code(f, i)
        for q, p in oracles.induced_table(f, i).items():
            assert code.mapping[cylinder(f.target, q)] == cylinder(f.source, p)


# ------------------------------------------------------------ pipeline

def test_pipeline_identity():
    fx = load_fixture("fig8")
    f = identity_premorphism(fx.diagrams["B"])
    for i in (1, 2, 3):
        report = sliding_block_pipeline(f, i, 60, fx.extensions["B"], fx.extensions["B"])
        assert report.ok and report.witness is None


def test_pipeline_catches_construction():
    fx = load_fixture("counterexample")
    f = fx.premorphisms["f"]
    report = sliding_block_pipeline(f, 2, 50, fx.extensions["B"], fx.extensions["B_prime"])
    assert report.truncation_ok and not report.shift_ok
    assert report.witness["start"] == fx.paths["x"] and report.witness["position"] == 1


def test_pipeline_on_rank2_conjugacy():
    fx = load_fixture("rank2")
    out = rank2_reduce(fx.diagrams["B"], fx.extensions["B"])
    # the odometer is the target, so its coded orbits must follow the rank 2 orbits
    report = sliding_block_pipeline(out.premorphism, 2, 80, ext_B=fx.extensions["B"])
    assert report.ok


@FAST
@given(SEEDS)
def test_pipeline_truncation_always_commutes(seed):
    rng = random.Random(seed)
    f = random_premorphism(rng, "split")
    ext_B = random_extension(rng, f.source)
    ext_C = random_extension(rng, f.target)
    report = sliding_block_pipeline(f, rng.randint(1, 3), 40, ext_B, ext_C)
    assert report.truncation_ok


def test_pipeline_index_starts_at_one():
    with pytest.raises(PrefixLengthMismatch):
        sliding_block_pipeline(identity_premorphism(odometer()), 0)

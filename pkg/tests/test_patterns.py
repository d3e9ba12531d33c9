"""
Bounding patterns, merges and the generated K-user outer bounds.
"""

import logging
from fractions import Fraction as F
from itertools import permutations

import numpy as np
import pytest

from gdofkit.core.channel import ChannelMatrix, compute_deltas, random_conforming_channel
from gdofkit.core.errors import BudgetError, InvalidChannelError, InvalidPermutationError
from gdofkit.core.polytope import Polytope, contains_point, poly_equal, poly_subset
from gdofkit.core.patterns import (
    BoundingPattern,
    Combine,
    GenerationBudget,
    MergeStep,
    PatternGenerator,
    Seed,
    bound_from_pattern,
    bound_templates,
    enumerate_outer_bounds,
    explain,
    f_of_p,
    f_terms,
    generate_patterns,
    merge,
    pattern_coefficients,
    seed_patterns,
    symbolic_bound,
)
from gdofkit.core.regions import outer_region

logging.basicConfig(level=logging.INFO)

SMALL_BUDGET = GenerationBudget(depth=1, max_size=6, max_patterns=20_000, prune_every=64)


def test_merge_examples():
    print("=== Testing Merge ===")
    u = merge((1, 2, 3, 4), (4, 3, 2, 1), 2, u4_order=(3, 4, 1))
    assert u.as_tuple() == ((1, 2), (4, 3, 2), (2,), (2, 3, 4, 1)), f"Got {u.as_tuple()}"

    u = merge((1, 2, 3, 4), (4, 3, 2, 1), 2, u4_order=(1, 4, 3))
    assert u.as_tuple() == ((1, 2), (4, 3, 2), (2,), (2, 1, 4, 3)), f"Got {u.as_tuple()}"

    u = merge((1, 2, 3, 4, 5, 6, 7), (1, 2, 5, 4, 3, 6, 7), 4, u4_order=(5, 3, 6, 7))
    assert u.as_tuple() == ((1, 2, 3, 4), (1, 2, 5, 4), (4, 6, 7), (4, 5, 3, 6, 7))
    print("✅ Worked merges reproduced")


def test_merge_errors():
    with pytest.raises(InvalidPermutationError):
        merge((1, 2), (3, 4), 2)
    with pytest.raises(InvalidPermutationError):
        merge((1, 2, 3), (3, 2, 1), 2, u4_order=(1, 1))
    with pytest.raises(InvalidPermutationError):
        merge((1, 2, 3), (3, 2, 1), 2, u3_order=(1,))
    with pytest.raises(InvalidPermutationError):
        merge((1, 1, 2), (1, 2), 1)
    with pytest.raises(InvalidPermutationError):
        merge((2,), (2, 1), 2)


def test_merge_set_identities():
    rng = np.random.default_rng(17)
    perms = [p for r in range(2, 6) for p in permutations(range(1, 6), r)]
    for _ in range(300):
        p = perms[rng.integers(len(perms))]
        q = perms[rng.integers(len(perms))]
        shared = sorted(set(p) & set(q))
        if not shared:
            continue
        s = shared[rng.integers(len(shared))]
        u1, u2, u3, u4 = merge(p, q, s).as_tuple()
        p_tail, q_tail = set(p[p.index(s) + 1 :]), set(q[q.index(s) + 1 :])
        assert u1 == p[: p.index(s) + 1] and u2 == q[: q.index(s) + 1]
        assert u3[0] == s and u4[0] == s
        assert set(u3[1:]) == p_tail & q_tail, f"u3 = {u3} for {p}, {q} at {s}"
        assert set(u4[1:]) == p_tail | q_tail, f"u4 = {u4} for {p}, {q} at {s}"


def test_f_of_p(example_channel):
    assert f_terms((2, 4, 5, 6)) == ((4, 2), (5, 4), (6, 5))
    assert f_terms((5,)) == ()
    ds = compute_deltas(example_channel)
    assert f_of_p((0, 3), ds) == 1
    assert f_of_p((1, 2, 3), ds) == F(1, 2), "delta2,1 + delta3,2 = 1/5 + 3/10"
    assert f_of_p((2,), ds) == 0


def test_seeds():
    print("=== Testing Seeds ===")
    assert len(seed_patterns(2)) == 2
    assert len(seed_patterns(3)) == 12
    seed = Seed((2, 1, 3)).replay()
    assert seed.A == ((0, 2),) and seed.B == ((2, 1, 3),)
    assert pattern_coefficients(seed, 3) == (1, 1, 1)

    two = list(generate_patterns(2, GenerationBudget(depth=0)))
    assert {p.key for p in two} == {(((0, 1),), ((1, 2),)), (((0, 2),), ((2, 1),))}
    with pytest.raises(InvalidChannelError):
        PatternGenerator(1)
    print("✅ Seeds enumerated")


def test_documented_merge_pattern():
    base = Combine(Seed((3, 2, 4)), Seed((1, 2, 3))).replay()
    expected = BoundingPattern(((0, 3), (0, 1), (3, 2), (1, 2)), ((2,), (2, 3, 4)))
    found = {p.key for p in PatternGenerator(4, SMALL_BUDGET).expand(base)}
    assert expected.key in found, f"Missing {expected.render()}"

    step = MergeStep(base.derivation, (1, 2, 3), (3, 2, 4), 2, (), (3, 4))
    assert step.replay() == expected


def test_halved_sum_bound(example_channel):
    patterns = list(generate_patterns(3, SMALL_BUDGET))
    halved = [p for p in patterns if pattern_coefficients(p, 3) == (2, 2, 2)]
    assert halved, "Depth-1 merges should produce a 2d1 + 2d2 + 2d3 bound"

    ds = compute_deltas(example_channel)
    best = min(bound_from_pattern(p, ds).rhs for p in halved)
    assert best == F(16, 5), f"Expected 2 * 8/5, got {best}"


def test_derivation_replay():
    gen = PatternGenerator(3, SMALL_BUDGET)
    count = 0
    for pattern in gen:
        replayed = pattern.derivation.replay()
        assert replayed == pattern, f"{pattern.derivation.describe()} replays to {replayed.render()}"
        count += 1
    assert count == gen.emitted and not gen.truncated
    assert len({p.key for p in generate_patterns(3, SMALL_BUDGET)}) == count, "duplicates emitted"


def test_bound_from_pattern(example_channel):
    print("=== Testing Pattern Bounds ===")
    ds = compute_deltas(example_channel)
    seed = Seed((1, 2, 3)).replay()
    bound = bound_from_pattern(seed, ds)
    assert bound.coeffs == (1, 1, 1)
    assert bound.rhs == F(17, 10), f"Expected 17/10, got {bound.rhs}"
    assert symbolic_bound(seed, 3).render() == "d1 + d2 + d3 <= δ1 + δ2,1 + δ3,2"

    zero = compute_deltas(ChannelMatrix.from_rows([[0] * 3] * 3))
    assert bound_from_pattern(seed, zero).rhs == 0

    p = (1, 2, 3, 4, 5, 6, 7)
    q = (1, 2, 5, 4, 3, 6, 7)
    base = Combine(Seed(p), Seed(q))
    pattern = MergeStep(base, p, q, 4, (6, 7), (5, 3, 6, 7)).replay()
    rng = np.random.default_rng(2)
    ch = ChannelMatrix.from_rows((rng.integers(0, 9, size=(7, 7)) / 4).tolist())
    ds7 = compute_deltas(ch)
    bound = bound_from_pattern(pattern, ds7)
    u = merge(p, q, 4, (6, 7), (5, 3, 6, 7))
    assert bound.coeffs == (2,) * 7
    assert bound.rhs == 2 * ds7.delta_i[0] + sum(f_of_p(x, ds7) for x in u.as_tuple())
    print("✅ Coefficients and rhs follow the pattern")


def test_budget_errors():
    for kwargs in ({"depth": -1}, {"max_size": 1}, {"max_patterns": 0}, {"prune_every": 0}):
        with pytest.raises(BudgetError):
            GenerationBudget(**kwargs)
    with pytest.raises(InvalidChannelError):
        enumerate_outer_bounds(ChannelMatrix.from_rows([[1] * 9] * 9))

    gen = PatternGenerator(3, GenerationBudget(max_patterns=5))
    assert len(list(gen)) == 5 and gen.truncated


def test_enumeration_recovers_outer_region(example_channel):
    print("=== Testing Bound Enumeration ===")
    result = enumerate_outer_bounds(example_channel, SMALL_BUDGET)
    assert not result.truncated
    assert poly_equal(result.polytope, outer_region(example_channel)), (
        "Unexpected rows:\n" + "\n".join(result.polytope.render())
    )

    sum_bound = next(b for b in result.bounds if b.inequality().coeffs == (1, 1, 1))
    assert sum_bound.inequality().rhs == F(8, 5)
    lines = explain(sum_bound, compute_deltas(example_channel))
    assert lines[0] == sum_bound.render()
    assert any(line.strip().startswith("from merge[") for line in lines), lines

    box = next(b for b in result.bounds if b.pattern is None)
    assert explain(box)[1].strip() == box.provenance
    print("✅ Generated bounds equal the closed-form region")


def test_enumeration_soundness(test_cfg):
    rng = np.random.default_rng(test_cfg.checks.seed)
    for _ in range(test_cfg.checks.soundness_instances):
        ch = random_conforming_channel(rng, denominator=test_cfg.channel.denominator)
        result = enumerate_outer_bounds(ch, SMALL_BUDGET)
        assert poly_equal(result.polytope, outer_region(ch)), f"Mismatch for {ch.render()}"


def test_budget_monotonicity(example_channel):
    shallow = enumerate_outer_bounds(example_channel, GenerationBudget(depth=0))
    deep = enumerate_outer_bounds(example_channel, SMALL_BUDGET)
    assert poly_subset(deep.polytope, shallow.polytope)
    assert not poly_subset(shallow.polytope, deep.polytope), "Seeds alone miss the halved sum bound"

    truncated = enumerate_outer_bounds(example_channel, GenerationBudget(max_patterns=5))
    assert truncated.truncated
    assert poly_subset(outer_region(example_channel), truncated.polytope)


def test_other_user_counts():
    ch = ChannelMatrix.from_rows([[1, "1/2"], ["1/4", 1]])
    result = enumerate_outer_bounds(ch, SMALL_BUDGET)
    expected = Polytope.from_rows(
        2, [([-1, 0], 0), ([0, -1], 0), ([1, 0], 1), ([0, 1], 1), ([1, 1], "3/2")]
    )
    assert poly_equal(result.polytope, expected), "\n".join(result.polytope.render())

    zero = enumerate_outer_bounds(ChannelMatrix.from_rows([[0] * 4] * 4), GenerationBudget(depth=0))
    assert contains_point(zero.polytope, [0, 0, 0, 0])
    assert not contains_point(zero.polytope, [F(1, 10), 0, 0, 0])

    templates = bound_templates(3, SMALL_BUDGET)
    assert bound_templates(3, SMALL_BUDGET) is templates


if __name__ == "__main__":
    from gdofkit.core.factory import load_package_config

    cfg = load_package_config(config_name="test_config")
    ch = ChannelMatrix.from_rows([["6/5", "11/10", "9/10"], ["9/10", "13/10", "7/10"], ["7/10", "9/10", "1"]])
    test_merge_examples()
    test_merge_errors()
    test_merge_set_identities()
    test_f_of_p(ch)
    test_seeds()
    test_documented_merge_pattern()
    test_halved_sum_bound(ch)
    test_derivation_replay()
    test_bound_from_pattern(ch)
    test_budget_errors()
    test_enumeration_recovers_outer_region(ch)
    test_enumeration_soundness(cfg)
    test_budget_monotonicity(ch)
    test_other_user_counts()
    print("\n🎉 Pattern tests passed!")

"""
SLS schemes: parameter constraints, rate regions, splits and SINR exponents.
"""

import logging
from fractions import Fraction as F

import numpy as np
import pytest

from gdofkit.core.channel import ChannelMatrix, random_conforming_channel
from gdofkit.core.errors import ConstraintViolationError, InvalidChannelError
from gdofkit.core.polytope import Polytope, contains_point, poly_equal
from gdofkit.core.regions import achievability_verdict, build_part, outer_region
from gdofkit.core.sinr_tables import SINR_TABLES, AffineForm
from gdofkit.core.sls import (
    D123,
    F123,
    RateSplit,
    SlsParams,
    SlsScheme,
    certify_point,
    check_params,
    corner_candidates,
    full_region,
    normalize_variant,
    param_region,
    param_region_D,
    params_for_vertex,
    random_feasible_params,
    rate_split_for_point,
    sinr_exponents,
    split_caps,
    symbol_environment,
    validate_rate_split,
    violated_constraints,
)

logging.basicConfig(level=logging.INFO)

VERTEX_A_PARAMS = SlsParams(F(9, 10), F(1, 5), 0, 0)
VERTEX_A_SPLIT = RateSplit((F(1, 10), F(1, 5), F(1, 10)), F(1, 5), F(9, 10))


def test_params_validation(example_channel):
    print("=== Testing Parameter Constraints ===")
    with pytest.raises(ConstraintViolationError) as e:
        SlsParams(-1, 0, 0, 0)
    assert e.value.row == "lambda >= 0"

    check_params(example_channel, VERTEX_A_PARAMS, "D")
    with pytest.raises(ConstraintViolationError) as e:
        check_params(example_channel, SlsParams(F(1, 2), 0, 0, 0), D123)
    assert e.value.row == "alpha12 <= lambda + lambda' + gamma", f"Got {e.value.row!r}"

    failed = violated_constraints(example_channel, SlsParams.zero(), F123)
    assert len(failed) == 6, f"Every cross-link row should fail, got {[r.name for r in failed]}"

    assert normalize_variant("f") == F123
    with pytest.raises(ValueError):
        normalize_variant("G123")
    with pytest.raises(InvalidChannelError):
        check_params(ChannelMatrix.from_rows([[1, 0], [0, 1]]), SlsParams.zero(), D123)
    print("✅ First failing row is named")


def test_param_region(example_channel):
    print("=== Testing Parameter Region ===")
    region = param_region_D(example_channel, VERTEX_A_PARAMS)
    expected = Polytope.from_rows(
        3,
        [
            ([-1, 0, 0], 0),
            ([0, -1, 0], 0),
            ([0, 0, -1], 0),
            ([1, 0, 0], "1.2"),
            ([0, 1, 0], "1.3"),
            ([0, 0, 1], 1),
            ([1, 1, 0], "1.4"),
            ([1, 0, 1], "1.3"),
            ([0, 1, 1], "1.4"),
            ([1, 1, 1], "1.5"),
        ],
    )
    assert region.hrep == expected.hrep, "Unexpected rows:\n" + "\n".join(region.render())

    zero = ChannelMatrix.from_rows([[0] * 3] * 3)
    origin = param_region(zero, SlsParams.zero(), F123)
    assert contains_point(origin, [0, 0, 0])
    assert not contains_point(origin, [0, 0, F(1, 100)])
    print("✅ Region rows match")


def test_full_region_matches_closed_form(example_channel, test_cfg):
    print("=== Testing Split Elimination ===")
    assert poly_equal(
        full_region(example_channel, VERTEX_A_PARAMS, D123),
        param_region(example_channel, VERTEX_A_PARAMS, D123),
    )

    rng = np.random.default_rng(test_cfg.checks.seed)
    checked = 0
    for _ in range(test_cfg.checks.chain_instances):
        ch = random_conforming_channel(rng, denominator=test_cfg.channel.denominator)
        for variant in (D123, F123):
            params = random_feasible_params(ch, variant, rng)
            if params is None:
                continue
            assert not violated_constraints(ch, params, variant)
            assert poly_equal(full_region(ch, params, variant), param_region(ch, params, variant)), (
                f"{variant} elimination disagrees for {ch.render()} at {params.render()}"
            )
            checked += 1
    assert checked > 0
    print(f"✅ Elimination agrees on {checked} instances")


def test_rate_split(example_channel):
    print("=== Testing Rate Splits ===")
    scheme = SlsScheme("D", VERTEX_A_PARAMS, VERTEX_A_SPLIT, example_channel)
    assert scheme.variant == D123
    valid, induced = validate_rate_split(scheme)
    assert valid
    assert induced == (F(6, 5), F(1, 5), F(1, 10)), f"Got {induced}"
    assert split_caps(example_channel, VERTEX_A_PARAMS, D123) == (
        F(1, 10), F(1, 5), F(1, 10), F(1, 5), F(9, 10)
    )

    too_much = RateSplit((F(1, 10), F(1, 5), F(1, 10)), F(1, 5), 1)
    assert not validate_rate_split(SlsScheme(D123, VERTEX_A_PARAMS, too_much, example_channel))[0]

    bad_shares = RateSplit((0, 0, 0), 0, 0, mu=(F(1, 2), F(1, 3)))
    assert not validate_rate_split(SlsScheme(D123, VERTEX_A_PARAMS, bad_shares, example_channel))[0]

    valid, induced = validate_rate_split(
        SlsScheme(D123, VERTEX_A_PARAMS, RateSplit.zero(), example_channel)
    )
    assert valid and induced == (0, 0, 0)

    split = rate_split_for_point(example_channel, D123, VERTEX_A_PARAMS, ["1.2", "0.2", "0.1"])
    assert split is not None
    assert split.induced_rates() == (F(6, 5), F(1, 5), F(1, 10))
    assert rate_split_for_point(example_channel, D123, VERTEX_A_PARAMS, [2, 0, 0]) is None
    print("✅ Splits validated")


def test_sinr_exponents(example_channel):
    print("=== Testing SINR Exponents ===")
    report = sinr_exponents(SlsScheme(D123, VERTEX_A_PARAMS, VERTEX_A_SPLIT, example_channel))
    assert report.feasible, "\n".join(report.render())
    assert len(report.entries) == 8
    assert report.entry(1, "X123").exponent == F(9, 10)
    assert report.entry(1, "X12").exponent == F(1, 5)
    assert report.entry(1, "X1").exponent == F(1, 10)
    assert report.entry(3, "X3").exponent == F(1, 10)
    for e in report.entries:
        assert e.exponent == e.load, f"rx {e.receiver} {e.layer}: {e.exponent} != {e.load}"

    params = SlsParams(F(3, 10), 0, 0, F(1, 10))
    report = sinr_exponents(SlsScheme(D123, params, RateSplit.zero(), example_channel))
    assert report.entry(1, "X123").exponent == F(3, 10)

    overloaded = RateSplit((F(1, 10), F(1, 5), F(1, 10)), F(1, 5), 1)
    report = sinr_exponents(SlsScheme(D123, VERTEX_A_PARAMS, overloaded, example_channel))
    assert not report.feasible
    assert not report.entry(2, "X123").ok
    print("✅ Exponents equal the layer loads at the corner")


# every row in closed form: min over the signal exponent and signal minus each
# dominant interferer, the terms that never bind left out
SINR_CLOSED_FORMS = {
    D123: {
        (1, "X123"): lambda e: min(
            e["lam"], e["a11"] - e["gamma_p"],
            e["lam"] + e["a11"] - e["gamma_p"] - e["a12"],
            e["lam"] + e["a11"] - e["gamma_p"] - e["a13"],
        ),
        (1, "X12"): lambda e: min(
            e["lam_p"], e["a11"] - e["lam"] - e["gamma_p"],
            e["lam_p"] + e["a11"] - e["gamma_p"] - e["a12"],
            e["a11"] - e["gamma_p"] - e["a13"],
        ),
        (1, "X1"): lambda e: min(
            e["a11"] - e["lam"] - e["lam_p"] - e["gamma_p"],
            e["a11"] - e["a12"] - e["gamma_p"],
            e["a11"] - e["a13"] - e["gamma_p"] - e["lam_p"],
        ),
        (2, "X123"): lambda e: min(
            e["a22"], e["lam"],
            e["lam"] + e["a22"] + e["gamma_p"] - e["a21"],
            e["lam"] + e["a22"] - e["a23"],
        ),
        (2, "X12"): lambda e: min(
            e["lam_p"], e["a22"] - e["lam"],
            e["a22"] + e["lam_p"] + e["gamma_p"] - e["a21"],
            e["a22"] - e["a23"],
        ),
        (2, "X2"): lambda e: min(
            e["a22"] - e["lam"] - e["lam_p"],
            e["a22"] - e["a21"] + e["gamma_p"],
            e["a22"] - e["a23"] - e["lam_p"],
        ),
        (3, "X123"): lambda e: min(
            e["a33"], e["lam"],
            e["lam"] + e["a33"] + e["gamma_p"] - e["a31"],
            e["lam"] + e["a33"] - e["a32"],
        ),
        (3, "X3"): lambda e: min(
            e["a33"] - e["lam"], e["a33"] - e["a31"] + e["gamma_p"], e["a33"] - e["a32"],
        ),
    },
    F123: {
        (1, "X123"): lambda e: min(
            e["a11"], e["lam"],
            e["lam"] + e["a11"] + e["gamma_p"] - e["a12"],
            e["lam"] + e["a11"] - e["a13"],
        ),
        (1, "X12"): lambda e: min(
            e["lam_p"], e["a11"] - e["lam"],
            e["lam_p"] + e["a11"] + e["gamma_p"] - e["a12"],
            e["a11"] - e["a13"],
        ),
        (1, "X1"): lambda e: min(
            e["a11"] - e["lam"] - e["lam_p"],
            e["a11"] - e["a12"] + e["gamma_p"],
            e["a11"] - e["a13"] - e["lam_p"],
        ),
        (2, "X123"): lambda e: min(
            e["a22"] - e["gamma_p"], e["lam"],
            e["lam"] + e["a22"] - e["gamma_p"] - e["a21"],
            e["lam"] + e["a22"] - e["gamma_p"] - e["a23"],
        ),
        (2, "X12"): lambda e: min(
            e["lam_p"], e["a22"] - e["gamma_p"] - e["lam"],
            e["lam_p"] + e["a22"] - e["gamma_p"] - e["a21"],
            e["a22"] - e["gamma_p"] - e["a23"],
        ),
        (2, "X2"): lambda e: min(
            e["a22"] - e["lam"] - e["lam_p"] - e["gamma_p"],
            e["a22"] - e["a21"] - e["gamma_p"],
            e["a22"] - e["a23"] - e["lam_p"] - e["gamma_p"],
        ),
        (3, "X123"): lambda e: min(
            e["a33"], e["lam"],
            e["lam"] + e["a33"] - e["a31"],
            e["lam"] + e["a33"] + e["gamma_p"] - e["a32"],
        ),
        (3, "X3"): lambda e: min(
            e["a33"] - e["lam"], e["a33"] - e["a31"], e["a33"] - e["a32"] + e["gamma_p"],
        ),
    },
}


def test_sinr_closed_forms(example_channel):
    print("=== Testing SINR Table Rows ===")
    for variant, forms in SINR_CLOSED_FORMS.items():
        assert set(forms) == set(SINR_TABLES[variant]), f"{variant} rows: {sorted(SINR_TABLES[variant])}"

    rng = np.random.default_rng(3)
    channels = [example_channel] + [random_conforming_channel(rng) for _ in range(25)]
    for ch in channels:
        p = SlsParams(*(F(int(rng.integers(0, 17)), 16) for _ in range(4)))
        env = symbol_environment(ch, p)
        for variant, forms in SINR_CLOSED_FORMS.items():
            for key, form in forms.items():
                got = SINR_TABLES[variant][key].evaluate(env)
                assert got == form(env), (
                    f"{variant} rx{key[0]}/{key[1]} at {p.render()} on {ch.render()}: "
                    f"{got} != {form(env)}"
                )
    print("✅ All 16 table rows agree with their closed forms")

    row = SINR_TABLES[D123][(1, "X123")]
    assert row.render().startswith("min(")
    assert "λ" in row.render()
    assert AffineForm.of(1, lam=2) - AffineForm.of(lam=2) == AffineForm.of(1)


def test_corner_table(example_channel):
    print("=== Testing Corner Parameters ===")
    names = [name for name, _ in corner_candidates(example_channel)]
    assert names[0] == "A" and names[-1] == "origin"
    assert dict(corner_candidates(example_channel))["A"] == (F(9, 10), F(1, 5), 0, 0)

    vp = params_for_vertex(example_channel, ["1.2", "0.2", "0.1"], part="D123")
    assert vp is not None
    assert vp.params == VERTEX_A_PARAMS, f"Got {vp.params.render()}"
    assert vp.source == "table:A", f"Got source {vp.source}"

    assert params_for_vertex(example_channel, [-1, 0, 0]) is None
    assert params_for_vertex(example_channel, [5, 0, 0]) is None

    vp = params_for_vertex(example_channel, ["0.5", "0.2", "0.1"])
    assert vp is not None and vp.part == "F123" and vp.source == "lp"
    assert contains_point(param_region(vp.local_channel, vp.params, vp.variant), vp.local_point)
    print("✅ Table and LP both produce parameters")


def test_certify_vertices(example_channel):
    print("=== Testing Vertex Certificates ===")
    for v in outer_region(example_channel).vrep:
        cert = certify_point(example_channel, v)
        assert cert.certified, f"Vertex {v} of the outer region is not certified"

    for v in build_part(example_channel, "D123").vrep:
        cert = certify_point(example_channel, v, part="D123")
        assert cert.certified, f"Vertex {v} of D123 is not certified"
    print("✅ Every vertex is reached by an SLS scheme")


def test_certify_random_channels(test_cfg):
    rng = np.random.default_rng(test_cfg.checks.seed + 1)
    for _ in range(test_cfg.checks.vertex_instances):
        ch = random_conforming_channel(rng, denominator=test_cfg.channel.denominator)
        verdict = achievability_verdict(ch, max_workers=test_cfg.regions.max_workers)
        assert verdict.equal
        for v in verdict.outer.vrep:
            cert = certify_point(ch, v, part=verdict.matched_part)
            assert cert.certified, f"Vertex {v} of {ch.render()} is not certified"


if __name__ == "__main__":
    from gdofkit.core.factory import load_package_config

    cfg = load_package_config(config_name="test_config")
    ch = ChannelMatrix.from_rows([["6/5", "11/10", "9/10"], ["9/10", "13/10", "7/10"], ["7/10", "9/10", "1"]])
    test_params_validation(ch)
    test_param_region(ch)
    test_full_region_matches_closed_form(ch, cfg)
    test_rate_split(ch)
    test_sinr_exponents(ch)
    test_sinr_closed_forms()
    test_corner_table(ch)
    test_certify_vertices(ch)
    test_certify_random_channels(cfg)
    print("\n🎉 SLS tests passed!")

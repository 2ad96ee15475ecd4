import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from choqlab.params import (
    ALL_THEOREM_IDS,
    CRITICAL,
    LOCAL_MIN,
    MOUNTAIN_PASS,
    NONEXISTENCE,
    SUB,
    SUPER,
    ProblemParams,
    classify_regime,
    exponent_info,
    gamma_of,
    validate_params,
)


def make(N=3, alpha=1.0, **kw):
    kw.setdefault("p", 1.4)
    kw.setdefault("q", kw["p"])
    kw.setdefault("r1", 1.5)
    kw.setdefault("r2", kw["r1"])
    return ProblemParams(N=N, alpha=alpha, **kw)


class TestGamma:
    def test_known_values(self):
        assert gamma_of(make(), 2.0) == 1.0
        assert gamma_of(make(N=4, alpha=2.0, r1=1.4, r2=1.4), 1.5) == 0.0
        assert gamma_of(make(), 4.0) == 4.0

    def test_zero_at_lower_exponent(self):
        p = make(N=4, alpha=2.0)
        assert gamma_of(p, p.lower_exp) == 0.0

    @given(
        st.sampled_from([3, 4]),
        st.floats(0.1, 2.5),
        st.floats(1.0, 4.0),
        st.floats(1.0, 4.0),
    )
    def test_affine_with_slope_half_n(self, N, alpha, s, t):
        p = make(N=N, alpha=alpha)
        lhs = gamma_of(p, s) - gamma_of(p, t)
        assert lhs == pytest.approx((N / 2.0) * (s - t), rel=1e-12, abs=1e-12)

    @given(st.sampled_from([3, 4]), st.floats(0.1, 2.5))
    def test_unit_gamma_at_mass_critical_exponent(self, N, alpha):
        p = make(N=N, alpha=alpha)
        s_crit = (N + alpha + 2) / N
        assert gamma_of(p, s_crit) == pytest.approx(1.0, rel=1e-12)


class TestExponentInfo:
    def test_landmarks(self):
        info = exponent_info(make())
        assert info.mass_crit == 4.0
        assert info.mass_lower == pytest.approx(8.0 / 3.0)
        assert info.mass_upper == 8.0

    def test_gammas_match_gamma_of(self):
        p = make(p=1.4, q=1.6, r1=1.6, r2=2.5)
        info = exponent_info(p)
        assert info.gamma_p == gamma_of(p, 1.4)
        assert info.gamma_q == gamma_of(p, 1.6)
        assert info.gamma_r1 == gamma_of(p, 1.6)
        assert info.gamma_r2 == gamma_of(p, 2.5)


class TestValidate:
    def test_admissible(self):
        assert validate_params(make()) == []

    def test_low_exponent(self):
        assert "p <= (N+alpha)/N" in validate_params(make(p=1.2, q=1.4))

    def test_sum_exceeds_first_pair(self):
        bad = validate_params(make(p=1.6, q=1.6, r1=1.5, r2=1.5))
        assert "p+q > 2r1" in bad

    def test_ordering_and_positivity(self):
        assert "2r1 > 2r2" in validate_params(make(r1=2.0, r2=1.5))
        assert "beta <= 0" in validate_params(make(beta=0.0))
        assert "rho2 <= 0" in validate_params(make(rho2=-1.0))

    def test_bad_dimension_short_circuits(self):
        assert validate_params(make(N=5)) == ["N not in {3, 4}"]


# One admissible representative of each regime at N=3, alpha=1,
# where the mass-critical sum is exactly 4.
REGIME_CASES = [
    ("T1_1", dict(p=1.4, r1=1.5), (SUB, SUB, SUB), LOCAL_MIN),
    ("T1_2", dict(p=1.5, r1=2.0), (SUB, CRITICAL, CRITICAL), LOCAL_MIN),
    ("T1_3", dict(p=2.0, r1=2.0), (CRITICAL,) * 3, NONEXISTENCE),
    ("T1_4", dict(p=1.6, r1=2.5), (SUB, SUPER, SUPER), LOCAL_MIN),
    ("T1_5", dict(p=2.0, r1=2.5), (CRITICAL, SUPER, SUPER), MOUNTAIN_PASS),
    ("T1_6", dict(p=2.2, r1=2.5), (SUPER, SUPER, SUPER), MOUNTAIN_PASS),
    ("T1_7", dict(p=1.4, r1=1.5, r2=1.8), (SUB, SUB, SUB), LOCAL_MIN),
    ("T1_8", dict(p=1.4, r1=1.5, r2=2.0), (SUB, SUB, CRITICAL), LOCAL_MIN),
    ("T1_9", dict(p=1.4, r1=1.6, r2=2.5), (SUB, SUB, SUPER), LOCAL_MIN),
    ("T1_10", dict(p=1.6, r1=1.6, r2=2.5), (SUB, SUB, SUPER), LOCAL_MIN),
    ("T1_11", dict(p=1.6, r1=2.0, r2=2.5), (SUB, CRITICAL, SUPER), LOCAL_MIN),
    ("T1_12", dict(p=2.0, r1=2.0, r2=2.5), (CRITICAL, CRITICAL, SUPER), MOUNTAIN_PASS),
    ("T1_13", dict(p=1.6, r1=2.2, r2=2.5), (SUB, SUPER, SUPER), LOCAL_MIN),
    ("T1_14", dict(p=2.0, r1=2.2, r2=2.5), (CRITICAL, SUPER, SUPER), MOUNTAIN_PASS),
    ("T1_15", dict(p=2.2, r1=2.2, r2=2.5), (SUPER, SUPER, SUPER), MOUNTAIN_PASS),
]


class TestClassify:
    @pytest.mark.parametrize("tid,kw,regimes,character", REGIME_CASES)
    def test_representative(self, tid, kw, regimes, character):
        p = make(**kw)
        assert validate_params(p) == []
        rc = classify_regime(p)
        assert rc.theorem_id == tid
        assert (rc.sum_regime, rc.r1_regime, rc.r2_regime) == regimes
        assert rc.character == character

    def test_t1_9_requires_strict_sum_gap(self):
        # p+q == 2r1 with both below critical belongs to T1_10, not T1_9
        assert classify_regime(make(p=1.5, r1=1.5, r2=2.5)).theorem_id == "T1_10"
        assert classify_regime(make(p=1.45, r1=1.5, r2=2.5)).theorem_id == "T1_9"

    def test_t1_15_accepts_sum_equal_first_pair(self):
        rc = classify_regime(make(p=2.1, r1=2.1, r2=2.5))
        assert rc.theorem_id == "T1_15"

    def test_out_of_scope_below_lower_sum(self):
        rc = classify_regime(make(p=1.2, r1=1.5))
        assert rc.theorem_id == "OutOfScope"
        assert rc.side_conditions == {}

    def test_side_condition_names(self):
        rc = classify_regime(make(p=1.6, r1=2.5))
        assert set(rc.side_conditions) == {"beta_below_beta0", "kappa_below_kappa0"}
        assert all(v is None for v in rc.side_conditions.values())
        rc = classify_regime(make(p=1.5, r1=2.0))
        assert set(rc.side_conditions) == {"half_minus_a1a2_positive"}
        rc = classify_regime(make(p=1.4, r1=1.6, r2=2.5))
        assert "shape_condition_t1_9" in rc.side_conditions

    def test_notes_fire_where_expected(self):
        # At alpha=1 the alternative sum bound 8/alpha = 8 exceeds any
        # admissible p+q, so the T1_1 note always fires.
        rc = classify_regime(make(p=1.4, r1=1.5))
        assert any("alternative printed bound" in n for n in rc.notes)
        # At alpha=2.9 the alternative bound is ~4.07 and p+q=4.4 exceeds
        # it, so no discrepancy remains to report.
        p = ProblemParams(N=3, alpha=2.9, p=2.2, q=2.2, r1=2.45, r2=2.45)
        rc = classify_regime(p)
        assert rc.theorem_id == "T1_1"
        assert rc.notes == ()
        rc = classify_regime(make(p=2.2, r1=2.5))
        assert any("T1_15" in n for n in rc.notes)

    def test_json_shape(self):
        d = classify_regime(make(p=1.6, r1=2.5)).to_json_dict()
        assert d["theorem_id"] == "T1_4"
        assert d["character"] == LOCAL_MIN
        assert d["regimes"] == {"sum": SUB, "r1": SUPER, "r2": SUPER}
        assert d["side_conditions"] == {
            "beta_below_beta0": "unknown",
            "kappa_below_kappa0": "unknown",
        }


def admissible_params(draw):
    N = draw(st.sampled_from([3, 4]))
    alpha = draw(st.floats(0.2, N - 0.2))
    lo = (N + alpha) / N
    hi = (N + alpha) / (N - 2)
    r2 = draw(st.floats(lo * 1.001, hi * 0.999))
    r1 = draw(st.floats(lo * 1.001, r2))
    # p+q <= 2 r1 with both p, q admissible
    p = draw(st.floats(lo * 1.001, min(2 * r1 - lo * 1.001, hi * 0.999)))
    q_hi = min(2 * r1 - p, hi * 0.999)
    if q_hi <= lo * 1.001:
        q = lo * 1.001
    else:
        q = draw(st.floats(lo * 1.001, q_hi))
    return ProblemParams(N=N, alpha=alpha, p=p, q=q, r1=r1, r2=r2)


@settings(max_examples=300)
@given(st.builds(lambda d: d, st.composite(admissible_params)()))
def test_classification_total_and_consistent(params):
    if validate_params(params):
        return  # rounding at the strategy edges may leave the range
    rc = classify_regime(params)
    assert rc.theorem_id in ALL_THEOREM_IDS
    first_six = {f"T1_{k}" for k in range(1, 7)}
    if params.r1 == params.r2:
        assert rc.theorem_id in first_six
    else:
        assert rc.theorem_id not in first_six
    if rc.theorem_id == "T1_3":
        assert rc.character == NONEXISTENCE
    elif rc.theorem_id in {"T1_5", "T1_6", "T1_12", "T1_14", "T1_15"}:
        assert rc.character == MOUNTAIN_PASS
    else:
        assert rc.character == LOCAL_MIN
    assert math.isfinite(exponent_info(params).gamma_p)

import math

import pytest
from hypothesis import given, strategies as st

from dualirs.model import (
    LognormalVariant,
    SystemParams,
    ThresholdMode,
    Thresholds,
    db_to_linear,
    legacy_params,
    resolve_thresholds,
    validate,
)


def test_defaults_are_valid():
    p = SystemParams()
    assert validate(p) == []
    assert (p.n_elems, p.m_elems, p.eta, p.theta, p.beta, p.zeta) == (4, 4, 0.7, 0.5, 0.7, 0.3)
    assert (p.rate_main, p.rate_bs, p.a1, p.a2) == (2.0, 0.5, 0.8, 0.2)


def test_allocation_sum_violation():
    errs = validate(SystemParams(a1=0.8, a2=0.3))
    assert any(e.startswith("a1+a2 != 1") for e in errs)


def test_theta_boundary_violation():
    errs = validate(SystemParams(theta=0.0))
    assert any("theta out of (0,1)" in e for e in errs)


@pytest.mark.parametrize("field,value,fragment", [
    ("beta", 1.0, "beta"), ("eta", 0.0, "eta"), ("zeta", 1.5, "zeta"),
    ("p_s", 0.0, "p_s"), ("lambda_rc", -1.0, "lambda_rc"), ("n_elems", 0, "n_elems"),
    ("m_elems", 2.5, "m_elems"), ("rate_main", -1.0, "rate_main"),
])
def test_each_invariant_reported_by_name(field, value, fragment):
    errs = validate(SystemParams(**{field: value}))
    assert errs and any(fragment in e for e in errs)


def test_validate_collects_every_violation():
    errs = validate(SystemParams(a1=0.9, theta=1.0, beta=-0.1))
    assert len(errs) == 3


def test_second_hop_allocation_follows_first_by_default():
    assert SystemParams().hop2_alloc == (0.8, 0.2)
    assert SystemParams(b1=0.6, b2=0.4).hop2_alloc == (0.6, 0.4)
    assert validate(SystemParams(b1=0.6)) != []


finite_or_not = st.one_of(st.floats(allow_nan=True, allow_infinity=True), st.integers(-5, 5))


@given(a1=finite_or_not, theta=finite_or_not, beta=finite_or_not, p_s=finite_or_not,
       n=st.integers(-3, 40), lam=finite_or_not)
def test_validate_is_total(a1, theta, beta, p_s, n, lam):
    p = SystemParams(a1=a1, theta=theta, beta=beta, p_s=p_s, n_elems=n, lambda_sr=lam)
    errs = validate(p)
    assert isinstance(errs, list)
    assert all(isinstance(e, str) for e in errs)


def test_rate_thresholds():
    thr = resolve_thresholds(SystemParams())
    assert thr.gamma_th_d == pytest.approx(3.0, abs=1e-15)
    assert thr.gamma_th_c == pytest.approx(math.sqrt(2) - 1, abs=1e-15)


def test_explicit_thresholds_pass_through():
    p = SystemParams(threshold_mode="explicit", gamma_th_d=3.0, gamma_th_c=0.5)
    assert resolve_thresholds(p) == Thresholds(3.0, 0.5)


def test_explicit_mode_missing_threshold():
    p = SystemParams(threshold_mode=ThresholdMode.EXPLICIT, gamma_th_d=3.0)
    assert validate(p)
    with pytest.raises(ValueError):
        resolve_thresholds(p)


@given(st.floats(0.0, 10.0), st.floats(1e-6, 1.0))
def test_thresholds_strictly_increasing_in_rate(u, du):
    lo = resolve_thresholds(SystemParams(rate_main=u, rate_bs=u))
    hi = resolve_thresholds(SystemParams(rate_main=u + du, rate_bs=u + du))
    assert hi.gamma_th_d > lo.gamma_th_d
    assert hi.gamma_th_c > lo.gamma_th_c


def test_thresholds_reject_bad_values():
    with pytest.raises(ValueError):
        Thresholds(math.nan, 1.0)
    with pytest.raises(ValueError):
        Thresholds(1.0, -1.0)


def test_string_enums_are_coerced():
    p = SystemParams(lognormal_variant="as_printed")
    assert p.lognormal_variant is LognormalVariant.AS_PRINTED
    with pytest.raises(ValueError):
        SystemParams(lognormal_variant="nope")


def test_dict_round_trip_and_unknown_keys():
    p = SystemParams(n_elems=8, beta=0.3, cr_prefactor="eq21")
    assert SystemParams.from_dict(p.to_dict()) == p
    with pytest.raises(KeyError):
        SystemParams.from_dict({"bogus": 1})


def test_snr_helpers():
    p = SystemParams().with_snr_db(20.0)
    assert p.p_s == pytest.approx(100.0)
    assert p.snr_db == pytest.approx(20.0)
    assert db_to_linear(10.0) == pytest.approx(10.0)


def test_legacy_disables_backscatter():
    p = legacy_params(SystemParams())
    assert (p.beta, p.zeta) == (0.0, 0.0)
    assert p.harvest_gain == pytest.approx(0.7)

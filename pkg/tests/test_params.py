import json
import math
import warnings

import pytest
from hypothesis import given, strategies as st

from percshare.params import (
    REFERENCE_PARAMS,
    AlphaNotGreaterThanTwo,
    NoiseDominatesSignal,
    NoPercolationWarning,
    OutOfRangeGamma,
    ParameterError,
    SharingStrategy,
    SystemParams,
    db_to_linear,
)


@pytest.mark.parametrize("x_db, expected", [
    (0.0, 1.0),
    (117.0, 5.011872336272725e11),
    (-3.0, 0.5011872336272722),
])
def test_db_to_linear(x_db, expected):
    assert db_to_linear(x_db) == pytest.approx(expected, rel=1e-12)


@given(st.floats(-150, 150), st.floats(-150, 150))
def test_db_to_linear_is_a_homomorphism(a, b):
    assert db_to_linear(a + b) == pytest.approx(db_to_linear(a) * db_to_linear(b), rel=1e-12)


@given(st.floats(-150, 150), st.floats(1e-6, 10))
def test_db_to_linear_increasing(a, step):
    assert db_to_linear(a + step) > db_to_linear(a)


def test_reference_params_valid():
    p = SystemParams(13, -104, -3, 1.0, 4)
    assert p == REFERENCE_PARAMS
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert p.validate() is True
    assert p.beta_gamma == pytest.approx(0.5012, abs=1e-4)
    assert p.beta0 / p.beta == pytest.approx(1e12, rel=1e-12)


def test_alpha_two_rejected():
    with pytest.raises(AlphaNotGreaterThanTwo):
        SystemParams(13, -104, -3, 1.0, 2).validate()


@pytest.mark.parametrize("gamma", [-0.1, 1.5])
def test_gamma_range(gamma):
    with pytest.raises(OutOfRangeGamma):
        SystemParams(13, -104, -3, gamma, 4).validate()


def test_noise_dominates():
    with pytest.raises(NoiseDominatesSignal):
        SystemParams(pt_db=0, n0_db=0, beta_db=0, gamma=1, alpha=4).validate()


def test_beta_gamma_above_one_is_a_warning():
    p = SystemParams(13, -104, 6, 1.0, 4)
    with pytest.warns(NoPercolationWarning):
        assert p.validate() is False
    assert p.beta_gamma == pytest.approx(10 ** 0.6)
    assert not p.percolation_possible


def test_non_finite_rejected():
    with pytest.raises(ParameterError):
        SystemParams(pt_db=math.nan).validate()


def test_json_roundtrip(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps(REFERENCE_PARAMS.to_dict()))
    assert SystemParams.from_json(path) == REFERENCE_PARAMS
    path.write_text(json.dumps({"params": {"gamma": 0.5}, "trials": 3}))
    assert SystemParams.from_json(path).gamma == 0.5
    with pytest.raises(ParameterError):
        SystemParams.from_dict({"gamma": 1, "bogus": 2})


@pytest.mark.parametrize("text, expected", [
    ("none", SharingStrategy.NO_SHARING),
    ("Active", SharingStrategy.ACTIVE_SHARING),
    ("passive_sharing", SharingStrategy.PASSIVE_SHARING),
])
def test_strategy_parse(text, expected):
    assert SharingStrategy.parse(text) is expected
    assert SharingStrategy.parse(expected) is expected


def test_strategy_parse_unknown():
    with pytest.raises(ValueError):
        SharingStrategy.parse("roaming")

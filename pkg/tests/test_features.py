import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import two_pass_stats
from pqbench.features import (N_FEATURES, STATS, FeatureSet, apply_normalizer, describe_feature,
                              extract_feature_set, extract_features, feature_index, feature_names,
                              fit_normalizer, subband_stats)


def test_constant_vector_stats():
    np.testing.assert_allclose(subband_stats([1, 1, 1, 1]), [1, 0, 1, 4, 0, 0, math.log(4), 1],
                               rtol=1e-15)


def test_single_spike_stats():
    got = subband_stats([0, 0, 2, 0])
    np.testing.assert_allclose(got, [0.5, math.sqrt(0.75), 1, 4, 2 / math.sqrt(3), 7 / 3, 0, 2],
                               rtol=1e-14, atol=1e-15)


def test_zero_vector_stats_are_guarded():
    got = subband_stats(np.zeros(32))
    assert np.all(got == 0) and not np.signbit(got).any()


def test_empty_subband_rejected():
    with pytest.raises(ValueError):
        subband_stats([])


def test_matches_two_pass_oracle_on_random_coefficients():
    rng = np.random.default_rng(17)
    for _ in range(20):
        c = rng.normal(size=256) * rng.uniform(0.01, 1e4) + rng.normal()
        np.testing.assert_allclose(subband_stats(c), two_pass_stats(c), rtol=1e-12)


@settings(max_examples=200, deadline=None)
@given(arrays(float, st.integers(1, 64), elements=st.floats(-1e3, 1e3, allow_nan=False)))
def test_stats_always_finite_and_consistent(c):
    s = subband_stats(c)
    assert np.all(np.isfinite(s))
    mean, sd, rms, energy, _, kurt, ent, maxabs = s
    assert sd >= 0 and rms >= 0 and energy >= 0 and maxabs >= 0
    assert 0 <= ent <= math.log(len(c)) + 1e-9
    assert rms <= maxabs * (1 + 1e-12)
    assert kurt == 0 or kurt >= 1 - 1e-9  # Pearson kurtosis is at least 1


def test_feature_ordering_contract():
    names = feature_names()
    assert len(names) == N_FEATURES == 288
    assert names[0] == "f000" and names[-1] == "f287"
    assert feature_index(3, 0, 0) == 144
    assert feature_index(5, 5, 7) == 287
    assert describe_feature(feature_index(4, 2, STATS.index("kurtosis"))) == "Ib.D3.kurtosis"


def test_zero_record_gives_288_zeros():
    v = extract_features(np.zeros((6, 1000)))
    assert v.shape == (288,) and np.all(v == 0)


def test_only_ia_nonzero_fills_block_3():
    x = np.zeros((6, 1000))
    x[3] = np.random.default_rng(0).normal(size=1000)
    v = extract_features(x).reshape(6, 48)
    assert not np.delete(v, 3, axis=0).any()
    assert np.count_nonzero(v[3]) > 40


def test_extract_features_rejects_bad_shape():
    with pytest.raises(ValueError):
        extract_features(np.zeros((3, 1000)))


def test_feature_set_is_order_independent(records_by_class):
    recs = [r for rs in records_by_class.values() for r in rs[:1]]
    a = extract_feature_set(recs)
    b = extract_feature_set(recs[::-1])
    np.testing.assert_array_equal(a.values, b.values[::-1])
    assert a.values.shape == (13, 288) and np.all(np.isfinite(a.values))


def test_feature_set_rejects_ragged_arrays():
    with pytest.raises(ValueError):
        FeatureSet(np.arange(3), np.arange(2), np.zeros((3, 288)))


def test_normalizer_two_point_column():
    norm = fit_normalizer(np.array([[1.0], [3.0]]))
    assert norm.mean[0] == 2 and norm.sd[0] == 1
    np.testing.assert_array_equal(apply_normalizer(norm, [[1.0], [3.0]]), [[-1], [1]])


def test_normalizer_constant_column_is_floored():
    X = np.column_stack([np.full(5, 0.1), np.arange(5.0)])
    norm = fit_normalizer(X)
    assert norm.sd[0] == 1e-12
    assert np.all(apply_normalizer(norm, X)[:, 0] == 0)


def test_normalizer_standardizes_training_set(records_by_class):
    fs = extract_feature_set([r for rs in records_by_class.values() for r in rs])
    norm = fit_normalizer(fs.values)
    Z = apply_normalizer(norm, fs.values)
    live = norm.sd > 1e-12
    np.testing.assert_allclose(Z.mean(axis=0), 0, atol=1e-9)
    np.testing.assert_allclose(Z[:, live].std(axis=0), 1, atol=1e-9)


def test_normalizer_errors():
    with pytest.raises(ValueError):
        fit_normalizer(np.zeros((0, 4)))
    with pytest.raises(ValueError):
        apply_normalizer(fit_normalizer(np.ones((2, 4))), np.ones((2, 3)))


def test_entropy_ignores_terms_that_underflow():
    c = np.full(16, 387.0)
    c[0] = 3.74e-159  # its square is subnormal and divides to exactly zero
    got = subband_stats(c)
    assert np.all(np.isfinite(got))
    assert got[6] == pytest.approx(math.log(15), rel=1e-12)

import math

import numpy as np
import pytest

from pszsim.filter_design import SystemMatrix
from pszsim.metrics import (
    MetricSpectrum,
    MetricValue,
    acoustic_contrast,
    ipi,
    izi,
    single_point_ipi,
    third_octave_smooth,
)


def system(entries, frequency=1000.0):
    return SystemMatrix(frequency, np.asarray(entries, dtype=complex))


def test_izi_single_channel_hand_ratio():
    m = system([[1.0], [0.1]])
    result = izi(m, bz_points=(0,), dz_points=(1,), program_channels=(0,))
    assert result.corr == pytest.approx(100.0)
    assert result.uncorr == pytest.approx(100.0)
    assert result.db == pytest.approx(20.0)


def test_izi_symmetric_field_is_zero_db():
    m = system(np.ones((4, 2)))
    result = izi(m, (0, 1), (2, 3), (0, 1))
    assert result.value == pytest.approx(1.0)
    assert result.db == pytest.approx(0.0)


def test_izi_two_channel_hand_oracle():
    m = system([[1.0, 1.0], [0.0, 1.0]])
    result = izi(m, (0,), (1,), (0, 1))
    assert result.corr == pytest.approx(4.0)
    assert result.uncorr == pytest.approx(2.0)
    assert result.value == pytest.approx(2.0)


def test_ipi_single_channel_hand_ratio():
    m = system([[1.0, 0.1]])
    result = ipi(m, (0,), target_channels=(0,), interferer_channels=(1,))
    assert result.value == pytest.approx(100.0)
    assert result.db == pytest.approx(20.0)


def test_ipi_identical_programs_is_zero_db():
    col = np.array([[0.3 + 0.1j], [0.7 - 0.2j]])
    m = system(np.hstack([col, col]))
    result = ipi(m, (0, 1), (0,), (1,))
    assert result.value == pytest.approx(1.0)
    assert result.db == pytest.approx(0.0, abs=1e-12)


def test_ipi_two_channel_hand_oracle():
    m = system([[1.0, 1.0, 0.1, 0.3]])
    result = ipi(m, (0,), (0, 1), (2, 3))
    assert result.corr == pytest.approx(25.0)
    assert result.uncorr == pytest.approx(20.0)
    assert result.value == pytest.approx(20.0)


def test_single_point_ipi_is_singleton_zone():
    rng = np.random.default_rng(0)
    m = system(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    a = single_point_ipi(m, 2, (0, 1), (2, 3))
    b = ipi(m, (2,), (0, 1), (2, 3))
    assert a == b


def test_zero_interferer_gives_unbounded_sentinel():
    m = system([[1.0, 0.0]])
    result = ipi(m, (0,), (0,), (1,))
    assert result.unbounded
    assert result.db == math.inf
    assert result.value == math.inf


def test_zero_target_gives_minus_infinity_db():
    m = system([[0.0, 1.0]])
    result = ipi(m, (0,), (0,), (1,))
    assert not result.unbounded
    assert result.db == -math.inf
    assert result.value == 0.0


def test_min_contract():
    rng = np.random.default_rng(4)
    for _ in range(50):
        m = system(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
        r = izi(m, (0, 1), (2, 3), (0, 1))
        assert r.value <= r.corr and r.value <= r.uncorr
        r = ipi(m, (0, 1), (0, 1), (2, 3))
        assert r.value <= r.corr and r.value <= r.uncorr


def test_permutation_invariance():
    # index order must not matter; numpy's reduction order can shift the
    # last ulp, so compare tightly instead of bit for bit
    rng = np.random.default_rng(9)
    m = system(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    pairs = (
        (izi(m, (0, 1), (2, 3), (0, 1)), izi(m, (1, 0), (3, 2), (1, 0))),
        (ipi(m, (0, 1), (0, 1), (2, 3)), ipi(m, (1, 0), (1, 0), (3, 2))),
    )
    for a, b in pairs:
        assert a.corr == pytest.approx(b.corr, rel=1e-14)
        assert a.uncorr == pytest.approx(b.uncorr, rel=1e-14)
        assert a.value == pytest.approx(b.value, rel=1e-14)


def test_scale_invariance():
    rng = np.random.default_rng(14)
    entries = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    alpha = 0.3 - 1.7j
    a = izi(system(entries), (0, 1), (2, 3), (0, 1))
    b = izi(system(alpha * entries), (0, 1), (2, 3), (0, 1))
    assert a.value == pytest.approx(b.value, rel=1e-12)
    c = ipi(system(entries), (0, 1), (0, 1), (2, 3))
    d = ipi(system(alpha * entries), (0, 1), (0, 1), (2, 3))
    assert c.value == pytest.approx(d.value, rel=1e-12)


def test_index_validation():
    m = system(np.ones((2, 2)))
    with pytest.raises(ValueError, match="must not be empty"):
        izi(m, (), (1,), (0,))
    with pytest.raises(ValueError, match="overlap"):
        izi(m, (0,), (0,), (0,))
    with pytest.raises(ValueError, match="out of range"):
        izi(m, (0,), (5,), (0,))
    with pytest.raises(ValueError, match="overlap"):
        ipi(m, (0,), (0,), (0,))


def test_acoustic_contrast_matches_single_channel_izi():
    rng = np.random.default_rng(1)
    for _ in range(20):
        h_a = rng.standard_normal((2, 8)) + 1j * rng.standard_normal((2, 8))
        h_b = rng.standard_normal((2, 8)) + 1j * rng.standard_normal((2, 8))
        q = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        m = system(np.vstack([h_a @ q, h_b @ q]).reshape(4, 1))
        contrast = acoustic_contrast(h_a, h_b, q)
        r = izi(m, (0, 1), (2, 3), (0,))
        assert r.corr == pytest.approx(contrast, rel=1e-12)
        assert r.uncorr == pytest.approx(contrast, rel=1e-12)


def test_acoustic_contrast_identical_zones():
    rng = np.random.default_rng(2)
    h = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
    q = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    assert acoustic_contrast(h, h, q) == pytest.approx(1.0, rel=1e-14)


def test_acoustic_contrast_brute_force_pressures():
    rng = np.random.default_rng(7)
    h_a = rng.standard_normal((2, 8)) + 1j * rng.standard_normal((2, 8))
    h_b = rng.standard_normal((3, 8)) + 1j * rng.standard_normal((3, 8))
    q = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    num = sum(abs(sum(h_a[k, l] * q[l] for l in range(8))) ** 2 for k in range(2)) / 2
    den = sum(abs(sum(h_b[k, l] * q[l] for l in range(8))) ** 2 for k in range(3)) / 3
    assert acoustic_contrast(h_a, h_b, q) == pytest.approx(num / den, rel=1e-12)


def spectrum_from_db(freqs, dbs, label="IZI_A"):
    values = tuple(
        MetricValue.from_ratios(f, 10 ** (db / 10), 10 ** (db / 10))
        for f, db in zip(freqs, dbs)
    )
    return MetricSpectrum(label, values)


def test_spectrum_requires_increasing_frequencies():
    with pytest.raises(ValueError, match="increasing"):
        spectrum_from_db([100.0, 100.0], [0.0, 0.0])


def test_smoothing_leaves_constant_spectrum_unchanged():
    freqs = 100.0 * 2 ** (np.arange(40) / 12)
    s = spectrum_from_db(freqs, np.full(40, 17.0))
    out = third_octave_smooth(s)
    assert np.allclose(out.db(), 17.0, atol=1e-12)
    assert out.label == s.label
    assert np.array_equal(out.frequencies(), s.frequencies())


def test_smoothing_spreads_and_reduces_a_spike():
    freqs = 100.0 * 2 ** (np.arange(49) / 12)
    dbs = np.zeros(49)
    dbs[24] = 30.0
    out = third_octave_smooth(spectrum_from_db(freqs, dbs)).db()
    assert out[24] < 30.0
    assert out[22] > 0.0 and out[26] > 0.0  # energy spread into the window
    assert out[0] == pytest.approx(0.0, abs=1e-12)  # far bins untouched


def test_smoothing_matches_windowed_mean_oracle():
    rng = np.random.default_rng(11)
    freqs = 100.0 * 2 ** (np.arange(97) / 24)
    dbs = rng.uniform(-10.0, 40.0, size=97)
    out = third_octave_smooth(spectrum_from_db(freqs, dbs)).db()
    half = 2 ** (1 / 6)
    for i, f in enumerate(freqs):
        members = [d for fj, d in zip(freqs, dbs) if f / half <= fj <= f * half]
        assert out[i] == pytest.approx(sum(members) / len(members), rel=1e-12)


def test_smoothing_keeps_min_contract():
    freqs = 100.0 * 2 ** (np.arange(20) / 12)
    rng = np.random.default_rng(12)
    dbs = rng.uniform(0, 30, size=20)
    out = third_octave_smooth(spectrum_from_db(freqs, dbs))
    for v in out.values:
        assert v.value == v.corr == v.uncorr
        assert v.db == pytest.approx(10 * math.log10(v.value), rel=1e-12)


def test_metric_value_from_ratios():
    v = MetricValue.from_ratios(1000.0, corr=4.0, uncorr=2.0)
    assert v.value == 2.0
    assert v.db == pytest.approx(10 * math.log10(2.0))
    assert not v.unbounded
    w = MetricValue.from_ratios(1000.0, corr=math.inf, uncorr=math.inf)
    assert w.unbounded and w.db == math.inf

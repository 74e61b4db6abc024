import math

import numpy as np
import pytest
from scipy import stats

from untainted.channels import CLAMP, ChannelModel, parse_channel, parse_sweep, sample_llr, snr_to_sigma


def rng(seed=0):
    return np.random.default_rng(seed)


def test_degenerate_is_zero():
    ch = ChannelModel.degenerate()
    r = rng()
    assert sample_llr(ch, 0, r) == 0.0
    assert sample_llr(ch, 1, r) == 0.0


def test_bsc_llr_value():
    ch = ChannelModel.bsc(0.11)
    assert ch.bsc_llr == pytest.approx(math.log(0.89 / 0.11))
    assert ch.bsc_llr == pytest.approx(2.0907, abs=1e-4)
    vals = ch.sample(np.zeros(10000, dtype=int), rng())
    assert set(np.unique(vals)) == {ch.bsc_llr, -ch.bsc_llr}


def test_bsc_extremes_clamped():
    assert ChannelModel.bsc(0.0).bsc_llr == CLAMP
    assert np.all(ChannelModel.bsc(0.0).sample(np.zeros(5, int), rng()) == CLAMP)
    assert np.all(ChannelModel.bsc(1.0).sample(np.zeros(5, int), rng()) == -CLAMP)


def test_bec_values():
    assert np.all(ChannelModel.bec(1.0).sample(np.zeros(100, int), rng()) == 0.0)
    vals = ChannelModel.bec(0.3).sample(np.array([0, 1] * 500), rng())
    assert set(np.unique(vals)) <= {0.0, CLAMP, -CLAMP}
    vals = ChannelModel.bec(0.0).sample(np.ones(10, int), rng())
    assert np.all(vals == -CLAMP)


@pytest.mark.parametrize("ch", [ChannelModel.bec(0.3), ChannelModel.bsc(0.07), ChannelModel.awgn(0.8)])
def test_symmetry(ch):
    a = ch.sample(np.zeros(20000, int), rng(1))
    b = ch.sample(np.ones(20000, int), rng(2))
    assert stats.ks_2samp(a, -b).pvalue > 1e-3


def test_sample_zero_matches_sample():
    for ch in (ChannelModel.bec(0.3), ChannelModel.bsc(0.07), ChannelModel.awgn(0.8)):
        a = ch.sample_zero((50000,), rng(3))
        b = ch.sample(np.zeros(50000, int), rng(4))
        assert stats.ks_2samp(a, b).pvalue > 1e-3


def test_awgn_mean():
    sigma = 0.8
    x = ChannelModel.awgn(sigma).sample(np.zeros(200000, int), rng(5))
    se = x.std() / math.sqrt(x.size)
    assert abs(x.mean() - 2 / sigma**2) < 4 * se


def test_snr_to_sigma():
    assert snr_to_sigma(0.0, 1.0) ** 2 == pytest.approx(0.5)
    assert snr_to_sigma(60.0, 0.5) < 1e-2
    assert snr_to_sigma(2.0, 0.25) ** 2 == pytest.approx(2 * snr_to_sigma(2.0, 0.5) ** 2)
    assert snr_to_sigma(3.0, 0.5, "esn0") == snr_to_sigma(3.0, 1.0)
    with pytest.raises(ValueError):
        snr_to_sigma(1.0, 0.0)


def test_parse_channel():
    assert parse_channel("bec:0.05") == ChannelModel("bec", 0.05, "0.05")
    assert parse_channel("bsc:0.07").param == 0.07
    assert parse_channel("degenerate").kind == "degenerate"
    ch = parse_channel("awgn:1.2dB", rate=0.5)
    assert ch.param == pytest.approx(snr_to_sigma(1.2, 0.5))
    assert ch.label == "1.2dB"
    for bad in ("bec", "bec:x", "bec:1.5", "foo:1", "bsc:0.1dB"):
        with pytest.raises(ValueError):
            parse_channel(bad, rate=0.5)
    with pytest.raises(ValueError):
        parse_channel("awgn:1dB")


def test_parse_sweep():
    assert parse_sweep("bec:0.3:0.4:0.05") == ["bec:0.3", "bec:0.35", "bec:0.4"]
    assert parse_sweep("bsc:0.04, bsc:0.05") == ["bsc:0.04", "bsc:0.05"]
    assert parse_sweep("awgn:1:2:0.5dB") == ["awgn:1dB", "awgn:1.5dB", "awgn:2dB"]
    with pytest.raises(ValueError):
        parse_sweep("  ")

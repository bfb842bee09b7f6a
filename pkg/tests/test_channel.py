import numpy as np
import pytest

from modemlab import channel, rng


def test_oversample_identity_and_repeat():
    assert np.array_equal(channel.oversample(1 + 0j, 1), np.array([1 + 0j]))
    s = 0.3 - 0.7j
    out = channel.oversample(s, 10)
    assert out.shape == (10,)
    assert (out == s).all()
    assert np.sum(np.abs(out) ** 2) == pytest.approx(10 * abs(s) ** 2)
    with pytest.raises(ValueError):
        channel.oversample(s, 0)


def test_sigma2_for_demod_examples():
    assert channel.sigma2_for_demod(10.0, 2, 10, 1.0) == pytest.approx(0.5)
    assert channel.sigma2_for_demod(0.0, 1, 1, 1.0) == pytest.approx(1.0)
    ratio = (channel.sigma2_for_demod(10.0, 2, 10, 1.0)
             / channel.sigma2_for_demod(0.0, 2, 10, 1.0))
    assert ratio == pytest.approx(0.1)


def test_sigma2_for_decode_examples():
    assert channel.sigma2_for_decode(0.0, 4, 8, 1.0) == pytest.approx(1.0)
    assert channel.sigma2_for_decode(10 * np.log10(2.0), 4, 8, 1.0) == pytest.approx(0.5)
    # rate 0.5 collapses to P2 / linear-snr
    for db in (0.0, 3.0, 7.5):
        assert channel.sigma2_for_decode(db, 3, 6, 2.0) == pytest.approx(
            2.0 / 10 ** (db / 10))


def test_noise_free_pass_through():
    x = np.array([1 + 1j, -2j])
    assert np.array_equal(channel.add_awgn_complex(x, 0.0, 1), x)
    xr = np.array([1.0, -2.0])
    assert np.array_equal(channel.add_awgn_real(xr, 0.0, 1), xr)


def test_negative_variance_rejected():
    with pytest.raises(ValueError):
        channel.add_awgn_complex(np.zeros(2, complex), -0.1, 1)
    with pytest.raises(ValueError):
        channel.add_awgn_real(np.zeros(2), -0.1, 1)


def test_seed_determinism_and_stream_independence():
    x = np.zeros(100, complex)
    a = channel.add_awgn_complex(x, 1.0, 42)
    b = channel.add_awgn_complex(x, 1.0, 42)
    c = channel.add_awgn_complex(x, 1.0, 43)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_complex_noise_monte_carlo():
    n = 10 ** 6
    gen = rng.stream(7, rng.ROLE_TEST)
    nu = channel.add_awgn_complex(np.zeros(n, complex), 2.0, gen)
    var = np.mean(np.abs(nu) ** 2)
    assert 2.0 * 0.99 < var < 2.0 * 1.01
    # circular symmetry: Re/Im uncorrelated within 3 standard errors
    corr = np.mean(nu.real * nu.imag)
    se = np.std(nu.real * nu.imag) / np.sqrt(n)
    assert abs(corr) < 3 * se


def test_real_noise_monte_carlo():
    n = 10 ** 6
    gen = rng.stream(8, rng.ROLE_TEST)
    nu = channel.add_awgn_real(np.zeros(n), 0.7, gen)
    var = np.mean(nu ** 2)
    assert 0.7 * 0.99 < var < 0.7 * 1.01
    assert abs(nu.mean()) < 3 * np.sqrt(0.7) / 1000


def test_normality_kurtosis():
    n = 10 ** 6
    gen = rng.stream(9, rng.ROLE_TEST)
    z = rng.normal(gen, n)
    kurt = np.mean(z ** 4) / np.mean(z ** 2) ** 2
    assert abs(kurt - 3.0) < 0.05

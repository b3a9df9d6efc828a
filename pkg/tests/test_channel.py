import numpy as np
import pytest
from scipy import stats

from ris_im.channel import path_loss, realize, sample_rician, to_csv
from ris_im.params import SystemConfig

# Frozen from 30-digit mpmath evaluation of zeta0 * d**-kappa.
L_H_20M = 1.37320067913264719e-06
L_F_50M = 1.74937931830924489e-08


def test_path_loss_reference_distance():
    assert path_loss(1e-3, 1, 2.2) == pytest.approx(1e-3, rel=1e-15)


@pytest.mark.parametrize("d, kappa, expected", [(20, 2.2, L_H_20M), (50, 2.8, L_F_50M)])
def test_path_loss_values(d, kappa, expected):
    assert path_loss(1e-3, d, kappa) == pytest.approx(expected, rel=1e-13)


def test_path_loss_rejects_short_distance():
    with pytest.raises(ValueError):
        path_loss(1e-3, 0.5, 2.0)


@pytest.mark.parametrize("K", [0.0, 1.0, 10.0, 1e4])
def test_rician_unit_power(K, rng):
    x = sample_rician(K, rng, 1_000_000)
    p = np.abs(x) ** 2
    se = p.std() / np.sqrt(p.size)
    assert abs(p.mean() - 1.0) < 3 * se
    assert abs(p.mean() - 1.0) < 0.01


def test_rician_rejects_negative_k(rng):
    with pytest.raises(ValueError):
        sample_rician(-1.0, rng)


def test_rayleigh_phase_uniform(rng):
    x = sample_rician(0.0, rng, 100_000)
    u = np.mod(np.angle(x), 2 * np.pi) / (2 * np.pi)
    assert stats.kstest(u, "uniform").pvalue > 0.01


def test_realize_shapes_and_power(rng):
    cfg = SystemConfig(num_groups=2, elements_per_group=128)
    real = realize(cfg, rng, trials=4000)
    assert real.h.shape == real.f.shape == (4000, 2, 128)
    assert np.all(np.isfinite(real.h)) and np.all(np.isfinite(real.f))
    for coeff, L in ((real.h, L_H_20M), (real.f, L_F_50M)):
        p = np.abs(coeff.ravel()) ** 2
        se = p.std() / np.sqrt(p.size)
        assert abs(p.mean() - L) < 3 * se


def test_entries_uncorrelated(rng):
    cfg = SystemConfig(num_groups=2, elements_per_group=128)
    real = realize(cfg, rng, trials=4000)
    hb = real.h / np.sqrt(real.L_h)
    a, b = hb[..., :-1].ravel(), hb[..., 1:].ravel()
    assert abs(np.mean(a * np.conj(b))) < 0.01
    g1, g2 = hb[:, 0, :].ravel(), hb[:, 1, :].ravel()
    assert abs(np.mean(g1 * np.conj(g2))) < 0.01
    fb = real.f / np.sqrt(real.L_f)
    assert abs(np.mean(hb.ravel() * np.conj(fb.ravel()))) < 0.01


def test_realize_single_and_seeded():
    cfg = SystemConfig(num_groups=3, elements_per_group=5, k_h=10.0)
    a = realize(cfg, np.random.default_rng(7))
    b = realize(cfg, np.random.default_rng(7))
    assert a.h.shape == (3, 5)
    np.testing.assert_array_equal(a.h, b.h)
    np.testing.assert_array_equal(a.f, b.f)


def test_csv_dump():
    cfg = SystemConfig(num_groups=2, elements_per_group=3)
    real = realize(cfg, np.random.default_rng(1))
    lines = to_csv(real).splitlines()
    assert lines[0] == "g,i,re_h,im_h,re_f,im_f"
    assert len(lines) == 7
    g, i, reh, imh, ref, imf = lines[-1].split(",")
    assert (g, i) == ("2", "3")
    assert complex(float(reh), float(imh)) == real.h[1, 2]
    assert complex(float(ref), float(imf)) == real.f[1, 2]

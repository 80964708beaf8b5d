"""Smoke tests for the python bindings."""

import json

import numpy as np
import pytest

import rirdenoise as rd


@pytest.fixture(scope="module")
def noisy():
    spec = json.loads(rd.default_modal_spec())
    spec["length"] = 1 << 15
    clean = rd.gen_modal(json.dumps(spec))
    noise = rd.gen_shaped_noise(len(clean), 48000.0, seed=7)
    return clean, rd.mix_at_snr(clean, noise, 48000.0, 20.0)


def small_config():
    cfg = json.loads(rd.default_config())
    cfg["levels"] = 6
    return json.dumps(cfg)


def test_version():
    assert rd.__version__ == "0.1.0"


def test_decompose_reconstruct_roundtrip():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(4096)
    details, approx = rd.decompose(x, 48000.0, "db4", 4, "periodic")
    assert len(details) == 4
    assert len(approx) == 4096 // 16
    y = rd.reconstruct(details, approx, 48000.0, "db4", len(x))
    assert np.max(np.abs(x - y)) < 1e-9


def test_denoise_shapes_and_determinism(noisy):
    _, x = noisy
    out1, report1 = rd.denoise(x, 48000.0, small_config())
    out2, _ = rd.denoise(x, 48000.0, small_config())
    assert out1.shape == x.shape
    assert np.array_equal(out1, out2)
    report = json.loads(report1)
    assert report["dl"]["iterations_run"] >= 1
    assert [t["stage"] for t in report["timings"]][0] == "dwt"


def test_baseline_differs_only_in_low_band(noisy):
    _, x = noisy
    proposed, _ = rd.denoise(x, 48000.0, small_config())
    baseline, report = rd.denoise_baseline(x, 48000.0, small_config())
    assert baseline.shape == proposed.shape
    assert json.loads(report)["dl_enabled"] is False


def test_edc_and_dt60(noisy):
    clean, _ = noisy
    edc = rd.schroeder_edc(clean, 48000.0)
    assert edc[0] == 0.0
    assert np.all(np.diff(edc) <= 1e-12)
    dt60, r2 = rd.estimate_dt60(edc, 48000.0)
    assert dt60 > 0.0
    assert 0.0 <= r2 <= 1.0


def test_exact_mode_dt60():
    assert rd.exact_mode_dt60(6.9078e-4, 1000.0) == pytest.approx(10.0, rel=1e-4)


def test_mix_at_snr_is_exact(noisy):
    clean, _ = noisy
    noise = rd.gen_shaped_noise(len(clean), 48000.0, seed=9)
    mixed = rd.mix_at_snr(clean, noise, 48000.0, 30.0)
    delta = mixed - clean
    measured = 10.0 * np.log10((clean**2).sum() / (delta**2).sum())
    assert measured == pytest.approx(30.0, abs=1e-6)


def test_fit_envelope_flags():
    n = np.arange(1 << 14)
    env = 1.0 * np.exp(-5e-4 * n) + 0.01
    model = rd.fit_envelope(env, 1000.0)
    assert model["x2"] == pytest.approx(5e-4, rel=0.2)
    assert not model["no_decay_detected"]


def test_invalid_input_raises():
    with pytest.raises(ValueError):
        rd.decompose(np.zeros(0), 48000.0, "db4", 4, "periodic")
    with pytest.raises(ValueError):
        rd.denoise(np.zeros(1 << 14), 48000.0, small_config())

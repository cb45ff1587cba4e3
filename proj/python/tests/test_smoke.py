import numpy as np
import pytest

import fastjd


def default_burst(seed=3, snr_db=10.0):
    cfg = fastjd.SlotConfig()
    codes = fastjd.generate_codes(cfg.sf, cfg.k, 0x5EED)
    mid = fastjd.make_midamble(11)
    real = fastjd.realize(fastjd.make_profile("case1"), cfg, seed=seed)
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=2 * 2 * cfg.k * cfg.n_s).astype(np.uint8)
    frame = np.asarray(fastjd.qpsk_modulate(bits.tolist()))
    chips = fastjd.spread_and_assemble(frame, codes, mid, cfg)
    rx = fastjd.propagate(chips, real, cfg, snr_db, seed + 100)
    return cfg, codes, mid, real, rx, frame


def test_codes_unit_modulus():
    codes = fastjd.generate_codes(16, 8, 1).codes
    assert codes.shape == (16, 8)
    np.testing.assert_allclose(np.abs(codes), 1.0)


def test_detect_matches_oracle_in_interior():
    cfg, codes, mid, real, rx, _ = default_burst()
    res, ops = fastjd.detect(rx.r, 0, mid, real, codes, rx.sigma2, cfg)
    tb = fastjd.build_transfer_blocks(real.h, codes, cfg)
    win = fastjd.extend_window(rx.r, 0, mid, real, cfg)
    ref = fastjd.dense_mmse_oracle(tb, win.r, cfg.n_s, rx.sigma2)
    lo, hi = cfg.l * cfg.k, (cfg.n_s - cfg.l) * cfg.k
    err = np.linalg.norm(res.soft[lo:hi] - ref[lo:hi]) / np.linalg.norm(ref[lo:hi])
    assert err < 1e-2
    assert ops["bin_factor"] > 0
    assert len(res.user_bits) == cfg.k


def test_noiseless_detection_recovers_symbols():
    cfg, codes, mid, real, rx, frame = default_burst(snr_db=float("inf"))
    res, _ = fastjd.detect(rx.r, 0, mid, real, codes, 1e-9, cfg, fastjd.JdfftOptions(p=64))
    sent = frame[: cfg.k * cfg.n_s]
    assert np.mean(np.sign(res.soft.real) == np.sign(sent.real)) == 1.0


def test_baselines_agree_with_full_cholesky():
    cfg, codes, mid, real, rx, _ = default_burst()
    tb = fastjd.build_transfer_blocks(real.h, codes, cfg)
    win = fastjd.extend_window(rx.r, 1, mid, real, cfg)
    bands = fastjd.correlation_bands(tb, rx.sigma2)
    v = fastjd.matched_filter(tb, win.r, cfg.n_s)
    full = fastjd.jd_chol(bands, v, cfg.n_s, cfg.n_s)
    ref = fastjd.dense_mmse_oracle(tb, win.r, cfg.n_s, rx.sigma2)
    np.testing.assert_allclose(full, ref, rtol=0, atol=1e-9 * np.abs(ref).max())
    model = fastjd.make_chip_model(real.h, codes, rx.sigma2)
    assert fastjd.sd_fft(model, win.r, cfg.n_s).shape == (cfg.k * cfg.n_s,)
    assert fastjd.sd_chol(model, win.r, cfg.n_s).shape == (cfg.k * cfg.n_s,)


def test_mrops_report():
    rep = fastjd.mrops(fastjd.SlotConfig(), "jdfft")
    assert rep.total() == pytest.approx(sum(e.mrops() for e in rep.entries))
    assert rep.entry("Calculating F(d)_k") == pytest.approx(3.1232, abs=1e-4)


def test_small_scenario_and_pairing():
    sc = fastjd.ScenarioConfig()
    sc.n_slots = 4
    sc.snr_grid = [8.0]
    sc.detectors = ["jdfft", "jdchol", "mf"]
    curve = fastjd.run_scenario(sc)
    assert len(curve.points) == 3
    mf = curve.point("mf", 8.0)
    assert 0.0 <= mf.ber() <= 0.5
    lo, hi = fastjd.clopper_pearson(mf.errors, mf.bits)
    assert lo <= mf.ber() <= hi
    d = fastjd.paired_difference(curve, "mf", "jdchol", 6.0, 12.0)
    assert d.n == 4


def test_config_errors_raise_value_error():
    with pytest.raises(fastjd.ConfigError):
        fastjd.parse_scenario("[slot]\nbogus = 1\n")
    with pytest.raises(ValueError):
        fastjd.make_profile("nope")


def test_selftest_green():
    assert all(c.passed for c in fastjd.run_selftest())

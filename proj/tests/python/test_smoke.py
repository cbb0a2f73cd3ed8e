import math

import pytest

import udnsim


def test_preset_and_normalize():
    cfg = udnsim.preset("fig4a", "lte50")
    assert cfg["lambda_bs"] == 50
    assert cfg["rho_ue"] == 300
    assert udnsim.normalize({"lambda_bs": 250})["lambda_bs"] == 250


def test_bad_config_raises():
    with pytest.raises(udnsim.ConfigError):
        udnsim.normalize({"gamma": -1.0})
    with pytest.raises(ValueError):
        udnsim.normalize({"no_such_key": 1})


def test_scan_is_reproducible():
    cfg = dict(udnsim.preset("fig2b", "lte50"), resolution=4, trials=50, seed=42)
    a = udnsim.scan(cfg, workers=1)
    b = udnsim.scan(cfg, workers=2)
    assert a.resolution == 4
    assert len(a.values) == 16
    assert list(a.values) == list(b.values)
    assert a.to_csv() == b.to_csv()
    assert a.to_png()[:4] == b"\x89PNG"
    assert 0.0 <= a.mean() <= 1.0
    assert all(v == 0.0 for v in udnsim.diff(a, b))


def test_custom_layout():
    cfg = dict(udnsim.preset("fig2d", "lte50"), resolution=3, trials=20)
    bs = udnsim.deployment(cfg)
    assert len(bs) == 113
    same = udnsim.scan(cfg, workers=1, bs=bs)
    assert list(same.values) == list(udnsim.scan(cfg, workers=1).values)


def test_channel_helpers():
    assert udnsim.los_probability("bs_ue", 0.01) == pytest.approx(1 - 5 * math.exp(-15.6), rel=1e-9)
    assert udnsim.los_probability("bs_ue", 0.1) == pytest.approx(5 * math.exp(-10 / 3), rel=1e-9)
    assert udnsim.los_probability("ue_ue", 0.06) == 0.0
    assert udnsim.path_loss_db("3gpp", "bs_ue", True, 0.1) == pytest.approx(82.9, rel=1e-12)
    assert udnsim.path_loss_db("single", "ue_ue", False, 0.1) == pytest.approx(107.9, rel=1e-12)


def test_colorize():
    assert udnsim.colorize(0.0) == (0, 0, 255)
    assert udnsim.colorize(1.0) == (255, 0, 0)
    assert udnsim.colorize(0.5) == (128, 0, 128)
    with pytest.raises(ValueError):
        udnsim.colorize(1.5)

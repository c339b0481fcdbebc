import math

import numpy as np
import pytest

import skelfuse as sf

TEMPLATE = "pick up leg|pick up|leg|reach_lift|carry"


def person(x=100.0, y=100.0, wrists=((90.0, 120.0), (110.0, 120.0))):
    p = np.zeros((17, 3))
    p[:, 0] = x + np.arange(17)
    p[:, 1] = y + np.arange(17)
    p[:, 2] = 0.9
    p[9, :2] = wrists[0]
    p[10, :2] = wrists[1]
    return p


def square(cx, cy, half=2):
    xs, ys = np.meshgrid(np.arange(cx - half, cx + half + 1), np.arange(cy - half, cy + half + 1))
    return np.stack([xs.ravel(), ys.ravel()], axis=1).astype(np.int32)


def test_manifest_names():
    assert len(sf.channel_manifest()) == 24
    assert len(sf.VERBS) == 12
    assert sf.channel_manifest()[0] == sf.JOINT_NAMES[0]


def test_normalize_coord_matches_formula():
    n = sf.Normalizer(-10.0, 630.0)
    for v in np.linspace(-50, 700, 97):
        u = 255.0 * (v - n.c_min) / (n.c_max - n.c_min)
        u = min(max(u, 0.0), 255.0)
        assert sf.normalize_coord(float(v), n) == math.floor(u + 0.5)


def test_normalizer_rejects_empty_range():
    with pytest.raises(sf.ValidationError):
        sf.Normalizer(3.0, 3.0)


def test_mask_centroid_and_rle_roundtrip():
    rng = np.random.default_rng(0)
    px = np.unique(rng.integers(0, 40, size=(50, 2)), axis=0).astype(np.int32)
    cx, cy = sf.mask_centroid(px)
    assert cx == pytest.approx(px[:, 0].mean(), abs=1e-12)
    assert cy == pytest.approx(px[:, 1].mean(), abs=1e-12)
    back = sf.decode_rle(sf.encode_rle(px))
    assert {tuple(p) for p in back} == {tuple(p) for p in px}


def test_gaussian_heatmap_peak_and_window():
    hm = sf.gaussian_heatmap(np.array([[5.0, 7.0, 0.8]]), 16, 16, 1.0)
    assert hm.shape == (16, 16)
    assert hm[7, 5] == pytest.approx(0.8)
    assert hm[7, 6] == pytest.approx(0.8 * math.exp(-0.5))
    # Radius is ceil(3 sigma) + 1 = 4.
    assert hm[7, 9] > 0.0
    assert hm[7, 10] == 0.0


def test_temporal_sampling():
    assert sf.temporal_sample_indices(10, 4) == [0, 2, 5, 7]
    assert sf.temporal_sample_indices(3, 6) == [0, 0, 1, 1, 2, 2]


def test_select_most_relevant_prefers_near_wrists():
    near = sf.ObjectInstance("leg", 0.5, square(100, 125))
    far = sf.ObjectInstance("leg", 0.99, square(400, 400))
    pts = sf.select_most_relevant([far, near], person()[None])
    leg = next(p for p in pts if p["object_class"] == "leg")
    assert leg["present"]
    assert (leg["x"], leg["y"]) == (100.0, 125.0)
    assert leg["score"] == 0.5
    assert sum(p["present"] for p in pts) == 1


def test_filter_is_strict():
    a = sf.ObjectInstance("leg", 0.1, square(5, 5))
    b = sf.ObjectInstance("leg", 0.11, square(5, 5))
    kept = sf.filter_by_score([a, b], 0.1)
    assert [d.score for d in kept] == [0.11]


def test_encode_image_of_handmade_clip():
    frames = [person(100.0 + t, 100.0)[None] for t in range(5)]
    dets = [[sf.ObjectInstance("leg", 0.9, square(100, 125))] for _ in range(5)]
    clip = sf.make_clip(frames, dets)
    assert len(clip) == 5
    n = sf.Normalizer(0.0, 640.0)
    img = sf.encode_clip_image(clip, n)
    assert img.shape == (24, 5, 3) and img.dtype == np.uint8
    for t in range(5):
        for j in range(17):
            x, y, _ = frames[t][0, j]
            assert img[j, t, 0] == max(sf.normalize_coord(x, n), 1)
            assert img[j, t, 1] == max(sf.normalize_coord(y, n), 1)
    assert (img[:, :, 2] == 0).all()
    leg_row = sf.channel_manifest().index("leg")
    assert (img[leg_row, :, 0] == sf.normalize_coord(100.0, n)).all()
    assert (img[leg_row, :, 1] == sf.normalize_coord(125.0, n)).all()
    others = [r for r in range(17, 24) if r != leg_row]
    assert not img[others].any()
    skel_only = sf.encode_clip_image(clip, n, with_objects=False)
    assert not skel_only[17:].any()


def test_heatmap_volume_roundtrip(tmp_path):
    clip = sf.generate_clip(TEMPLATE, 7)
    vol = sf.encode_clip_heatmaps(clip, t_target=8, height=20, width=20)
    assert vol.shape == (24, 8, 20, 20) and vol.dtype == np.float32
    assert vol.max() <= 1.0 and vol.min() >= 0.0
    assert vol[:17].max() > 0.0 and vol[17:].max() > 0.0
    path = tmp_path / "v.hmv"
    sf.write_volume(vol, path)
    raw = path.read_bytes()
    assert raw[:4] == b"HMV1"
    assert np.frombuffer(raw[4:20], dtype="<u4").tolist() == [24, 8, 20, 20]
    assert np.array_equal(np.frombuffer(raw[20:], dtype="<f4").reshape(vol.shape), vol)
    assert np.array_equal(sf.read_volume(path), vol)


def test_generator_is_deterministic():
    a = sf.generate_clip(TEMPLATE, 11)
    b = sf.generate_clip(TEMPLATE, 11)
    c = sf.generate_clip(TEMPLATE, 12)
    assert a == b
    assert not a == c
    assert 24 <= len(a) <= 40


def test_verbs_and_metrics():
    assert sf.verb_of("pick up leg") == sorted(sf.VERBS).index("pick up")
    with pytest.raises(sf.LookupError):
        sf.verb_of("juggle")
    preds = [0, 1, 1, 2, 2, 2]
    labels = [0, 0, 1, 1, 2, 2]
    assert sf.top1_accuracy(preds, labels) == pytest.approx(4 / 6)
    assert sf.mean_class_accuracy(preds, labels) == pytest.approx((0.5 + 0.5 + 1.0) / 3)
    cm = np.array(sf.confusion_matrix(preds, labels, 3))
    assert cm.sum() == 6 and np.trace(cm) == 4


def test_baseline_on_pooled_features():
    xs = [np.array([0.0, 0.0]), np.array([0.2, 0.0]), np.array([5.0, 5.0]), np.array([5.2, 5.0])]
    model = sf.train_baseline(xs, [0, 0, 1, 1], num_classes=2)
    assert model.predict(np.array([4.0, 4.0])) == 1
    assert model.evaluate(xs, [0, 0, 1, 1])["top1"] == 1.0
    img = np.arange(24 * 4 * 3, dtype=np.uint8).reshape(24, 4, 3)
    f = sf.pooled_image_features(img)
    assert f.shape == (24 * 3,)
    assert np.allclose(f, img.astype(np.float64).mean(axis=1).ravel())


def test_cli_entry_point():
    code, out, err = sf.cli(["--help"])
    assert code == 0 and "synth" in out
    code, _, err = sf.cli(["no-such-command"])
    assert code == 1 and err


def test_run_experiment_small():
    cfg = "\n".join(
        [
            "seed = 3",
            "train_per_class = 3",
            "test_per_class = 2",
            "frames_min = 8",
            "frames_max = 10",
            "t_target = 6",
            "height = 12",
            "width = 12",
            "encoders = heatmap",
            "template = pick up leg|pick up|leg|reach_lift|carry",
            "template = pick up table top|pick up|table top|reach_lift|carry",
        ]
    )
    rows = sf.run_experiment(cfg)
    assert rows
    for r in rows:
        assert 0.0 <= r["top1"] <= 1.0
        assert sum(map(sum, r["confusion"])) == 4


def test_error_hierarchy():
    for cls in (sf.ParseError, sf.LookupError, sf.ValidationError):
        assert issubclass(cls, sf.Error)
    with pytest.raises(sf.ParseError):
        sf.run_experiment("seed = not-a-number")

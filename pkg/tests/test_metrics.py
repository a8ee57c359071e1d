"""Image metrics: cosine scores, windowed SSIM, Fréchet distance, VQA stub."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lots.evaluation.embedders import ToyImageEmbedder
from lots.evaluation.metrics import (
    MetricError,
    StubVqaBackend,
    cosine,
    fid,
    frechet_distance,
    global_clip,
    local_clip,
    ssim,
    vqa_score,
)


def test_cosine_identity_orthogonal_opposite():
    assert cosine([1.0, 0.0], [2.0, 0.0]) == pytest.approx(1.0)
    assert cosine([1.0, 0.0], [0.0, 3.0]) == pytest.approx(0.0)
    assert cosine([1.0, 1.0], [-1.0, -1.0]) == pytest.approx(-1.0)
    with pytest.raises(MetricError, match="zero-norm"):
        cosine([0.0, 0.0], [1.0, 0.0])


def test_cosine_matches_formula_oracle():
    rng = np.random.default_rng(0)
    u, v = rng.normal(size=8), rng.normal(size=8)
    expected = float(np.dot(u, v) / (np.sqrt(np.dot(u, u)) * np.sqrt(np.dot(v, v))))
    assert cosine(u, v) == pytest.approx(expected, abs=1e-12)


def test_global_clip_self_similarity_is_one():
    rng = np.random.default_rng(1)
    img = rng.integers(0, 255, size=(32, 32, 3), dtype=np.uint8)
    embedder = ToyImageEmbedder(dim=8, seed=0)
    assert global_clip(img, img, embedder) == pytest.approx(1.0, abs=1e-12)
    assert embedder(img).shape == (8,)


def test_global_clip_is_symmetric():
    rng = np.random.default_rng(2)
    a = rng.integers(0, 255, size=(32, 32, 3), dtype=np.uint8)
    b = rng.integers(0, 255, size=(32, 32, 3), dtype=np.uint8)
    embedder = ToyImageEmbedder(dim=8, seed=0)
    assert global_clip(a, b, embedder) == pytest.approx(global_clip(b, a, embedder), abs=1e-12)


# -- local (per-garment) similarity ----------------------------------------------


def test_local_clip_mean_matches_loop_oracle():
    rng = np.random.default_rng(3)
    gen = rng.integers(0, 255, size=(48, 48, 3), dtype=np.uint8)
    ref = rng.integers(0, 255, size=(48, 48, 3), dtype=np.uint8)
    masks = []
    for y0, x0 in ((2, 2), (20, 10), (30, 30)):
        m = np.zeros((48, 48), dtype=np.uint8)
        m[y0 : y0 + 10, x0 : x0 + 12] = 1
        masks.append(m)
    embedder = ToyImageEmbedder(dim=8, seed=1)
    result = local_clip(gen, ref, masks, embedder, pad=4)

    expected = []
    for m in masks:
        ys, xs = np.nonzero(m)
        y0, x0 = max(ys.min() - 4, 0), max(xs.min() - 4, 0)
        y1, x1 = min(ys.max() + 5, 48), min(xs.max() + 5, 48)
        expected.append(cosine(embedder(gen[y0:y1, x0:x1]), embedder(ref[y0:y1, x0:x1])))
    assert result.per_garment == pytest.approx(expected, abs=1e-12)
    assert result.score == pytest.approx(float(np.mean(expected)), abs=1e-12)
    assert float(result) == result.score
    assert result.skipped == []


def test_local_clip_scores_fixed_fake_embeddings():
    # With a rigged embedder the mean is exactly (0.8 + 0.6) / 2 = 0.7.
    gen = np.zeros((32, 32, 3), dtype=np.uint8)
    ref = np.full((32, 32, 3), 255, dtype=np.uint8)
    m1 = np.zeros((32, 32), dtype=np.uint8)
    m1[:8, :8] = 1
    m2 = np.zeros((32, 32), dtype=np.uint8)
    m2[20:, 20:] = 1

    vecs = {
        (0, 12): np.array([1.0, 0.0]),  # gen crop 1  (crop heights differ per mask)
        (255, 12): np.array([0.8, 0.6]),  # ref crop 1: cos = 0.8
        (0, 16): np.array([0.0, 1.0]),  # gen crop 2
        (255, 16): np.array([0.8, 0.6]),  # ref crop 2: cos = 0.6
    }

    def rigged(crop):
        return vecs[(int(crop[0, 0, 0]), crop.shape[0])]

    result = local_clip(gen, ref, [m1, m2], rigged, pad=4)
    assert result.score == pytest.approx(0.7, abs=1e-12)
    assert result.per_garment == pytest.approx([0.8, 0.6], abs=1e-12)


def test_local_clip_skips_empty_masks_and_requires_one():
    rng = np.random.default_rng(4)
    img = rng.integers(0, 255, size=(32, 32, 3), dtype=np.uint8)
    good = np.zeros((32, 32), dtype=np.uint8)
    good[4:12, 4:12] = 1
    embedder = ToyImageEmbedder(dim=8, seed=2)
    result = local_clip(img, img, [np.zeros((32, 32)), good], embedder)
    assert result.skipped == [0]
    assert result.score == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(MetricError, match="at least one"):
        local_clip(img, img, [], embedder)
    with pytest.raises(MetricError, match="all garment masks"):
        local_clip(img, img, [np.zeros((32, 32))], embedder)


# -- SSIM -------------------------------------------------------------------------


def naive_ssim(gen, ref, window=11, sigma=1.5, k1=0.01, k2=0.03):
    """Direct per-window loops; no convolution shortcuts."""
    x = gen.astype(np.float64) / (255.0 if gen.dtype == np.uint8 else 1.0)
    y = ref.astype(np.float64) / (255.0 if ref.dtype == np.uint8 else 1.0)
    if x.ndim == 2:
        x, y = x[..., None], y[..., None]
    half = (window - 1) / 2.0
    coords = np.arange(window) - half
    g = np.exp(-(coords**2) / (2 * sigma**2))
    kernel = np.outer(g, g)
    kernel /= kernel.sum()
    c1, c2 = k1**2, k2**2
    per_channel = []
    for c in range(x.shape[2]):
        vals = []
        for i in range(x.shape[0] - window + 1):
            for j in range(x.shape[1] - window + 1):
                wx = x[i : i + window, j : j + window, c]
                wy = y[i : i + window, j : j + window, c]
                mx = float((kernel * wx).sum())
                my = float((kernel * wy).sum())
                vx = float((kernel * wx * wx).sum()) - mx * mx
                vy = float((kernel * wy * wy).sum()) - my * my
                cov = float((kernel * wx * wy).sum()) - mx * my
                vals.append(((2 * mx * my + c1) * (2 * cov + c2)) / ((mx**2 + my**2 + c1) * (vx + vy + c2)))
        per_channel.append(np.mean(vals))
    return float(np.mean(per_channel))


def test_ssim_self_similarity_is_one():
    rng = np.random.default_rng(5)
    img = rng.integers(0, 255, size=(24, 24, 3), dtype=np.uint8)
    assert ssim(img, img) == pytest.approx(1.0, abs=1e-6)


def test_ssim_matches_naive_windowed_oracle_on_16x16():
    rng = np.random.default_rng(6)
    gen = rng.integers(0, 255, size=(16, 16), dtype=np.uint8)
    ref = rng.integers(0, 255, size=(16, 16), dtype=np.uint8)
    assert ssim(gen, ref) == pytest.approx(naive_ssim(gen, ref), abs=1e-6)


def test_ssim_matches_oracle_on_color_images():
    rng = np.random.default_rng(7)
    gen = rng.integers(0, 255, size=(18, 14, 3), dtype=np.uint8)
    ref = rng.integers(0, 255, size=(18, 14, 3), dtype=np.uint8)
    assert ssim(gen, ref) == pytest.approx(naive_ssim(gen, ref), abs=1e-6)


def test_ssim_inverted_step_image_is_negative():
    img = np.zeros((16, 16), dtype=np.uint8)
    img[:, 8:] = 255
    inverted = 255 - img
    assert ssim(img, inverted) < 0


def test_ssim_is_symmetric_and_validates_input():
    rng = np.random.default_rng(8)
    a = rng.integers(0, 255, size=(16, 16), dtype=np.uint8)
    b = rng.integers(0, 255, size=(16, 16), dtype=np.uint8)
    assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-12)
    with pytest.raises(MetricError, match="shape mismatch"):
        ssim(a, b[:-1])
    with pytest.raises(MetricError, match="window"):
        ssim(a[:8, :8], b[:8, :8])


def test_ssim_accepts_unit_range_floats():
    rng = np.random.default_rng(9)
    a = rng.integers(0, 255, size=(16, 16), dtype=np.uint8)
    b = rng.integers(0, 255, size=(16, 16), dtype=np.uint8)
    assert ssim(a / 255.0, b / 255.0) == pytest.approx(ssim(a, b), abs=1e-12)


# -- Fréchet distance ---------------------------------------------------------------


def test_frechet_closed_form_one_dimensional():
    # N(mu, 1) vs N(0, 1): distance is exactly mu^2.
    for mu in (0.5, 2.0, -3.0):
        result = frechet_distance(np.array([mu]), np.array([[1.0]]), np.array([0.0]), np.array([[1.0]]))
        assert result.value == pytest.approx(mu**2, abs=1e-6)
        assert not result.ridge_applied


def test_frechet_variance_term():
    # N(0, s1^2) vs N(0, s2^2) in 1-D: distance = (s1 - s2)^2.
    result = frechet_distance(np.array([0.0]), np.array([[4.0]]), np.array([0.0]), np.array([[1.0]]))
    assert result.value == pytest.approx(1.0, abs=1e-6)


def test_fid_two_point_sets_give_mean_squared_difference():
    # Sets {mu ± 2^-0.5} have sample variance exactly 1 (ddof=1), so the
    # closed-form distance between their Gaussian fits is mu^2.
    def sets(mu):
        return [np.array([mu - 2**-0.5]), np.array([mu + 2**-0.5])]

    extractor = lambda v: v  # features are the 1-D points themselves
    for mu in (0.25, 1.5):
        result = fid(sets(mu), sets(0.0), extractor)
        assert result.value == pytest.approx(mu**2, abs=1e-6)


def test_fid_identical_sets_is_zero():
    rng = np.random.default_rng(10)
    images = [rng.integers(0, 255, size=(16, 16, 3), dtype=np.uint8) for _ in range(6)]
    extractor = ToyImageEmbedder(dim=4, seed=3)
    assert abs(fid(images, list(images), extractor).value) < 1e-6


def test_fid_requires_two_samples_per_side():
    extractor = ToyImageEmbedder(dim=4, seed=3)
    img = np.zeros((16, 16, 3), dtype=np.uint8)
    with pytest.raises(MetricError, match="at least two"):
        fid([img], [img, img], extractor)


def test_frechet_ridge_rescues_singular_covariances():
    # Rank-deficient 2-D covariances whose product sqrtm degenerates.
    cov = np.array([[1.0, 1.0], [1.0, 1.0]])
    result = frechet_distance(np.zeros(2), cov, np.ones(2), cov, ridge=1e-6)
    assert np.isfinite(result.value)


@settings(max_examples=30, deadline=None)
@given(
    mu=st.floats(min_value=-3, max_value=3),
    var1=st.floats(min_value=0.1, max_value=4.0),
    var2=st.floats(min_value=0.1, max_value=4.0),
)
def test_frechet_1d_property(mu, var1, var2):
    result = frechet_distance(np.array([mu]), np.array([[var1]]), np.array([0.0]), np.array([[var2]]))
    expected = mu**2 + (np.sqrt(var1) - np.sqrt(var2)) ** 2
    assert result.value == pytest.approx(expected, abs=1e-8)


# -- VQA stub -------------------------------------------------------------------------


def test_vqa_stub_replays_registered_scores():
    img = np.zeros((8, 8, 3), dtype=np.uint8)
    backend = StubVqaBackend()
    backend.register(img, "a red coat", 0.91)
    assert vqa_score(img, "a red coat", backend) == pytest.approx(0.91)
    assert vqa_score(img, "a red coat", backend) == pytest.approx(0.91)  # deterministic
    with pytest.raises(MetricError, match="no registered"):
        backend.score(img, "another prompt")


def test_vqa_stub_default_and_absent_backend():
    img = np.ones((4, 4, 3), dtype=np.uint8)
    assert vqa_score(img, "anything", StubVqaBackend(default=0.5)) == pytest.approx(0.5)
    assert vqa_score(img, "anything", None) is None

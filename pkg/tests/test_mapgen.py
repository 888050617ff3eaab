import numpy as np
import pytest

from autoscale_kit.core import PointSet
from autoscale_kit.mapgen import (
    DensityConfig,
    DistanceLabelMap,
    LabelConfig,
    density_map,
    distance_map,
    local_minima,
    quantize_labels,
    value_histogram,
)
from autoscale_kit.synth import PoissonProcess, SceneSpec, ThomasProcess, generate

from util import brute_force_distance, separated_points

# two class-0 plateaus can touch when points sit closer than
# 2 * edges[0] + sqrt(2) (pixel diagonal); stay above that for exact recovery
SAFE_SEPARATION = 2 * 1.0 + np.sqrt(2) + 0.2


class TestDensityMap:
    def test_empty_scene(self):
        d = density_map(PointSet.empty(16, 16), DensityConfig(4.0))
        assert d.shape == (16, 16)
        assert d.sum() == 0

    def test_single_interior_point_unit_mass(self):
        ps = PointSet(np.array([[32.3, 30.8]]), 64, 64)
        d = density_map(ps, DensityConfig(4.0))
        assert d.sum(dtype=np.float64) == pytest.approx(1.0, abs=1e-6)

    def test_border_point_still_unit_mass(self):
        ps = PointSet(np.array([[0.2, 0.4]]), 64, 64)
        d = density_map(ps, DensityConfig(4.0))
        assert d.sum(dtype=np.float64) == pytest.approx(1.0, abs=1e-6)

    def test_coincident_points_double(self):
        a = PointSet(np.array([[20.5, 20.5]]), 48, 48)
        b = PointSet(np.array([[20.5, 20.5], [20.5, 20.5]]), 48, 48)
        da = density_map(a, DensityConfig(3.0))
        db = density_map(b, DensityConfig(3.0))
        np.testing.assert_allclose(db, 2 * da, atol=1e-6)
        assert db.max() == pytest.approx(2 * da.max(), rel=1e-6)

    def test_additive_over_union(self):
        rng = np.random.default_rng(0)
        xy1 = rng.uniform(0, 48, size=(15, 2))
        xy2 = rng.uniform(0, 48, size=(10, 2))
        cfg = DensityConfig(4.0)
        d1 = density_map(PointSet(xy1, 48, 48), cfg)
        d2 = density_map(PointSet(xy2, 48, 48), cfg)
        du = density_map(PointSet(np.concatenate([xy1, xy2]), 48, 48), cfg)
        np.testing.assert_allclose(du, d1 + d2, atol=1e-6)

    def test_kernel_radius_bounds_support(self):
        ps = PointSet(np.array([[32.5, 32.5]]), 64, 64)
        d = density_map(ps, DensityConfig(2.0))  # radius 6
        assert d[32, 32 + 7] == 0
        assert d[32, 32 + 6] > 0


class TestValueHistogram:
    def test_constant_positive(self):
        res = value_histogram(np.full((8, 8), 2.5, dtype=np.float32), 10)
        assert res.tail_ratio == pytest.approx(1.0)
        assert res.counts.sum() == 64

    def test_single_positive_pixel(self):
        arr = np.zeros((8, 8), dtype=np.float32)
        arr[3, 3] = 1.0
        res = value_histogram(arr, 5)
        assert res.n_positive == 1
        assert np.count_nonzero(res.counts) == 1

    def test_no_positive_pixels_flagged(self):
        res = value_histogram(np.zeros((4, 4), dtype=np.float32), 4)
        assert res.tail_ratio is None
        assert res.n_positive == 0

    def test_bins_validated(self):
        with pytest.raises(ValueError):
            value_histogram(np.ones((2, 2), dtype=np.float32), 1)

    def test_clustered_tail_heavier_than_separated(self):
        cfg = DensityConfig(4.0)
        clustered = generate(SceneSpec(96, 96, ThomasProcess(3e-4, 40.0, 3.0), 5))
        separated = generate(
            SceneSpec(96, 96, PoissonProcess(len(clustered) / 96 / 96), 6)
        )
        tail_c = value_histogram(density_map(clustered, cfg), 32).tail_ratio
        tail_s = value_histogram(density_map(separated, cfg), 32).tail_ratio
        assert tail_c > tail_s


class TestDistanceMap:
    def test_three_four_five(self):
        ps = PointSet(np.array([[0.5, 0.5]]), 8, 8)  # center of pixel (0, 0)
        d = distance_map(ps)
        assert d[4, 3] == np.float32(5.0)  # pixel x=3, y=4

    def test_zero_at_annotated_pixels(self):
        rng = np.random.default_rng(1)
        ps = PointSet(rng.uniform(0, 16, size=(10, 2)), 16, 16)
        d = distance_map(ps)
        for x, y in ps.xy:
            assert d[int(y), int(x)] <= np.sqrt(0.5) + 1e-6

    def test_matches_brute_force_exactly(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            n = int(rng.integers(1, 30))
            ps = PointSet(rng.uniform(0, 16, size=(n, 2)), 16, 16)
            np.testing.assert_array_equal(distance_map(ps), brute_force_distance(ps))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            distance_map(PointSet.empty(4, 4))

    def test_lipschitz_between_neighbors(self):
        rng = np.random.default_rng(3)
        ps = PointSet(rng.uniform(0, 32, size=(12, 2)), 32, 32)
        d = distance_map(ps).astype(np.float64)
        assert np.all(np.abs(np.diff(d, axis=0)) <= 1.0 + 1e-6)
        assert np.all(np.abs(np.diff(d, axis=1)) <= 1.0 + 1e-6)


class TestQuantizeLabels:
    def test_edge_conventions(self):
        cfg = LabelConfig(edges=(1.0, 2.0, 4.0))
        dist = np.array([[0.0, 0.5, 1.0, 1.5, 2.0, 3.9, 4.0, 100.0]], dtype=np.float32)
        lm = quantize_labels(dist, cfg)
        assert list(lm.labels[0]) == [0, 0, 1, 1, 2, 2, 3, 3]

    def test_background_is_last_class(self):
        cfg = LabelConfig()
        dist = np.full((2, 2), 1000.0, dtype=np.float32)
        lm = quantize_labels(dist, cfg)
        assert np.all(lm.labels == cfg.background)

    def test_monotone_in_distance(self):
        rng = np.random.default_rng(4)
        cfg = LabelConfig()
        d = np.sort(rng.uniform(0, 50, size=256)).astype(np.float32).reshape(1, -1)
        labels = quantize_labels(d, cfg).labels[0]
        assert np.all(np.diff(labels.astype(int)) >= 0)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            LabelConfig(edges=(2.0, 1.0))
        with pytest.raises(ValueError):
            LabelConfig(edges=(-1.0, 2.0))
        with pytest.raises(ValueError):
            LabelConfig(edges=())


def gt_label_map(points: PointSet, cfg: LabelConfig = LabelConfig()) -> DistanceLabelMap:
    return quantize_labels(distance_map(points), cfg)


class TestLocalMinima:
    def test_single_point_recovered(self):
        ps = PointSet(np.array([[12.3, 9.7]]), 24, 24)
        det = local_minima(gt_label_map(ps))
        assert len(det) == 1
        assert np.hypot(*(det.xy[0] - ps.xy[0])) <= 1.0

    def test_all_background_no_detections(self):
        cfg = LabelConfig()
        labels = np.full((10, 10), cfg.background, dtype=np.uint8)
        det = local_minima(DistanceLabelMap(labels, cfg))
        assert len(det) == 0

    def test_separated_points_all_recovered(self):
        rng = np.random.default_rng(5)
        for trial in range(8):
            ps = separated_points(rng, 64, 64, 18, SAFE_SEPARATION)
            det = local_minima(gt_label_map(ps))
            assert len(det) == len(ps)
            d = np.sqrt(
                ((det.xy[:, None, :] - ps.xy[None, :, :]) ** 2).sum(-1)
            ).min(axis=1)
            assert d.max() <= 1.0

    def test_close_pair_merges_into_one_plateau(self):
        # spacing between 2*edges[0] and 2*edges[0] + sqrt(2): the class-0
        # plateaus become 8-adjacent and collapse to a single detection
        ps = PointSet(np.array([[10.0, 10.5], [12.2, 10.5]]), 24, 24)
        det = local_minima(gt_label_map(ps))
        assert len(det) == 1

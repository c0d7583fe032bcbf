import numpy as np
import pytest

from sppca import datagen
from sppca.core import DataError
from sppca.numerics import symmetric_eigh
from sppca.rng import seeded_rng


class TestLine:
    def test_no_outliers(self):
        x, lab = datagen.gen_line2d(50, 0, seeded_rng(1))
        assert x.shape == (50, 2) and not lab.any()

    def test_clean_within_five_sigma(self):
        x, _ = datagen.gen_line2d(100_000, 0, seeded_rng(2))
        dev = np.abs(x[:, 1] - 0.8 * x[:, 0] - 5)
        assert np.mean(dev <= 15) >= 0.9999
        assert x[:, 0].min() >= 0 and x[:, 0].max() <= 150

    def test_outliers_are_gross(self):
        x, lab = datagen.gen_line2d(200, 20, seeded_rng(3))
        assert x.shape == (220, 2) and lab.sum() == 20 and lab[200:].all()
        o = x[lab]
        assert np.all(np.abs(o[:, 1] - 0.8 * o[:, 0] - 5) > 30)

    def test_deterministic(self):
        a, _ = datagen.gen_line2d(30, 3, seeded_rng(4))
        b, _ = datagen.gen_line2d(30, 3, seeded_rng(4))
        assert np.array_equal(a, b)


class TestLowRank:
    def test_noise_scale_exact(self):
        x, (u, v, e) = datagen.gen_lowrank(30, 10, 2, seeded_rng(5), return_factors=True)
        ratio = np.linalg.norm(x - u @ v.T) / np.linalg.norm(e)
        assert ratio == pytest.approx(0.01, rel=1e-12)

    def test_spectral_gap(self):
        x = datagen.gen_lowrank(100, 100, 4, seeded_rng(6))
        ev, _ = symmetric_eigh(x.T @ x)
        sv = np.sqrt(np.clip(ev, 0, None))
        assert sv[4] < 0.05 * sv[3]

    def test_deterministic(self):
        a = datagen.gen_lowrank(20, 5, 2, seeded_rng(7))
        b = datagen.gen_lowrank(20, 5, 2, seeded_rng(7))
        assert np.array_equal(a, b)

    def test_bad_rank(self):
        with pytest.raises(DataError):
            datagen.gen_lowrank(5, 3, 4, seeded_rng(0))


class TestGaussianOutliers:
    def test_zero_fraction(self, np_rng):
        x = np_rng.normal(size=(20, 3))
        y, lab = datagen.inject_gaussian_outliers(x, 0.0, seeded_rng(1))
        assert np.array_equal(x, y) and not lab.any()

    def test_floor_count(self, np_rng):
        x = np_rng.normal(size=(100, 3))
        y, lab = datagen.inject_gaussian_outliers(x, 0.1, seeded_rng(1))
        assert lab.sum() == 10
        assert np.array_equal(x[~lab], y[~lab])
        assert not np.array_equal(x[lab], y[lab])

    def test_replacement_mean(self):
        rows = []
        for s in range(100):
            x = np.zeros((100, 5))
            y, lab = datagen.inject_gaussian_outliers(x, 0.1, seeded_rng(s))
            rows.append(y[lab])
        drawn = np.vstack(rows)
        assert drawn.shape == (1000, 5)
        # grand mean: sd sqrt(5 / 5000) ~ 0.032, so 0.1 is a 3-sigma band
        assert abs(drawn.mean() - 1.0) < 0.1
        # per coordinate the sd is ~0.071; use a 4-sigma band
        np.testing.assert_allclose(drawn.mean(axis=0), 1.0, atol=4 * np.sqrt(5 / 1000))
        np.testing.assert_allclose(drawn.var(axis=0), 5.0, rtol=0.15)

    def test_append_mode(self, np_rng):
        x = np_rng.normal(size=(40, 3))
        y, lab = datagen.inject_gaussian_outliers(x, 0.25, seeded_rng(1), mode="append")
        assert y.shape == (50, 3) and lab[40:].all() and not lab[:40].any()

    def test_bad_fraction(self, np_rng):
        with pytest.raises(DataError):
            datagen.inject_gaussian_outliers(np_rng.normal(size=(4, 2)), 1.0, seeded_rng(0))


class TestUniformOutliers:
    def test_zero_count(self, np_rng):
        x = np_rng.normal(size=(10, 3))
        y, lab = datagen.inject_uniform_outliers(x, 0, seeded_rng(1))
        assert np.array_equal(x, y) and not lab.any()

    def test_within_column_range(self, np_rng):
        x = np_rng.normal(size=(30, 4))
        y, lab = datagen.inject_uniform_outliers(x, 50, seeded_rng(2))
        new = y[lab]
        assert new.shape == (50, 4)
        assert np.all(new >= x.min(axis=0)) and np.all(new <= x.max(axis=0))

    def test_constant_column(self, np_rng):
        x = np_rng.normal(size=(10, 2))
        x[:, 1] = 4.25
        y, lab = datagen.inject_uniform_outliers(x, 5, seeded_rng(3))
        assert np.all(y[lab, 1] == 4.25)


class TestOcclusion:
    def faces(self, n=6, side=10):
        return seeded_rng(9).uniform(20, 230, size=(n, side * side))

    def test_zero_block(self):
        x = self.faces()
        y, lab = datagen.occlude_blocks(x, 10, 0, 3, seeded_rng(1))
        assert np.array_equal(x, y) and not lab.any()

    def test_block_extent_and_values(self):
        x = self.faces()
        y, lab = datagen.occlude_blocks(x, 10, 4, 3, seeded_rng(1))
        assert lab.sum() == 3
        for i in np.flatnonzero(lab):
            changed = x[i] != y[i]
            assert 0.9 * 16 <= changed.sum() <= 16
            assert set(np.unique(y[i][changed])) <= {0.0, 255.0}
            img = changed.reshape(10, 10)
            rows, cols = np.nonzero(img)
            assert rows.max() - rows.min() < 4 and cols.max() - cols.min() < 4
        assert np.array_equal(x[~lab], y[~lab])

    def test_not_square(self):
        with pytest.raises(DataError):
            datagen.occlude_blocks(np.zeros((2, 10)), 3, 1, 1, seeded_rng(0))


class TestSplit:
    def test_sizes(self):
        tr, te = datagen.train_test_split(np.arange(20.0).reshape(10, 2), 0.7, seeded_rng(1))
        assert tr.shape == (7, 2) and te.shape == (3, 2)

    def test_partition(self, np_rng):
        x = np_rng.normal(size=(17, 3))
        tr, te = datagen.train_test_split(x, 0.7, seeded_rng(2))
        both = np.vstack([tr, te])
        assert sorted(map(tuple, both)) == sorted(map(tuple, x))

    def test_deterministic(self, np_rng):
        x = np_rng.normal(size=(12, 2))
        a, _ = datagen.train_test_split(x, 0.5, seeded_rng(3))
        b, _ = datagen.train_test_split(x, 0.5, seeded_rng(3))
        assert np.array_equal(a, b)

    def test_empty_side(self):
        with pytest.raises(DataError):
            datagen.train_test_split(np.zeros((2, 2)), 0.3, seeded_rng(0))

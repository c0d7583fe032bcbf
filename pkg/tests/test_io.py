import json

import numpy as np
import pytest

from sppca.baseline_pca import fit_pca
from sppca.core import DataError, ModelFormatError, ModelParams
from sppca.io import (
    load_any_model,
    load_csv,
    load_labels,
    load_model,
    save_csv,
    save_labels,
    save_model,
)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestCsv:
    def test_parse(self, tmp_path):
        dm = load_csv(write(tmp_path, "a.csv", "0,0\n2,2\n100,100"), has_header=False)
        assert dm.shape == (3, 2)
        np.testing.assert_array_equal(dm.values[2], [100, 100])

    def test_header(self, tmp_path):
        dm = load_csv(write(tmp_path, "a.csv", "x,y\n1,2\n"), has_header=True)
        assert dm.columns == ("x", "y") and dm.shape == (1, 2)

    def test_empty(self, tmp_path):
        with pytest.raises(DataError, match="no rows"):
            load_csv(write(tmp_path, "e.csv", ""))

    def test_ragged_names_row(self, tmp_path):
        with pytest.raises(DataError, match="row 2"):
            load_csv(write(tmp_path, "r.csv", "1,2\n3"))

    @pytest.mark.parametrize("cell", ["abc", "nan", "inf"])
    def test_bad_cell(self, tmp_path, cell):
        with pytest.raises(DataError, match="row 1, column 2"):
            load_csv(write(tmp_path, "b.csv", f"1,{cell}\n"))

    def test_round_trip_bitwise(self, tmp_path, np_rng):
        x = np_rng.normal(size=(2, 2)) * 1e-7 + np.pi
        save_csv(x, tmp_path / "x.csv")
        assert np.array_equal(load_csv(tmp_path / "x.csv").values, x)

    def test_single_value_body(self, tmp_path):
        save_csv(np.array([[3.5]]), tmp_path / "s.csv")
        assert (tmp_path / "s.csv").read_text().splitlines() == ["3.5"]

    def test_unwritable_location(self, tmp_path):
        blocker = write(tmp_path, "file", "")
        with pytest.raises(OSError):
            save_csv(np.eye(2), blocker / "sub.csv")

    def test_labels_round_trip(self, tmp_path):
        lab = np.array([True, False, True])
        save_labels(lab, tmp_path / "l.csv")
        np.testing.assert_array_equal(load_labels(tmp_path / "l.csv"), lab)


class TestModelFiles:
    def test_round_trip(self, tmp_path):
        p = ModelParams(np.array([0.0, 0.0]), np.array([[1.0], [0.0]]), 1.0)
        save_model(p, tmp_path / "m.json")
        q = load_model(tmp_path / "m.json")
        assert np.array_equal(p.mu, q.mu) and np.array_equal(p.w, q.w)
        assert p.sigma2 == q.sigma2

    def test_round_trip_random_bitwise(self, tmp_path, np_rng):
        p = ModelParams(np_rng.normal(size=5), np_rng.normal(size=(5, 2)), 0.123456789)
        save_model(p, tmp_path / "m.json")
        q = load_model(tmp_path / "m.json")
        assert np.array_equal(p.w, q.w) and p.sigma2 == q.sigma2

    def _doc(self, **over):
        d = {"format_version": 1, "method": "ppca", "latent_dim": 1,
             "mu": [0.0, 0.0], "w": [[1.0], [0.0]], "sigma2": 1.0}
        d.update(over)
        return d

    def test_negative_sigma2(self, tmp_path):
        (tmp_path / "m.json").write_text(json.dumps(self._doc(sigma2=-1)))
        with pytest.raises(ModelFormatError):
            load_model(tmp_path / "m.json")

    def test_ragged_w(self, tmp_path):
        (tmp_path / "m.json").write_text(json.dumps(self._doc(w=[[1.0], [0.0, 2.0]])))
        with pytest.raises(ModelFormatError, match="unequal"):
            load_model(tmp_path / "m.json")

    def test_missing_key(self, tmp_path):
        d = self._doc()
        del d["mu"]
        (tmp_path / "m.json").write_text(json.dumps(d))
        with pytest.raises(ModelFormatError, match="mu"):
            load_model(tmp_path / "m.json")

    def test_bad_json(self, tmp_path):
        (tmp_path / "m.json").write_text("{")
        with pytest.raises(ModelFormatError):
            load_model(tmp_path / "m.json")

    def test_pca_model(self, tmp_path, np_rng):
        model = fit_pca(np_rng.normal(size=(20, 4)), 2)
        save_model(model, tmp_path / "p.json")
        back = load_any_model(tmp_path / "p.json")
        assert np.array_equal(back.components, model.components)
        with pytest.raises(ModelFormatError):
            load_model(tmp_path / "p.json")

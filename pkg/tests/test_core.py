import numpy as np
import pytest

from netatlas.core import (
    Connectome,
    DatasetManifest,
    Population,
    devectorize,
    load_connectome,
    load_manifest,
    load_population,
    load_populations,
    manifest_digest,
    save_connectome,
    save_manifest,
    stack_features,
    vectorize,
)
from netatlas.errors import DataFormatError

from conftest import random_connectome, random_graph


class TestConnectome:
    def test_valid_matrix_accepted(self):
        c = random_connectome(0, 5)
        assert c.r == 5
        assert c.weights.dtype == np.float64

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            Connectome(np.zeros((3, 4)))

    def test_rejects_too_small(self):
        with pytest.raises(ValueError, match="at least 3"):
            Connectome(np.zeros((2, 2)))

    def test_rejects_asymmetry(self):
        w = random_graph(1, 4)
        w[0, 1] += 1e-6
        with pytest.raises(ValueError, match="symmetric"):
            Connectome(w)

    def test_rejects_nonzero_diagonal(self):
        w = random_graph(2, 4)
        w[1, 1] = 0.5
        with pytest.raises(ValueError, match="diagonal"):
            Connectome(w)

    def test_rejects_negative(self):
        w = random_graph(3, 4)
        w[0, 1] = w[1, 0] = -0.2
        with pytest.raises(ValueError, match="nonnegative"):
            Connectome(w)

    def test_rejects_non_finite(self):
        w = random_graph(4, 4)
        w[0, 1] = w[1, 0] = np.inf
        with pytest.raises(ValueError, match="finite"):
            Connectome(w)

    def test_weights_are_read_only(self):
        c = random_connectome(5, 4)
        with pytest.raises(ValueError):
            c.weights[0, 1] = 2.0

    def test_does_not_alias_caller_array(self):
        w = random_graph(6, 4)
        c = Connectome(w)
        w[0, 1] = w[1, 0] = 0.999
        assert c.weights[0, 1] != 0.999


class TestConnectomeIO:
    def test_round_trip_exact(self, tmp_path):
        c = random_connectome(10, 7)
        path = tmp_path / "m.csv"
        save_connectome(c, path)
        back = load_connectome(path)
        assert np.array_equal(back.weights, c.weights)

    def test_repairs_asymmetry(self, tmp_path, caplog):
        w = random_graph(11, 4)
        w[0, 1] += 0.02  # beyond the 1e-12 tolerance
        path = tmp_path / "m.csv"
        np.savetxt(path, w, delimiter=",")
        with caplog.at_level("WARNING"):
            c = load_connectome(path)
        expected = (w + w.T) / 2.0
        np.fill_diagonal(expected, 0.0)
        assert np.allclose(c.weights, expected)
        assert any("asymmetry" in r.message for r in caplog.records)

    def test_repairs_negatives_and_diagonal(self, tmp_path):
        w = random_graph(12, 4)
        w[0, 1] = w[1, 0] = -0.3
        np.fill_diagonal(w, 0.7)
        path = tmp_path / "m.csv"
        np.savetxt(path, w, delimiter=",")
        c = load_connectome(path)
        assert c.weights[0, 1] == pytest.approx(0.3)
        assert not np.diagonal(c.weights).any()

    def test_rejects_empty_file(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("")
        with pytest.raises(DataFormatError, match="empty"):
            load_connectome(path)

    def test_rejects_ragged_rows(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("0,1,2\n1,0\n2,1,0\n")
        with pytest.raises(DataFormatError, match="square"):
            load_connectome(path)

    def test_rejects_bad_token(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("0,x,2\n1,0,1\n2,1,0\n")
        with pytest.raises(DataFormatError, match="non-numeric"):
            load_connectome(path)

    def test_rejects_tiny_matrix(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("0,1\n1,0\n")
        with pytest.raises(DataFormatError, match="at least 3"):
            load_connectome(path)


class TestVectorize:
    def test_round_trip(self):
        c = random_connectome(20, 6)
        v = vectorize(c)
        assert v.shape == (15,)
        back = devectorize(v, 6)
        assert np.array_equal(back.weights, c.weights)

    def test_row_major_upper_order(self):
        c = random_connectome(21, 4)
        v = vectorize(c)
        w = c.weights
        expected = [w[0, 1], w[0, 2], w[0, 3], w[1, 2], w[1, 3], w[2, 3]]
        assert np.array_equal(v, expected)

    def test_devectorize_infers_size(self):
        c = random_connectome(22, 5)
        back = devectorize(vectorize(c))
        assert back.r == 5

    def test_devectorize_rejects_bad_length(self):
        with pytest.raises(ValueError, match="triangular"):
            devectorize(np.ones(7))

    def test_devectorize_rejects_matrix_input(self):
        with pytest.raises(ValueError, match="flat"):
            devectorize(np.ones((3, 3)))

    def test_stack_features(self):
        pop = Population(
            tuple(random_connectome(s, 5) for s in range(3)),
            "A",
            ("a", "b", "c"),
        )
        f = stack_features(pop)
        assert f.shape == (3, 10)
        assert np.array_equal(f[1], vectorize(pop.subjects[1]))


class TestPopulation:
    def test_rejects_empty(self):
        with pytest.raises(ValueError, match="at least one"):
            Population((), "A", ())

    def test_rejects_mismatched_sizes(self):
        subs = (random_connectome(0, 4), random_connectome(1, 5))
        with pytest.raises(ValueError, match="same node count"):
            Population(subs, "A", ("a", "b"))

    def test_rejects_duplicate_ids(self):
        subs = (random_connectome(0, 4), random_connectome(1, 4))
        with pytest.raises(ValueError, match="unique"):
            Population(subs, "A", ("a", "a"))

    def test_rejects_id_length_mismatch(self):
        subs = (random_connectome(0, 4),)
        with pytest.raises(ValueError, match="equal length"):
            Population(subs, "A", ("a", "b"))

    def test_len_and_r(self):
        subs = tuple(random_connectome(s, 4) for s in range(3))
        pop = Population(subs, "A", ("a", "b", "c"))
        assert len(pop) == 3
        assert pop.r == 4


def _write_dataset(tmp_path, labels):
    entries = []
    for i, label in enumerate(labels):
        rel = f"m{i}.csv"
        save_connectome(random_connectome(i, 4), tmp_path / rel)
        entries.append((f"s{i}", rel, label))
    manifest = DatasetManifest(entries=tuple(entries))
    path = tmp_path / "manifest.csv"
    save_manifest(manifest, path)
    return path


class TestManifest:
    def test_round_trip_resolves_relative_paths(self, tmp_path):
        path = _write_dataset(tmp_path, ["A", "B", "A"])
        m = load_manifest(path)
        assert len(m.entries) == 3
        assert all(str(tmp_path) in p for _, p, _ in m.entries)
        assert m.labels() == ["A", "B"]

    def test_rejects_bad_header(self, tmp_path):
        path = tmp_path / "manifest.csv"
        path.write_text("id,file,cls\na,b,c\n")
        with pytest.raises(DataFormatError, match="header"):
            load_manifest(path)

    def test_rejects_missing_matrix_file(self, tmp_path):
        path = tmp_path / "manifest.csv"
        path.write_text("subject_id,path,label\ns0,gone.csv,A\n")
        with pytest.raises(DataFormatError, match="missing"):
            load_manifest(path)

    def test_rejects_malformed_row(self, tmp_path):
        save_connectome(random_connectome(0, 4), tmp_path / "m0.csv")
        path = tmp_path / "manifest.csv"
        path.write_text("subject_id,path,label\ns0,m0.csv\n")
        with pytest.raises(DataFormatError, match="malformed"):
            load_manifest(path)

    def test_rejects_duplicate_ids(self, tmp_path):
        save_connectome(random_connectome(0, 4), tmp_path / "m0.csv")
        path = tmp_path / "manifest.csv"
        path.write_text("subject_id,path,label\ns0,m0.csv,A\ns0,m0.csv,B\n")
        with pytest.raises(DataFormatError, match="duplicate"):
            load_manifest(path)

    def test_rejects_empty_manifest(self, tmp_path):
        path = tmp_path / "manifest.csv"
        path.write_text("subject_id,path,label\n")
        with pytest.raises(DataFormatError, match="no entries"):
            load_manifest(path)


class TestPopulationLoading:
    def test_load_population_filters_and_keeps_order(self, tmp_path):
        path = _write_dataset(tmp_path, ["A", "B", "A"])
        pop = load_population(load_manifest(path), "A")
        assert pop.subject_ids == ("s0", "s2")
        assert pop.class_label == "A"

    def test_load_population_unknown_label(self, tmp_path):
        path = _write_dataset(tmp_path, ["A", "B"])
        with pytest.raises(DataFormatError, match="no subjects"):
            load_population(load_manifest(path), "C")

    def test_load_populations_sorted_labels(self, tmp_path):
        path = _write_dataset(tmp_path, ["B", "A", "B", "A"])
        pos, neg = load_populations(load_manifest(path))
        assert pos.class_label == "A"
        assert neg.class_label == "B"

    def test_load_populations_needs_exactly_two_classes(self, tmp_path):
        path = _write_dataset(tmp_path, ["A", "A"])
        with pytest.raises(DataFormatError, match="two classes"):
            load_populations(load_manifest(path))
        path = _write_dataset(tmp_path, ["A", "B", "C"])
        with pytest.raises(DataFormatError, match="two classes"):
            load_populations(load_manifest(path))


class TestManifestDigest:
    def test_stable_and_content_sensitive(self, tmp_path):
        path = _write_dataset(tmp_path, ["A", "B"])
        d1 = manifest_digest(path)
        assert d1 == manifest_digest(path)
        # editing a referenced matrix must change the digest
        save_connectome(random_connectome(99, 4), tmp_path / "m0.csv")
        assert manifest_digest(path) != d1

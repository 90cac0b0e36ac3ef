"""Serialization: JSON network files and CSV matrix files."""

import copy
import json

import numpy as np
import pytest

from strassennet.core import mnn_equal, realize
from strassennet.gadgets import GadgetSpec, relu2_factory, relu_factory
from strassennet.inversion import InversionSpec, build_inv
from strassennet.io import (load_matrix, load_network, network_from_dict,
                            network_to_dict, save_matrix, save_network)
from strassennet.strassen import build_str_pow2


def _sample_networks():
    # one with activation masks and biases, one bias-only, one full Strassen
    return [
        relu_factory.build(GadgetSpec(0.01, 1.0)),
        build_inv(InversionSpec(2, 1.0, 1.2, 0.5), relu2_factory),
        build_str_pow2(1, 0.5, 1.0, relu2_factory),
    ]


class TestNetworkRoundTrip:
    def test_dict_round_trip_preserves_everything(self, rng):
        for net in _sample_networks():
            back = network_from_dict(network_to_dict(net))
            assert mnn_equal(net, back)
            assert back.num_weights == net.num_weights
            assert back.num_layers == net.num_layers
            X = rng.uniform(-1, 1, tuple(net.input_shape))
            assert np.array_equal(realize(net, None, X),
                                  realize(back, None, X))

    def test_file_round_trip(self, tmp_path, rng):
        for pos, net in enumerate(_sample_networks()):
            path = tmp_path / f"net{pos}.json"
            save_network(net, path)
            back = load_network(path)
            assert mnn_equal(net, back)
            X = rng.uniform(-1, 1, tuple(net.input_shape))
            assert np.array_equal(realize(net, None, X),
                                  realize(back, None, X))

    def test_resave_is_byte_identical(self, tmp_path):
        net = relu_factory.build(GadgetSpec(0.05, 2.0))
        first = tmp_path / "a.json"
        second = tmp_path / "b.json"
        save_network(net, first)
        save_network(load_network(first), second)
        assert first.read_bytes() == second.read_bytes()

    def test_document_is_plain_json(self, tmp_path):
        path = tmp_path / "net.json"
        save_network(build_str_pow2(0, 0.5, 1.0, relu2_factory), path)
        doc = json.loads(path.read_text())
        assert doc["activation"] == "relu2"
        assert isinstance(doc["layers"], list)
        layer = doc["layers"][0]
        assert set(layer) == {"out_rows", "out_cols", "in_rows", "in_cols",
                              "entries", "bias", "mask_rho"}
        # entries are sorted and 1-based
        assert layer["entries"] == sorted(layer["entries"])
        assert all(min(e[:4]) >= 1 for e in layer["entries"])


def _valid_doc():
    return network_to_dict(relu_factory.build(GadgetSpec(0.3, 1.0)))


class TestMalformedDocuments:
    def test_top_level_must_be_object(self):
        with pytest.raises(ValueError, match="bad network file"):
            network_from_dict([1, 2, 3])

    def test_missing_keys(self):
        for key in ("activation", "layers"):
            doc = _valid_doc()
            del doc[key]
            with pytest.raises(ValueError, match=f"missing key '{key}'"):
                network_from_dict(doc)

    def test_empty_layer_list(self):
        doc = _valid_doc()
        doc["layers"] = []
        with pytest.raises(ValueError, match="nonempty"):
            network_from_dict(doc)

    def test_missing_layer_key(self):
        doc = _valid_doc()
        del doc["layers"][0]["entries"]
        with pytest.raises(ValueError, match="layer 0 missing key 'entries'"):
            network_from_dict(doc)

    def test_bad_entry_arity(self):
        doc = _valid_doc()
        doc["layers"][0]["entries"][0] = [1, 1, 1]
        with pytest.raises(ValueError, match=r"\[i, j, k, l, value\]"):
            network_from_dict(doc)

    def test_entry_indices_validated(self):
        doc = _valid_doc()
        doc["layers"][0]["entries"][0][0] = 10 ** 6
        with pytest.raises(ValueError, match="out of range"):
            network_from_dict(doc)

    def test_zero_coefficient_rejected(self):
        doc = _valid_doc()
        doc["layers"][0]["entries"][0][4] = 0.0
        with pytest.raises(ValueError, match="zero coefficients"):
            network_from_dict(doc)

    def test_duplicate_entries_rejected(self):
        doc = _valid_doc()
        doc["layers"][0]["entries"].append(
            copy.deepcopy(doc["layers"][0]["entries"][0]))
        with pytest.raises(ValueError, match="duplicate"):
            network_from_dict(doc)

    def test_zero_bias_entry_rejected(self):
        doc = _valid_doc()
        for layer in doc["layers"]:
            if layer["bias"]:
                layer["bias"][0][2] = 0.0
                break
        else:
            pytest.fail("sample network should have a bias entry")
        with pytest.raises(ValueError, match="stores a zero"):
            network_from_dict(doc)

    def test_bias_out_of_range(self):
        doc = _valid_doc()
        for layer in doc["layers"]:
            if layer["bias"]:
                layer["bias"][0][0] = layer["out_rows"] + 1
                break
        with pytest.raises(ValueError, match="out of range"):
            network_from_dict(doc)

    def test_bad_mask_entry(self):
        doc = _valid_doc()
        for layer in doc["layers"]:
            if layer["mask_rho"]:
                layer["mask_rho"][0] = [1]
                break
        else:
            pytest.fail("sample network should have a mask entry")
        with pytest.raises(ValueError, match=r"must be \[i, j\]"):
            network_from_dict(doc)

    def test_mask_on_final_layer_rejected(self):
        doc = _valid_doc()
        doc["layers"][-1]["mask_rho"] = [[1, 1]]
        with pytest.raises(ValueError, match="final layer"):
            network_from_dict(doc)

    def test_non_json_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ValueError, match="not valid JSON"):
            load_network(path)

    def test_non_positive_dimensions(self):
        doc = _valid_doc()
        doc["layers"][0]["in_rows"] = 0
        with pytest.raises(ValueError, match="non-positive"):
            network_from_dict(doc)


class TestMatrixFiles:
    def test_round_trip_is_exact(self, tmp_path, rng):
        for shape in ((1, 1), (3, 3), (2, 5)):
            A = rng.standard_normal(shape)
            path = tmp_path / "m.csv"
            save_matrix(A, path)
            assert np.array_equal(load_matrix(path), A)

    def test_plain_text_rows(self, tmp_path):
        path = tmp_path / "m.csv"
        save_matrix(np.array([[1.5, -2.0], [0.0, 3.25]]), path)
        lines = path.read_text().strip().splitlines()
        assert lines == ["1.5,-2", "0,3.25"]

    def test_single_row_keeps_two_dims(self, tmp_path):
        path = tmp_path / "row.csv"
        path.write_text("1,2,3\n")
        assert load_matrix(path).shape == (1, 3)

    def test_rejects_non_matrix(self, tmp_path):
        with pytest.raises(ValueError, match="2-d"):
            save_matrix(np.zeros((2, 2, 2)), tmp_path / "x.csv")

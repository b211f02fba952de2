"""JSON round trips and located load errors for trees and filtrations."""
from __future__ import annotations

import random
from fractions import Fraction

import pytest

from emmlab import (
    ScenarioTree,
    UnknownIdError,
    ValidationError,
    filtration_from_dict,
    filtration_to_dict,
    load_filtration,
    load_tree,
    natural_filtration,
    save_tree,
    tree_from_dict,
    tree_to_dict,
)
from oracles import rand_tree

THIRD = Fraction(1, 3)


class TestTreeRoundTrip:
    """to_dict / from_dict and the file layer preserve trees exactly."""

    def test_dict_round_trip_is_identity(self, binomial2_tree):
        assert tree_from_dict(tree_to_dict(binomial2_tree)) == binomial2_tree

    def test_driver_tree_round_trip(self, coin_driver_tree):
        assert tree_from_dict(tree_to_dict(coin_driver_tree)) == coin_driver_tree

    @pytest.mark.parametrize("seed", range(10))
    def test_random_tree_round_trip(self, seed):
        rng = random.Random(12_000 + seed)
        tree = rand_tree(rng, with_driver=bool(seed % 2))
        assert tree_from_dict(tree_to_dict(tree)) == tree

    def test_fractions_serialize_as_quotient_strings(self, trinomial_tree):
        d = tree_to_dict(trinomial_tree)
        assert [p["prob"] for p in d["paths"]] == ["1/3", "1/3", "1/3"]

    def test_whole_fractions_serialize_as_ints(self, single_path_tree):
        d = tree_to_dict(single_path_tree)
        assert d["paths"][0]["prob"] == 1

    def test_exactness_survives_the_file_layer(self, tmp_path, trinomial_tree):
        target = str(tmp_path / "tree.json")
        save_tree(trinomial_tree, target)
        back = load_tree(target)
        assert back == trinomial_tree
        assert back.is_exact
        assert back.prob[0] == THIRD

    def test_float_tree_stays_float(self, tmp_path):
        tree = ScenarioTree.build(
            paths=["a", "b"],
            prob=[0.5, 0.5],
            assets={"S1": [[0.0, 1.0], [0.0, -1.0]]},
        )
        target = str(tmp_path / "tree.json")
        save_tree(tree, target)
        back = load_tree(target)
        assert back == tree
        assert not back.is_exact


class TestTreeLoadErrors:
    """Rejections name the offending field."""

    def base(self) -> dict:
        return {
            "paths": [{"id": "u", "prob": "1/2"}, {"id": "d", "prob": "1/2"}],
            "assets": {"S1": [[0, 1], [0, -1]]},
        }

    def test_missing_paths(self):
        with pytest.raises(ValidationError, match="paths"):
            tree_from_dict({"assets": {"S1": [[0, 1]]}})

    def test_path_entry_without_prob(self):
        d = self.base()
        d["paths"][1] = {"id": "d"}
        with pytest.raises(ValidationError, match=r"paths\[1\]"):
            tree_from_dict(d)

    def test_non_string_path_id(self):
        d = self.base()
        d["paths"][0]["id"] = 7
        with pytest.raises(ValidationError, match=r"paths\[0\]\.id"):
            tree_from_dict(d)

    def test_boolean_is_not_a_number(self):
        d = self.base()
        d["paths"][0]["prob"] = True
        with pytest.raises(ValidationError, match="boolean"):
            tree_from_dict(d)

    def test_unparseable_rational_string(self):
        d = self.base()
        d["assets"]["S1"][0][1] = "one half"
        with pytest.raises(ValidationError, match=r"S1\[0\]\[1\]"):
            tree_from_dict(d)

    def test_non_list_row(self):
        d = self.base()
        d["assets"]["S1"][1] = "0,-1"
        with pytest.raises(ValidationError, match=r"assets\.S1\[1\]"):
            tree_from_dict(d)

    def test_non_numeric_dt(self):
        d = self.base()
        d["dt"] = "fast"
        with pytest.raises(ValidationError, match="dt"):
            tree_from_dict(d)

    def test_no_processes_at_all(self):
        with pytest.raises(ValidationError, match="no asset or driver"):
            tree_from_dict(
                {"paths": [{"id": "u", "prob": 1}], "assets": {}, "drivers": {}}
            )

    def test_invalid_json_file_names_the_file(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        with pytest.raises(ValidationError, match="bad.json"):
            load_tree(str(bad))


class TestFiltrationRoundTrip:
    def test_dict_round_trip(self, binomial2_tree):
        filt = natural_filtration(binomial2_tree, ["S1"])
        d = filtration_to_dict(filt, binomial2_tree)
        assert filtration_from_dict(d, binomial2_tree) == filt

    def test_blocks_are_path_ids(self, coin_tree):
        filt = natural_filtration(coin_tree, ["S1"])
        d = filtration_to_dict(filt, coin_tree)
        assert d == {"partitions": [[["u", "d"]], [["u"], ["d"]]]}

    def test_file_round_trip(self, tmp_path, coin_driver_tree):
        import json

        filt = natural_filtration(coin_driver_tree, ["S1", "Y1"])
        target = tmp_path / "filt.json"
        target.write_text(
            json.dumps(filtration_to_dict(filt, coin_driver_tree)),
            encoding="utf-8",
        )
        assert load_filtration(str(target), coin_driver_tree) == filt

    def test_unknown_path_id_rejected(self, coin_tree):
        d = {"partitions": [[["u", "d"]], [["u"], ["x"]]]}
        with pytest.raises(UnknownIdError, match="x"):
            filtration_from_dict(d, coin_tree)

    def test_empty_block_rejected(self, coin_tree):
        d = {"partitions": [[["u", "d"]], [["u", "d"], []]]}
        with pytest.raises(ValidationError, match=r"partitions\[1\]\[1\]"):
            filtration_from_dict(d, coin_tree)

    def test_missing_partitions_key(self, coin_tree):
        with pytest.raises(ValidationError, match="partitions"):
            filtration_from_dict({}, coin_tree)

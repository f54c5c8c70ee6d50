import json

import pytest

from horolab.errors import ConfigError, UnknownVertexError
from horolab.graph import build_ball
from horolab.spaces import (
    CayleyAction,
    ConedOffAction,
    CustomAction,
    action_from_spec,
    cycle_graph,
    load_group_spec,
    read_permutation_csv,
)


def test_spec_families():
    assert isinstance(action_from_spec({"family": "free", "rank": 3}), CayleyAction)
    a = action_from_spec({"family": "free_product", "orders": [3, 4], "names": "st", "coned": True})
    assert isinstance(a, ConedOffAction) and a.label(a.parse_vertex("st")) == "st"
    with pytest.raises(ConfigError):
        action_from_spec({"family": "free_product"})
    with pytest.raises(ConfigError):
        action_from_spec({"family": "lattice"})


def test_custom_spec_inline():
    spec = {"family": "custom", "edges": [["x", "y"], ["y", "z"], ["z", "x"]],
            "automorphisms": {"r": {"x": "y", "y": "z", "z": "x"}}}
    act = action_from_spec(spec)
    assert act.group.order_of(act.group.generator("r")) == 3
    assert build_ball(act, 1).n == 3


def test_custom_spec_from_files(tmp_path):
    (tmp_path / "e.csv").write_text("u,v\n0,1\n1,2\n2,3\n3,0\n")
    (tmp_path / "p.csv").write_text("name,vertex,image\nr,0,1\nr,1,2\nr,2,3\nr,3,0\n")
    (tmp_path / "g.json").write_text(json.dumps({"family": "custom", "edges_csv": "e.csv",
                                                 "automorphisms_csv": "p.csv", "basepoint": "0"}))
    act = load_group_spec(tmp_path / "g.json")
    assert act.basepoint == "0" and act.dist("0", "2") == 2
    assert read_permutation_csv(tmp_path / "p.csv")["r"]["3"] == "0"
    (tmp_path / "bad.csv").write_text("a,b\n0,1\n")
    with pytest.raises(ConfigError):
        CustomAction.from_csv(tmp_path / "bad.csv")


def test_custom_errors():
    with pytest.raises(ConfigError):
        CustomAction(["x", "x"], [])
    with pytest.raises(UnknownVertexError):
        CustomAction(["x"], [("x", "y")])
    with pytest.raises(UnknownVertexError):
        CustomAction(["x"], [], basepoint="q")


def test_cycle_distances():
    c = cycle_graph(7)
    assert c.dist("v0", "v4") == 3
    b = build_ball(c, 3)
    assert b.n == 7

import json
import math

import numpy as np
import pytest

import fourbody


def test_boundary_and_distance():
    q = fourbody.build_boundary("start", 1.0, 2.0, 3.0)
    assert q.shape == (4, 2)
    assert np.allclose(q, [[-4, 0], [-1, 0], [2.5, 2], [2.5, -2]])
    d, pair = fourbody.min_pair_distance(q)
    assert pair == (0, 1)
    assert d == pytest.approx(3.0)


def test_static_square_action():
    sq = np.array([[1, 1], [-1, 1], [-1, -1], [1, -1]], dtype=float)
    a = fourbody.polyline_action(np.stack([sq, sq]))
    assert a["kinetic"] == 0.0
    assert a["total"] == pytest.approx(2 + 1 / math.sqrt(2), rel=1e-14)
    assert fourbody.action_quadrature_oracle(np.stack([sq, sq])) == pytest.approx(a["total"], rel=1e-10)
    acc = fourbody.newton_acceleration(sq)
    assert acc[0] == pytest.approx([-0.338388348, -0.338388348], rel=1e-8)


def test_bounds():
    assert 12.16 <= fourbody.total_collision_bound() <= 12.17
    assert fourbody.g1(0.05 * math.pi) == pytest.approx(3.42714228, rel=1e-8)
    assert fourbody.case_bound("e1", 3, 0.1) == fourbody.g1(0.1)
    with pytest.raises(ValueError):
        fourbody.g2(0.0)


def test_tables_and_certificate():
    ts = fourbody.tables()
    assert sum(t["variant"] == "e1" for t in ts) == 7
    assert sum(t["variant"] == "e2" for t in ts) == 9
    nodes = fourbody.build_test_path("e1", "539/10000pi")
    assert nodes.shape == (11, 4, 2)
    assert fourbody.polyline_action(nodes)["total"] < fourbody.g1(0.0539 * math.pi)
    rep = fourbody.certificate_sweep("e2", step="1/1000")
    assert rep["overall_pass"]
    assert min(rep["margins"]) > 0


def test_minimize_and_extend():
    r = fourbody.minimize("e1", "1/20pi", N=20, restarts=1)
    assert r["action"] < fourbody.g1(math.pi / 20)
    assert not r["all_restarts_collapsed"]
    doc = json.loads(r["json"])
    assert doc["theta"] == {"p": 1, "q": 20}
    back = fourbody.read_path_json(r["json"])
    assert np.array_equal(back["nodes"], r["nodes"])

    assert fourbody.classify_period("e1", "1/20pi") == (True, 160.0, 40.0)
    assert fourbody.classify_period("e2", 0.123)[0] is False
    tr = fourbody.extend("e1", "1/20pi", r["nodes"], 0.0, 16.0, samples_per_unit=20)
    s = tr["samples"]
    assert s.shape == (321, 4, 2)
    rot = 8 * math.pi / 20
    R = np.array([[math.cos(rot), math.sin(rot)], [-math.sin(rot), math.cos(rot)]])
    assert np.allclose(s[160] @ R, s[320], atol=1e-10)

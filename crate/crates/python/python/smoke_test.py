"""Smoke test for the semiring_mxu extension module.

Build and run:
    maturin develop -m crates/python/Cargo.toml
    python crates/python/python/smoke_test.py
"""

import json
import math

import semiring_mxu as sm

INF = math.inf


def test_scalars():
    assert sm.round_to_half(2049.0) == 2048.0
    assert sm.round_to_half(70000.0) == INF
    assert sm.oplus("min_plus", 3.0, INF) == 3.0
    assert sm.otimes("min_plus", 2.0, 5.0) == 7.0
    assert sm.otimes("add_norm", 1.0, 3.0) == 4.0
    assert sm.identity_and_padding("max_min") == (-INF, -INF, -INF)
    assert len(sm.ops()) == 9
    try:
        sm.otimes("or_and", 0.5, 1.0)
    except sm.DomainError:
        pass
    else:
        raise AssertionError("or_and accepted 0.5")


def test_mmo():
    a = sm.Matrix([[1.0, 2.0], [3.0, 4.0]])
    b = sm.Matrix([[5.0, 6.0], [7.0, 8.0]])
    c = sm.Matrix.filled(2, 2, 0.0)
    d, counters = sm.mmo("plus_mul", a, b, c)
    assert d.tolist() == [[19.0, 22.0], [43.0, 50.0]]
    assert counters["tile_ops"] == 1
    assert d == sm.mmo_reference("plus_mul", a, b, c)
    assert d.shape == (2, 2) and d.precision == "exact32"


def test_graph_problems():
    g = sm.Graph(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 5.0)])
    r = sm.apsp(g)
    assert r.matrix.get(0, 2) == 3.0
    assert r.converged and r.iterations <= 3
    assert r.matrix == sm.floyd_warshall("min_plus", g.encode("min_plus"))
    assert sm.transitive_closure(g).matrix.tolist()[2] == [0.0, 0.0, 1.0]

    chain = sm.generate_graph("path", 8, seed=1)
    bf = sm.apsp(chain, scheme="bf")
    ley = sm.apsp(chain)
    assert bf.matrix == ley.matrix
    assert ley.iterations <= 4 < bf.iterations

    cyc = sm.Graph.parse("n 3\n0 1 1\n1 2 1\n2 0 1\n")
    try:
        sm.aplp(cyc)
    except sm.DagRequiredError:
        pass
    else:
        raise AssertionError("aplp accepted a cycle")

    neg = sm.Graph(3, [(0, 1, 1.0), (1, 2, -3.0), (2, 0, 1.0)])
    try:
        sm.apsp(neg)
    except sm.NonConvergenceError:
        pass
    else:
        raise AssertionError("negative cycle converged")


def test_mst_and_knn():
    tri = sm.Graph(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)], directed=False)
    res, forest = sm.mst_bottleneck(tri)
    weight, edges = forest
    assert weight == 3.0 and len(edges) == 2
    assert res.matrix.get(0, 2) == 2.0
    msf_weight, bottleneck = sm.kruskal_bottleneck(tri)
    assert msf_weight == 3.0 and bottleneck == res.matrix

    points = sm.Matrix([[0.9, 0.0]])
    refs = sm.Matrix([[0.0, 0.0], [1.0, 0.0], [5.0, 0.0]])
    dist2, idx = sm.knn(points, refs, 2)
    assert idx == [[1, 0]]
    assert abs(dist2.get(0, 1) - 0.01) < 1e-6


def test_solve_report():
    g = sm.generate_graph("erdos_renyi", 24, density=0.2, seed=3)
    report = json.loads(sm.solve("apsp", g, validate=True))
    assert report["validation"]["matched"] is True
    assert report["tile_ops"] == report["iterations"] * 8  # ceil(24/16)^3 tiles per step
    assert set(report) >= {"problem", "op", "iterations", "tile_ops", "wall_time_seconds"}


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"ok  {name}")
    print("smoke test passed")

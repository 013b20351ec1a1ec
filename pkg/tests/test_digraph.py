import random
from fractions import Fraction

import pytest

from wph.digraph import (
    DigraphMorphism,
    WeightedDigraph,
    join,
    parse_digraph,
    parse_morphism,
    relabel,
    validate_digraph,
    validate_morphism,
)
from wph.errors import NonDisjointVertexSets, ParseError
from wph.rings import Ring

Z = Ring.INTEGERS
Q = Ring.RATIONALS


def dg(vertices, edges, weights=None):
    weights = weights or {v: 1 for v in vertices}
    return WeightedDigraph(vertices, edges, weights)


def test_minimal_digraph_valid():
    g = dg(["a"], [])
    assert validate_digraph(g, Z) == []


def test_zero_weight_flagged():
    g = WeightedDigraph(["a"], [], {"a": 0})
    msgs = [str(v) for v in validate_digraph(g, Z)]
    assert any("zero weight at a" in m for m in msgs)


def test_loop_flagged():
    g = WeightedDigraph(["a"], [("a", "a")], {"a": 1})
    msgs = [str(v) for v in validate_digraph(g, Z)]
    assert any("loop at a" in m for m in msgs)


def test_fractional_weight_only_ok_over_q():
    g = WeightedDigraph(["a"], [], {"a": Fraction(3, 2)})
    assert validate_digraph(g, Q) == []
    assert validate_digraph(g, Z) != []


def test_undeclared_endpoint_flagged():
    g = WeightedDigraph(["a"], [("a", "b")], {"a": 1})
    msgs = [str(v) for v in validate_digraph(g, Z)]
    assert any("not a declared vertex" in m for m in msgs)


def example_61(weights=(2, 4, 1)):
    w = {"i0": weights[0], "i1": weights[1], "i2": weights[2]}
    g1 = WeightedDigraph(["i0", "i1", "i2"], [("i0", "i1")], w)
    g2 = WeightedDigraph(["i0", "i1", "i2"], [("i0", "i1"), ("i1", "i2")], w)
    return g1, g2


def test_identity_morphism_valid():
    g1, _ = example_61()
    assert validate_morphism(DigraphMorphism.identity(g1)) == []


def test_collapse_morphism_weight_condition():
    # collapsing i1 and i2 onto i1 needs w(i1) == w(i2)
    g1, g2 = example_61(weights=(2, 4, 4))
    f = DigraphMorphism(g2, g1, {"i0": "i0", "i1": "i1", "i2": "i1"})
    assert validate_morphism(f) == []
    g1b, g2b = example_61(weights=(2, 4, 1))
    fb = DigraphMorphism(g2b, g1b, {"i0": "i0", "i1": "i1", "i2": "i1"})
    msgs = [str(v) for v in validate_morphism(fb)]
    assert any("weight mismatch at i2" in m for m in msgs)


def test_edge_to_nonedge_flagged():
    a = dg(["x", "y"], [("x", "y")])
    b = dg(["p", "q"], [])
    f = DigraphMorphism(a, b, {"x": "p", "y": "q"})
    msgs = [str(v) for v in validate_morphism(f)]
    assert any("non-edge" in m for m in msgs)


def test_morphism_composition_is_valid():
    rng = random.Random(5)
    for _ in range(20):
        base = dg(["m0", "m1"], [("m0", "m1")], {"m0": rng.randint(1, 5), "m1": rng.randint(1, 5)})
        mid_vertices = ["a0", "a1", "a2"]
        mid_w = {"a0": base.weights["m0"], "a1": base.weights["m1"], "a2": base.weights["m1"]}
        mid = WeightedDigraph(mid_vertices, [("a0", "a1"), ("a0", "a2"), ("a1", "a2")], mid_w)
        k = DigraphMorphism(mid, base, {"a0": "m0", "a1": "m1", "a2": "m1"})
        assert validate_morphism(k) == []
        top = relabel(mid, "t.")
        f = DigraphMorphism(top, mid, {t: t[2:] for t in top.vertices})
        assert validate_morphism(f) == []
        composed = f.compose(k)
        assert validate_morphism(composed) == []


def test_join_two_points():
    j = join(dg(["a"], []), dg(["b"], []))
    assert j.vertices == ("a", "b")
    assert j.edges == frozenset({("a", "b")})


def test_join_cardinalities():
    rng = random.Random(1)
    for _ in range(10):
        na, nb = rng.randint(1, 5), rng.randint(1, 5)
        va = [f"a{i}" for i in range(na)]
        vb = [f"b{i}" for i in range(nb)]
        ea = {(u, v) for u in va for v in va if u != v and rng.random() < 0.4}
        eb = {(u, v) for u in vb for v in vb if u != v and rng.random() < 0.4}
        g, h = dg(va, ea), dg(vb, eb)
        j = join(g, h)
        assert len(j.vertices) == na + nb
        assert len(j.edges) == len(ea) + len(eb) + na * nb


def test_join_triangle_with_point():
    tri = dg(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "a")])
    j = join(tri, dg(["d"], []))
    assert j.edges == frozenset(
        {("a", "b"), ("b", "c"), ("c", "a"), ("a", "d"), ("b", "d"), ("c", "d")}
    )


def test_join_weights_piecewise():
    g = WeightedDigraph(["a"], [], {"a": 2})
    h = WeightedDigraph(["b"], [], {"b": Fraction(3, 2)})
    j = join(g, h)
    assert j.weights["a"] == 2 and j.weights["b"] == Fraction(3, 2)


def test_join_collision():
    with pytest.raises(NonDisjointVertexSets) as exc:
        join(dg(["a", "b"], []), dg(["b"], []))
    assert "b" in str(exc.value)


def test_relabel():
    g = dg(["a", "b"], [("a", "b")], {"a": 2, "b": 3})
    r = relabel(g, "L.")
    assert r.vertices == ("L.a", "L.b")
    assert r.edges == frozenset({("L.a", "L.b")})
    assert r.weights["L.a"] == 2
    # relabel makes a previously colliding join possible
    j = join(relabel(g, "L."), relabel(g, "R."))
    assert len(j.vertices) == 4


def test_relabel_commutes_with_join_up_to_iso():
    g = dg(["a", "b"], [("a", "b")], {"a": 2, "b": 3})
    h = dg(["c"], [], {"c": 5})
    j1 = join(relabel(g, "L."), relabel(h, "R."))
    j2 = join(g, h)
    ren = {v: ("L." + v if v in g.vertex_set else "R." + v) for v in j2.vertices}
    assert {(ren[u], ren[v]) for u, v in j2.edges} == set(j1.edges)
    assert {ren[v]: w for v, w in j2.weights.items()} == j1.weights


def test_parse_digraph_roundtrip():
    text = "# a comment\nv i0 2\nv i1 4\nv i2 1\ne i0 i1  # trailing comment\ne i1 i2\n"
    g = parse_digraph(text)
    assert g.vertices == ("i0", "i1", "i2")
    assert g.weights["i1"] == 4
    assert parse_digraph(g.to_text()) == g


def test_parse_digraph_fractional_weight():
    g = parse_digraph("v x 3/2\n")
    assert g.weights["x"] == Fraction(3, 2)


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError) as exc:
        parse_digraph("v a 1\ne a b\n")
    assert exc.value.line_no == 2
    with pytest.raises(ParseError):
        parse_digraph("v a 1\nv a 2\n")
    with pytest.raises(ParseError):
        parse_digraph("w a 1\n")
    with pytest.raises(ParseError):
        parse_digraph("v a 1/0\n")


def test_parse_morphism():
    g1, g2 = example_61()
    f = parse_morphism("m i0 i0\nm i1 i1\nm i2 i2\n", g1, g2)
    assert validate_morphism(f) == []
    with pytest.raises(ParseError):
        parse_morphism("m i0 i0\n", g1, g2)


def test_json_export():
    g1, _ = example_61()
    js = g1.to_json()
    assert js["vertices"] == ["i0", "i1", "i2"]
    assert js["edges"] == [["i0", "i1"]]
    assert js["weights"]["i0"] == "2"
    f = DigraphMorphism.identity(g1)
    assert f.to_json()["map"]["i1"] == "i1"

import pytest
from hypothesis import given, settings, strategies as st

from citerec.corpus import GraphSnapshot
from citerec.graphcore import (neighborhood_components, neighbors,
                               sample_neighbors, shortest_path_length)

from conftest import make_corpus
from citerec.corpus import snapshot


def graph_of(edges, extra_nodes=()):
    nodes = sorted({u for e in edges for u in e} | set(extra_nodes))
    return GraphSnapshot(0, nodes, list(edges))


def test_neighbors_directions():
    g = graph_of([("A", "B")])
    assert neighbors(g, "A", "out") == ["B"]
    assert neighbors(g, "B", "in") == ["A"]
    assert neighbors(g, "A", "in") == []
    assert neighbors(g, "A", "undirected") == ["B"]


def test_neighbors_dedup_on_mutual_citation():
    g = graph_of([("A", "B"), ("B", "A")])
    assert neighbors(g, "A", "undirected") == ["B"]


def test_neighbors_unknown_node():
    g = graph_of([("A", "B")])
    with pytest.raises(KeyError):
        neighbors(g, "Z", "out")


def test_sample_no_truncation():
    g = graph_of([("v", "a"), ("v", "b"), ("v", "c")])
    assert sample_neighbors(g, "v", 5, seed=0) == ["a", "b", "c"]


def test_sample_subset_and_determinism():
    edges = [("v", f"n{i}") for i in range(10)]
    g = graph_of(edges)
    s1 = sample_neighbors(g, "v", 5, seed=7)
    s2 = sample_neighbors(g, "v", 5, seed=7)
    assert s1 == s2
    assert len(s1) == 5 and len(set(s1)) == 5
    assert set(s1) <= set(neighbors(g, "v"))
    assert sample_neighbors(g, "v", 5, seed=8) != s1 or True  # usually differs


def test_components_star():
    g = graph_of([("v", "a"), ("v", "b"), ("v", "c")])
    part = neighborhood_components(g, "v")
    assert part.components == (("a",), ("b",), ("c",))


def test_components_two_dyads():
    g = graph_of([("v", "a"), ("v", "b"), ("v", "c"), ("v", "d"),
                  ("a", "b"), ("c", "d")])
    part = neighborhood_components(g, "v")
    assert part.components == (("a", "b"), ("c", "d"))


def test_components_two_triangles():
    # derived by brute force: two triangles sharing no vertex -> 2 components of 3
    edges = [("v", x) for x in "abcdef"]
    edges += [("a", "b"), ("b", "c"), ("a", "c")]
    edges += [("d", "e"), ("e", "f"), ("d", "f")]
    g = graph_of(edges)
    part = neighborhood_components(g, "v")
    assert part.components == (("a", "b", "c"), ("d", "e", "f"))


def test_components_isolated_center():
    g = graph_of([("a", "b")], extra_nodes=["v"])
    assert neighborhood_components(g, "v").components == ()


def test_shortest_paths():
    g = graph_of([("a", "b"), ("b", "c"), ("c", "d")])
    assert shortest_path_length(g, "a", "a") == 0
    assert shortest_path_length(g, "a", "d") == 3  # exhaustive on 4 nodes
    tri = graph_of([("a", "b"), ("b", "c"), ("a", "c")])
    for u in "abc":
        for v in "abc":
            if u != v:
                assert shortest_path_length(tri, u, v) == 1


def test_shortest_path_unreachable():
    g = graph_of([("a", "b"), ("c", "d")])
    assert shortest_path_length(g, "a", "c") is None


@st.composite
def random_graphs(draw):
    n = draw(st.integers(min_value=2, max_value=30))
    ids = [f"n{i:02d}" for i in range(n)]
    m = draw(st.integers(min_value=0, max_value=min(60, n * (n - 1) // 2)))
    edges = set()
    for _ in range(m):
        i = draw(st.integers(min_value=0, max_value=n - 1))
        j = draw(st.integers(min_value=0, max_value=n - 1))
        if i != j:
            edges.add((ids[i], ids[j]))
    return GraphSnapshot(0, ids, sorted(edges))


def flood_fill_components(g, v):
    members = set(g.und_neighbors(v))
    comps = []
    left = set(members)
    while left:
        start = min(left)
        stack, comp = [start], set()
        while stack:
            u = stack.pop()
            if u in comp:
                continue
            comp.add(u)
            for w in g.und_neighbors(u):
                if w in members and w not in comp:
                    stack.append(w)
        comps.append(tuple(sorted(comp)))
        left -= comp
    return tuple(sorted(comps, key=lambda c: c[0]))


@settings(max_examples=60, deadline=None)
@given(random_graphs())
def test_components_match_flood_fill(g):
    for v in g.nodes:
        part = neighborhood_components(g, v)
        assert part.components == flood_fill_components(g, v)
        # partition properties: disjoint cover of N(v), never containing v
        union = [m for c in part.components for m in c]
        assert len(union) == len(set(union))
        assert set(union) == set(g.und_neighbors(v))
        assert v not in union


@settings(max_examples=30, deadline=None)
@given(random_graphs())
def test_shortest_path_symmetric_triangle(g):
    nodes = list(g.nodes)[:6]
    dist = {}
    for u in nodes:
        for v in nodes:
            dist[(u, v)] = shortest_path_length(g, u, v)
    for u in nodes:
        for v in nodes:
            assert dist[(u, v)] == dist[(v, u)]
            for w in nodes:
                a, b, c = dist[(u, w)], dist[(u, v)], dist[(v, w)]
                if b is not None and c is not None:
                    assert a is not None and a <= b + c


@settings(max_examples=30, deadline=None)
@given(random_graphs(), st.integers(min_value=0, max_value=2**31))
def test_sample_with_huge_s_equals_neighbors(g, seed):
    for v in list(g.nodes)[:5]:
        assert set(sample_neighbors(g, v, 10**9, seed)) == set(neighbors(g, v))


def test_snapshot_neighbors_from_corpus(tiny_corpus):
    g = snapshot(tiny_corpus, 2030)
    assert neighbors(g, "B", "in") == ["A", "C"]

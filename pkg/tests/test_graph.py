import pytest

from tripack.graph import Graph, bits, induced, iter_bits, read_edge_list, union, write_edge_list
from tripack.generators import complete_bipartite, gnp
from conftest import make_complete


def test_degree_into_examples():
    k4 = make_complete(4)
    assert k4.degree_into(0, bits([1, 2, 3])) == 3
    assert k4.degree_into(0, 0) == 0
    k23 = complete_bipartite(2, 5)
    assert k23.degree_into(0, bits([2, 3, 4])) == 3
    with pytest.raises(ValueError):
        k4.degree_into(7, 0)


def test_degree_into_full_set_is_popcount():
    g = gnp(40, 0.4, 17)
    for v in range(g.n):
        assert g.degree_into(v, g.vertex_mask()) == g.adj[v].bit_count()


def test_union_examples():
    g = gnp(20, 0.3, 5)
    empty = Graph.empty(20)
    assert union(g, empty) == g
    assert union(g, g) == g
    p1 = Graph.from_edges(3, [(0, 1)])
    p2 = Graph.from_edges(3, [(1, 2)])
    u = union(p1, p2)
    assert u.edge_count == 2 and u.has_edge(0, 1) and u.has_edge(1, 2)
    with pytest.raises(ValueError):
        union(g, Graph.empty(21))


def test_union_commutative_associative():
    for seed in range(10):
        g1 = gnp(15, 0.3, seed)
        g2 = gnp(15, 0.3, seed + 100)
        g3 = gnp(15, 0.3, seed + 200)
        assert union(g1, g2) == union(g2, g1)
        assert union(union(g1, g2), g3) == union(g1, union(g2, g3))


def test_induced_examples():
    k5 = make_complete(5)
    sub, back = induced(k5, bits([1, 3, 4]))
    assert sub == make_complete(3)
    assert back == [1, 3, 4]
    sub, back = induced(k5, 0)
    assert sub.n == 0 and back == []
    k23 = complete_bipartite(2, 5)
    sub, _ = induced(k23, bits([2, 3, 4]))
    assert sub.edge_count == 0


def test_symmetry_and_loops_on_generated_graphs():
    for seed in range(5):
        g = gnp(30, 0.4, seed)
        for u in range(g.n):
            assert not (g.adj[u] >> u) & 1
            for v in iter_bits(g.adj[u]):
                assert (g.adj[v] >> u) & 1
        assert g.edge_count == sum(r.bit_count() for r in g.adj) // 2


def test_construction_rejects_bad_adjacency():
    with pytest.raises(ValueError):
        Graph(2, [0b10, 0])  # asymmetric
    with pytest.raises(ValueError):
        Graph(2, [0b01, 0b10])  # loop at 0
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 3)])
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(1, 1)])


def test_edge_list_round_trip(tmp_path):
    g = gnp(25, 0.3, 9)
    path = tmp_path / "g.graph"
    write_edge_list(g, path)
    assert read_edge_list(path) == g


@pytest.mark.parametrize(
    "content",
    [
        "2\n",  # bad header
        "3 1\n0 0\n",  # loop
        "3 1\n2 1\n",  # u >= v
        "3 1\n0 5\n",  # out of range
        "3 2\n0 1\n0 1\n",  # duplicate
        "3 2\n0 1\n",  # count mismatch
    ],
)
def test_edge_list_rejects(tmp_path, content):
    path = tmp_path / "bad.graph"
    path.write_text(content)
    with pytest.raises(ValueError):
        read_edge_list(path)

import random

import pytest

from gassmann.certify import enumerate_class_reps
from gassmann.errors import EmptyGeneratorSet, SizeCapExceeded, SpecMismatch
from gassmann.heisenberg import (
    conjugate_subgroup,
    heisenberg_group,
    horizontal_subgroup,
    trivial_subgroup,
    twisted_subgroup,
    whole_group,
)
from gassmann.rings import LinearMap, make_field
from gassmann.schreier import (
    are_isomorphic,
    are_isomorphic_bruteforce,
    bareiss_determinant,
    build_coset_graph,
    char_poly,
    charpoly_berkowitz,
    charpoly_cofactor,
    default_generators,
    isospectral,
    verify_witness,
)

F2 = make_field(2, 1)
F4 = make_field(2, 2)

G4 = heisenberg_group(F4)
GENS4 = default_generators(G4)


def _rep_graphs():
    subs = [twisted_subgroup(f, G4) for f in enumerate_class_reps(F4).reps]
    return [build_coset_graph(s, GENS4) for s in subs]


# ---------------------------------------------------------------------------
# Graph construction
# ---------------------------------------------------------------------------


def test_whole_group_gives_single_vertex_with_loops():
    graph = build_coset_graph(whole_group(G4), GENS4)
    assert graph.n == 1
    assert graph.adjacency == ((len(GENS4),),)


def test_twisted_subgroup_graph_shape():
    graph = build_coset_graph(horizontal_subgroup(G4), GENS4)
    assert graph.n == 16  # index q^2
    assert all(sum(row) == len(GENS4) for row in graph.adjacency)
    assert all(
        graph.adjacency[u][v] == graph.adjacency[v][u]
        for u in range(16)
        for v in range(16)
    )
    assert graph.connected


def test_trivial_subgroup_gives_cayley_graph():
    graph = build_coset_graph(trivial_subgroup(G4), GENS4)
    assert graph.n == G4.order
    assert graph.connected  # the default generators generate the group


def test_vertices_are_canonical_minima():
    graph = build_coset_graph(horizontal_subgroup(G4), GENS4)
    assert list(graph.vertices) == sorted(graph.vertices)
    members = horizontal_subgroup(G4).elements
    for rep in graph.vertices:
        assert rep == min(G4.mul(h, rep) for h in members)


def test_generator_set_errors():
    with pytest.raises(EmptyGeneratorSet):
        build_coset_graph(horizontal_subgroup(G4), [])
    with pytest.raises(SizeCapExceeded):
        build_coset_graph(trivial_subgroup(G4), GENS4, cap=10)
    with pytest.raises(SpecMismatch):
        build_coset_graph(horizontal_subgroup(G4), [((1,), (0,), (0,))])


def test_default_generators_reduce_to_classic_pair_at_m1():
    g2 = heisenberg_group(F2)
    gens = default_generators(g2)
    one, zero = (1,), (0,)
    assert set(gens) == {(one, zero, zero), (zero, one, zero)}


def test_exports():
    graph = build_coset_graph(horizontal_subgroup(G4), GENS4)
    dot = graph.to_dot()
    assert dot.startswith("graph") and "--" in dot
    edges = graph.edge_list()
    assert all(u <= v and mult >= 1 for u, v, mult in edges)
    assert sum(mult * (2 if u != v else 1) for u, v, mult in edges) == 16 * len(GENS4)


# ---------------------------------------------------------------------------
# Characteristic polynomials
# ---------------------------------------------------------------------------


def test_charpoly_trivial_cases():
    assert charpoly_berkowitz([[0, 0], [0, 0]]).coefficients == (1, 0, 0)
    assert charpoly_berkowitz([[0, 1], [1, 0]]).coefficients == (1, 0, -1)
    assert charpoly_cofactor([[0, 1], [1, 0]]).coefficients == (1, 0, -1)
    assert charpoly_berkowitz([[5]]).coefficients == (1, -5)


def test_charpoly_routes_agree_on_random_integer_matrices():
    rng = random.Random(1729)
    for n in (3, 4, 5, 6):
        for _ in range(8):
            mat = [[rng.randrange(-4, 5) for _ in range(n)] for _ in range(n)]
            a = charpoly_berkowitz(mat)
            b = charpoly_cofactor(mat)
            assert a.coefficients == b.coefficients
            for t in (0, 1, -2, 7):
                shifted = [
                    [(t if i == j else 0) - mat[i][j] for j in range(n)] for i in range(n)
                ]
                assert bareiss_determinant(shifted) == a.evaluate(t)


def test_charpoly_matches_bareiss_at_random_points_on_graphs():
    rng = random.Random(424242)
    for graph in _rep_graphs():
        poly = char_poly(graph)
        for t in (rng.randrange(-50, 50) for _ in range(3)):
            shifted = [
                [(t if i == j else 0) - graph.adjacency[i][j] for j in range(graph.n)]
                for i in range(graph.n)
            ]
            assert bareiss_determinant(shifted) == poly.evaluate(t)


def test_charpoly_structure_on_coset_graphs():
    for graph in _rep_graphs():
        poly = char_poly(graph)
        assert poly.degree == graph.n
        assert poly.coefficients[0] == 1
        assert poly.coefficients[1] == -graph.loop_count()


def test_charpoly_16_vertex_cross_checked_against_cofactor_oracle():
    for graph in _rep_graphs():
        assert char_poly(graph).coefficients == charpoly_cofactor(graph.adjacency).coefficients


def test_charpoly_cap():
    graph = build_coset_graph(horizontal_subgroup(G4), GENS4)
    with pytest.raises(SizeCapExceeded):
        char_poly(graph, cap=4)


# ---------------------------------------------------------------------------
# Cospectrality
# ---------------------------------------------------------------------------


def test_gassmann_pairs_are_cospectral():
    graphs = _rep_graphs()
    polys = [char_poly(g) for g in graphs]
    assert all(p.coefficients == polys[0].coefficients for p in polys[1:])


def test_isospectral_self_and_size_mismatch():
    h0 = horizontal_subgroup(G4)
    assert isospectral(h0, h0, GENS4).equal
    res = isospectral(h0, whole_group(G4), GENS4)
    assert not res.equal
    assert res.poly_h.degree == 16 and res.poly_k.degree == 1


def test_isospectral_spec_mismatch():
    with pytest.raises(SpecMismatch):
        isospectral(
            horizontal_subgroup(G4),
            horizontal_subgroup(heisenberg_group(F2)),
            GENS4,
        )


# ---------------------------------------------------------------------------
# Isomorphism
# ---------------------------------------------------------------------------


def test_identical_graphs_are_isomorphic_with_identity_witness():
    graph = _rep_graphs()[0]
    res = are_isomorphic(graph, graph)
    assert res.isomorphic
    assert res.witness == tuple(range(graph.n))
    assert verify_witness(graph.adjacency, graph.adjacency, res.witness)


def test_different_loop_counts_not_isomorphic():
    from gassmann.schreier import CosetGraph

    def tiny(adjacency):
        return CosetGraph(
            group=G4,
            subgroup_label="synthetic",
            gens=GENS4[:2],
            vertices=G4.elements[:2],
            adjacency=adjacency,
        )

    with_loops = tiny(((2, 0), (0, 2)))  # 4 loops, 2-regular
    mixed = tiny(((1, 1), (1, 1)))       # 2 loops, 2-regular
    assert not are_isomorphic(with_loops, mixed).isomorphic
    assert not are_isomorphic_bruteforce(with_loops, mixed).isomorphic


def test_different_vertex_counts_not_isomorphic():
    g1 = build_coset_graph(horizontal_subgroup(G4), GENS4)
    g2 = build_coset_graph(whole_group(G4), GENS4)
    assert not are_isomorphic(g1, g2).isomorphic


def test_refined_search_matches_bruteforce_on_gassmann_pairs():
    graphs = _rep_graphs()
    for i in range(len(graphs)):
        for j in range(i + 1, len(graphs)):
            fast = are_isomorphic(graphs[i], graphs[j])
            slow = are_isomorphic_bruteforce(graphs[i], graphs[j])
            assert fast.isomorphic == slow.isomorphic
            if fast.isomorphic:
                assert verify_witness(
                    graphs[i].adjacency, graphs[j].adjacency, fast.witness
                )


def test_conjugate_subgroups_give_isomorphic_graphs():
    sub = twisted_subgroup(LinearMap.from_flat(2, (0, 0, 1, 0), 2), G4)
    g = ((0, 1), (1, 1), (0, 0))
    moved = conjugate_subgroup(g, sub)
    res = are_isomorphic(
        build_coset_graph(sub, GENS4), build_coset_graph(moved, GENS4)
    )
    assert res.isomorphic


def test_isomorphism_cap():
    g1 = build_coset_graph(trivial_subgroup(heisenberg_group(F2)), default_generators(heisenberg_group(F2)))
    g2 = build_coset_graph(trivial_subgroup(heisenberg_group(F2)), default_generators(heisenberg_group(F2)))
    assert are_isomorphic(g1, g2).isomorphic  # 8 vertices, inside the cap
    big1 = build_coset_graph(trivial_subgroup(G4), GENS4)
    with pytest.raises(SizeCapExceeded):
        are_isomorphic(big1, big1, cap=32)  # 64 vertices
    with pytest.raises(SizeCapExceeded):
        are_isomorphic_bruteforce(big1, big1)  # brute cap is 16

import itertools

import pytest

from critdimer import permutations as perms
from critdimer.permutations import (
    BoundedAffinePermutation,
    Pairing,
    all_loopless,
    affine_f_crossings,
    alignments,
    bridges,
    crossing_relations,
    dual,
    dual_f_crossings,
    downshift,
    f_crossings,
    from_permutation,
    from_window,
    grassmann_necklace,
    mis_downup,
    mis_updown,
    pairing_crossings,
    pairing_to_perms,
    positroid,
    positroid_membership,
    remove_bridge,
    shift_conjugate,
    sign_vector,
    top_cell,
)


def s(*xs):
    return frozenset(xs)


def test_from_window_top_cell():
    f = from_window([3, 4, 5, 6])
    assert f == top_cell(2, 4)
    assert f.k == 2


def test_from_window_identity():
    f = from_window([1, 2, 3, 4])
    assert f.k == 0
    assert not f.is_loopless()


def test_from_window_rejects_non_bijection():
    with pytest.raises(ValueError):
        from_window([5, 4, 5, 6])


def test_from_window_rejects_bound_violation():
    # residues are a bijection and the sum works out, but f(4) = 9 > 4 + 4
    with pytest.raises(ValueError):
        from_window([2, 3, 4, 9])


def test_from_permutation_lifts():
    f = from_permutation([3, 4, 1, 2])
    assert f.window == (3, 4, 5, 6)
    g = from_permutation([1, 3, 2])
    assert g.window == (4, 3, 5)  # fixed point -> coloop by default
    h = from_permutation([1, 3, 2], fix_as_loops=True)
    assert h.window == (1, 3, 5)


def test_affine_values_and_inverse():
    f = top_cell(2, 4)
    assert f(5) == f(1) + 4
    assert f(0) == f(4) - 4
    for q in range(-3, 9):
        assert f(f.inverse_value(q)) == q


def test_necklace_top_cell():
    f = top_cell(2, 4)
    neck = grassmann_necklace(f)
    assert [neck[r] for r in range(1, 5)] == [s(1, 2), s(2, 3), s(3, 4), s(1, 4)]
    assert list(neck.j_sets) == [s(2), s(3), s(4), s(1)]


def test_necklace_k1():
    for n in (3, 5):
        f = top_cell(1, n)
        neck = grassmann_necklace(f)
        assert all(neck[r] == s(r) for r in range(1, n + 1))


def test_necklace_consistency_identity():
    # I_{q+1} = (I_q - {q}) + {fbar(q)} for loopless f
    for f in all_loopless(5):
        neck = grassmann_necklace(f)
        for q in range(1, 6):
            expected = (neck[q] - {q}) | {f.perm(q)}
            assert neck[q + 1] == expected


def test_f_crossings_top24():
    f = top_cell(2, 4)
    assert f_crossings(f) == {s(1, 2), s(2, 3), s(3, 4), s(1, 4)}


def test_f_crossings_k1_empty():
    for n in (2, 4, 6):
        assert f_crossings(top_cell(1, n)) == set()


def test_misalignments_top24():
    # The non-crossing pairs of f_{2,4} are misalignments of the up-down type:
    # both chord tests put +s,-p,+t,-q in clockwise order.  (The spec's example
    # listed these under Mis-downup; the chord-order test and the twist-formula
    # suite pin them to Mis-updown.)
    f = top_cell(2, 4)
    assert mis_updown(f) == {s(1, 3), s(2, 4)}
    assert mis_downup(f) == set()


def test_misalignments_top34():
    f = top_cell(3, 4)
    assert mis_downup(f) == {s(1, 3), s(2, 4)}
    assert mis_updown(f) == set()


def test_affine_vs_plain_crossings_exhaustive():
    for n in range(2, 8):
        for f in all_loopless(n):
            plain = f_crossings(f)
            aff = affine_f_crossings(f)
            for p, q in itertools.combinations(range(1, n + 1), 2):
                expect = frozenset((p, q)) in plain
                got = (p, q) in aff or (q, p + n) in aff
                assert expect == got, (f, p, q)


def test_structural_maps_top24():
    f = top_cell(2, 4)
    assert dual(f) == f  # f-hat(p) = p - 2 + 4 = p + 2
    assert downshift(f) == top_cell(1, 4)
    assert f.length() == 0


def test_dual_involutive_and_downshift_length():
    for f in all_loopless(5):
        assert dual(dual(f)) == f
        assert downshift(f).length() == f.length()


def test_shift_conjugate():
    for f in all_loopless(4):
        g = shift_conjugate(f)
        assert g.k == f.k
        # conjugating n times is the identity
        h = f
        for _ in range(f.n):
            h = shift_conjugate(h)
        assert h == f


def test_sign_vector_direct_definition():
    for f in all_loopless(5):
        eps = sign_vector(f)
        assert eps[0] == 1
        for r in range(2, 6):
            flip = f.perm(r - 1) <= r - 1
            assert (eps[r - 1] != eps[r - 2]) == flip


def test_positroid_top_cell_all_subsets():
    f = top_cell(2, 4)
    assert len(positroid(f)) == 6
    f = top_cell(1, 4)
    assert all(positroid_membership(f, {j}) for j in range(1, 5))


def test_positroid_with_coloop():
    # Loopless f with a coloop at 4.  (The spec's window [2,3,4,9] is not a
    # valid bounded affine permutation: residues 4 and 9 collide mod 4 and 9
    # violates f(j) <= j + n; [2,3,5,8] realizes the intended checks.)
    f = from_window([2, 3, 5, 8])
    assert f.k == 2 and f.coloops() == [4]
    assert not positroid_membership(f, {1, 2})
    assert positroid_membership(f, {1, 4})
    # every member of M_f must contain the coloop
    assert all(4 in J for J in positroid(f))


def test_positroid_wrong_cardinality():
    with pytest.raises(ValueError):
        positroid_membership(top_cell(2, 4), {1})


def test_bridges_top_cells():
    assert bridges(top_cell(2, 4)) == [1, 2, 3, 4]
    for n in (2, 3, 5):
        assert bridges(top_cell(1, n)) == list(range(1, n + 1))


def test_remove_bridge():
    f = top_cell(2, 4)
    g = remove_bridge(f, 1)
    assert g.window == (4, 3, 5, 6)
    h = remove_bridge(f, 4)  # wraparound bridge
    assert h(4) == f(5) - 4 + 4  # f'(4) = f(5) means f'(4) = f(1) + 4
    assert h.window == (2, 4, 5, 7)
    with pytest.raises(ValueError):
        remove_bridge(g, 1)


def test_bridge_peels_to_base():
    # every loopless f peels to a 1-element base via bridges, loops and coloops
    for f in all_loopless(5):
        g = f
        for _ in range(100):
            if g.n == 1:
                break
            br = bridges(g)
            if br:
                g = remove_bridge(g, br[0])
            elif g.loops():
                g = perms.delete_index(g, g.loops()[0])
            elif g.coloops():
                g = perms.delete_index(g, g.coloops()[0])
            else:
                raise AssertionError(f"stuck while peeling {g}")
        assert g.n == 1


def test_pairing_basics():
    tau = Pairing([3, 4, 1, 2])
    assert tau.pairs() == [(1, 3), (2, 4)]
    with pytest.raises(ValueError):
        Pairing([1, 2, 4, 3])
    with pytest.raises(ValueError):
        Pairing([2, 1, 3, 4])


def test_pairing_crossings():
    assert len(pairing_crossings(Pairing([3, 4, 1, 2]))) == 1
    assert len(pairing_crossings(Pairing([2, 1, 4, 3]))) == 0


def test_pairing_to_perms():
    tau = Pairing([3, 4, 1, 2])
    out = pairing_to_perms(tau)
    assert out["ising"] == top_cell(2, 4)
    assert out["elec"].window == (4, 5, 6, 7)
    assert out["elec"].k == 3


def test_crossing_relations_dispatch():
    f = top_cell(2, 4)
    rel = crossing_relations(f)
    assert rel["f_crossings"] == {s(1, 2), s(2, 3), s(3, 4), s(1, 4)}
    assert "dual_f_crossings" in rel  # top cell is coloopless too
    g = from_window([2, 3, 5, 8])  # has a coloop: no dual crossings offered
    rel2 = crossing_relations(g)
    assert "dual_f_crossings" not in rel2
    assert "f_crossings" in rel2


def test_dual_crossings_f14():
    # arrows -(p-1) -> +p: consecutive chords cross, non-adjacent ones do not
    f = top_cell(1, 4)
    assert dual_f_crossings(f) == {s(1, 2), s(2, 3), s(3, 4), s(1, 4)}


def test_json_roundtrip():
    f = from_window([3, 4, 5, 6])
    assert BoundedAffinePermutation.from_json(f.to_json()) == f

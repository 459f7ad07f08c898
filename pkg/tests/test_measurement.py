import cmath
import itertools
import math
import random

import numpy as np
import pytest

from critdimer.laurent import LaurentPoly, bracket, bracket_eval
from critdimer.measurement import (
    MatrixPoint,
    PluckerVector,
    common_factor_exponents,
    cross_ratio,
    cross_ratio_theta,
    enumerate_matchings,
    matchings_by_boundary,
    meas_f,
    meas_f_theta,
    measure,
    measure_symbolic,
    necklace_products,
    symbolic_measurement,
    twist_left,
    twist_minor_formula,
    twist_monomial_exponents,
    upstream_wedge_pairs,
)
from critdimer.permutations import (
    all_loopless,
    from_window,
    grassmann_necklace,
    positroid,
    top_cell,
)
from critdimer.plabic import (
    bridge_graph,
    critical_weights_t,
    le_graph,
    random_positive_weights,
    single_white_star,
    triangulation_graph,
)
from critdimer.strands import t_sample, theta_sample


GOLDEN = {
    (1, 2): (3, 2), (2, 3): (4, 3), (3, 4): (4, 1),
    (1, 4): (2, 1), (1, 3): (4, 2), (2, 4): (3, 1),
}


def test_star_matchings():
    G = single_white_star(4)
    groups = matchings_by_boundary(G)
    assert set(groups) == {frozenset((r,)) for r in range(1, 5)}
    assert all(len(ms) == 1 for ms in groups.values())


def test_upstream_wedges_f24():
    f = top_cell(2, 4)
    assert upstream_wedge_pairs(f, 1) == {frozenset((2, 3))}
    assert upstream_wedge_pairs(f, 2) == {frozenset((3, 4))}
    assert upstream_wedge_pairs(f, 3) == {frozenset((1, 4))}
    assert upstream_wedge_pairs(f, 4) == {frozenset((1, 2))}


def test_golden_gauge_fixed_vector():
    # Criterion 1: exact equality with the common factor [24] cancelled
    for G in (triangulation_graph(4), le_graph(top_cell(2, 4))):
        X = measure_symbolic(G)
        for I, (q, p) in GOLDEN.items():
            assert X[frozenset(I)] == bracket(4, q, p), I


def test_common_factor_f24():
    G = triangulation_graph(4)
    assert common_factor_exponents(G) == {frozenset((2, 4)): 1}


def test_raw_symbolic_divisibility_error():
    # mutilate a weight so the division genuinely fails
    G = triangulation_graph(4)
    X = measure_symbolic(G, gauge_fix=False)
    bad = X[frozenset((1, 3))] + LaurentPoly.one(4)
    with pytest.raises(ValueError):
        bad.divide_bracket(4, 2)


def test_positivity_pattern_on_cells(loopless_by_n):
    # positive weights make exactly the positroid minors positive
    rng = random.Random(0)
    for f in loopless_by_n[4]:
        G = le_graph(f)
        wt = random_positive_weights(G, rng)
        X = measure(G, wt)
        M = positroid(f)
        for I in X.subsets():
            if I in M:
                assert X[I].real > 0
            else:
                assert abs(X[I]) < 1e-12


def test_necklace_products_match_exhaustive(loopless_by_n):
    # measure_symbolic itself asserts the necklace identity; spot-check values
    for f in loopless_by_n[5][:24]:
        X = symbolic_measurement(f)
        neck = grassmann_necklace(f)
        target = necklace_products(f)
        for r in range(1, 6):
            assert X[neck[r]] == target[r]


def test_meas_f_example_18():
    # t1 = t3, t2 = t4 kills every raw dimer sum but meas_f is well defined
    f = top_cell(2, 4)
    t = (1.0 + 0j, cmath.exp(0.4j) * 1.3, 1.0 + 0j, cmath.exp(0.4j) * 1.3)
    G = triangulation_graph(4)
    wt = critical_weights_t(G, t)
    with pytest.raises(ValueError):
        measure(G, wt)       # all coordinates vanish
    X = meas_f(f, t)
    assert abs(X[frozenset((1, 3))]) < 1e-12
    assert abs(X[frozenset((2, 4))]) < 1e-12
    assert abs(X[frozenset((1, 2))]) > 0.1


def test_meas_f_rejects_inadmissible():
    f = top_cell(2, 4)
    with pytest.raises(ValueError):
        meas_f(f, (1.0, 1.0, 2.0, 0.5))   # t1 = t2 on the crossing {1,2}


def test_meas_f_single_point_k1():
    f = top_cell(1, 4)
    t = t_sample(f, 0, pin=False)
    X = meas_f(f, t)
    arr = X.normalized()
    assert np.allclose(arr, 1.0)


def test_meas_f_theta_regular_symmetric():
    from critdimer.symmetry import cyclic_shift
    from critdimer.strands import theta_regular

    X = meas_f_theta(top_cell(2, 4), theta_regular(4))
    assert X.projective_distance(cyclic_shift(X)) < 1e-10
    arr = np.abs(X.normalized())
    neck = [frozenset(s) for s in [(1, 2), (2, 3), (3, 4), (1, 4)]]
    vals = [abs(X[I]) for I in neck]
    assert max(vals) - min(vals) < 1e-10 * max(vals)


def test_matrix_point_roundtrip():
    rng = np.random.default_rng(3)
    A = MatrixPoint(rng.normal(size=(2, 5)) + 1j * rng.normal(size=(2, 5)))
    X = A.minors()
    B = MatrixPoint.from_plucker(X)
    assert B.minors().projective_distance(X) < 1e-12


def test_twist_necklace_reciprocal():
    # necklace faces: twisted minor * minor = 1 after the canonical gauge
    f = top_cell(2, 4)
    t = t_sample(f, 4, require="generic", pin=False)
    X = meas_f(f, t)
    A = MatrixPoint.from_plucker(X, pivot=sorted(grassmann_necklace(f)[1]))
    # scale the matrix so the pivot minor equals the canonical gauge value
    target = X[grassmann_necklace(f)[1]]
    got = A.minors()[grassmann_necklace(f)[1]]
    A = MatrixPoint(A.A * (target / got) ** (1.0 / f.k))
    tw = twist_left(A, f).minors()
    neck = grassmann_necklace(f)
    for r in range(1, 5):
        prod = tw[neck[r]] * A.minors()[neck[r]]
        assert abs(prod - 1) < 1e-9


def test_twist_f14_reciprocals():
    # k = 1: every subset is a necklace element, so all twist minors invert
    f = top_cell(1, 4)
    rng = np.random.default_rng(1)
    A = MatrixPoint(np.abs(rng.normal(size=(1, 4))) + 0.2)
    tw = twist_left(A, f).minors()
    X = A.minors()
    vals = [complex(tw[frozenset((r,))] * X[frozenset((r,))]) for r in range(1, 5)]
    assert all(abs(v - vals[0]) < 1e-12 for v in vals)


def test_twist_monomial_formula(loopless_by_n):
    # Criterion 5 content at a sample of permutations
    for n in (4, 5):
        for f in loopless_by_n[n][:12]:
            G = le_graph(f)
            labels = {F.label for F in G.faces()}
            for seed in (0, 1):
                try:
                    t = t_sample(f, seed, require="generic", pin=False)
                except RuntimeError:
                    continue
                X = meas_f(f, t)
                tw = twist_left(MatrixPoint.from_plucker(X), f).minors()
                vals = np.array([complex(tw[lab]) for lab in labels])
                mono = np.array([twist_minor_formula(f, lab, t) for lab in labels])
                i0 = int(np.argmax(np.abs(vals)))
                dev = np.max(np.abs(vals / vals[i0] - mono / mono[i0]))
                assert dev < 1e-10, (f, seed, dev)


def test_twist_exponents_f24():
    f = top_cell(2, 4)
    # necklace face {1,2}: single crossing edge 2 -> 3 leaves I
    exps = twist_monomial_exponents(f, (1, 2))
    assert exps == {frozenset((2, 3)): -1}
    # diagonal face {1,3}: the up-down misalignment {1,3} sits inside
    exps = twist_monomial_exponents(f, (1, 3))
    assert exps[frozenset((1, 3))] == 1


def test_cross_ratio_identities():
    rng = random.Random(0)
    for _ in range(50):
        t = [cmath.exp(complex(rng.uniform(-0.2, 0.2), rng.uniform(0, 2))) * rng.uniform(0.5, 2)
             for _ in range(4)]
        try:
            a = cross_ratio(t, 1, 2, 3, 4)
            b = cross_ratio(t, 1, 3, 2, 4)
        except ValueError:
            continue
        assert abs(a - (1 - b)) < 1e-12 * max(1.0, abs(a))
    # concentric values -> real cross ratio
    rng2 = random.Random(1)
    th = sorted(rng2.uniform(0, math.pi) for _ in range(4))
    val = cross_ratio_theta(th, 1, 2, 3, 4)
    assert abs(val.imag) < 1e-10
    with pytest.raises(ValueError):
        cross_ratio([1, 2, 1, 3], 1, 2, 1, 4)


def test_plucker_vector_projective_compare():
    X = PluckerVector(1, 3, {frozenset((1,)): 2, frozenset((2,)): 4, frozenset((3,)): 6})
    Y = PluckerVector(1, 3, {frozenset((1,)): 1, frozenset((2,)): 2, frozenset((3,)): 3})
    assert X.projective_distance(Y) < 1e-15
    assert X.projectively_equal_exact(Y)
    Z = PluckerVector(1, 3, {frozenset((1,)): 1, frozenset((2,)): 2, frozenset((3,)): 4})
    assert not Z.projectively_equal_exact(Y)

"""Almost perfect matchings, dimer partition functions, and the twist.

Numeric measurements sum matching weights per boundary subset; exact
measurements work in the Laurent ring, divide out the common factor
R_G(t) = prod [q,p]^{y_pq}, and land in the canonical gauge where the
Grassmann-necklace coordinates are the upstream-wedge bracket products.
The boundary measurement map of a loopless f is the canonically gauged
vector of a Le graph of f, cached per f and evaluated at numeric t.
"""

from __future__ import annotations

import cmath
import functools
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from critdimer.laurent import LaurentPoly, bracket, bracket_eval
from critdimer.permutations import (
    BoundedAffinePermutation,
    f_crossings,
    grassmann_necklace,
    mis_downup,
    mis_updown,
    pos_minus,
    pos_plus,
)
from critdimer.plabic import BLACK, WHITE, PlabicGraph, le_graph, symbolic_weights
from critdimer.strands import _t_values, _theta_values, positive_crossings


@dataclass(frozen=True)
class Matching:
    edges: frozenset[int]
    boundary: frozenset[int]


def enumerate_matchings(G: PlabicGraph) -> list[Matching]:
    """All almost perfect matchings: every interior vertex is used exactly
    once.  The boundary subset records used black and unused white boundary
    vertices."""
    interior = G.interior_vertices()
    inc = {v: list(G.rotations[v]) for v in interior}
    order = sorted(interior, key=lambda v: len(inc[v]))
    out: list[Matching] = []

    def backtrack(i: int, used_vertices: set, chosen: list[int]):
        while i < len(order) and order[i] in used_vertices:
            i += 1
        if i == len(order):
            used_edges = frozenset(chosen)
            used_b = {v for e in chosen for v in G.edges[e] if G.is_boundary(v)}
            bd = set()
            for p in range(1, G.n + 1):
                b = G.boundary[p - 1]
                if (G.colors[b] == BLACK) == (b in used_b):
                    bd.add(p)
            out.append(Matching(used_edges, frozenset(bd)))
            return
        v = order[i]
        for e in inc[v]:
            w = G.other_end(e, v)
            if w in used_vertices:
                continue
            used_vertices.add(v)
            used_vertices.add(w)
            chosen.append(e)
            backtrack(i + 1, used_vertices, chosen)
            chosen.pop()
            used_vertices.discard(v)
            used_vertices.discard(w)

    backtrack(0, set(), [])
    if not out:
        raise ValueError("graph admits no almost perfect matching")
    sizes = {len(m.boundary) for m in out}
    if len(sizes) != 1:
        raise AssertionError("matchings with different boundary sizes")
    return out


def matchings_by_boundary(G: PlabicGraph) -> dict[frozenset[int], list[Matching]]:
    groups: dict[frozenset[int], list[Matching]] = {}
    for m in enumerate_matchings(G):
        groups.setdefault(m.boundary, []).append(m)
    return groups


# -- Pluecker vectors -----------------------------------------------------------


class PluckerVector:
    """Coordinates indexed by k-subsets of [n], compared projectively."""

    def __init__(self, k: int, n: int, data: dict):
        self.k = k
        self.n = n
        self.data = {frozenset(I): v for I, v in data.items()}
        for I in itertools.combinations(range(1, n + 1), k):
            self.data.setdefault(frozenset(I), 0)
        if all(self._iszero(v) for v in self.data.values()):
            raise ValueError("all Pluecker coordinates are zero")

    @staticmethod
    def _iszero(v) -> bool:
        if isinstance(v, LaurentPoly):
            return v.is_zero()
        return v == 0

    def __getitem__(self, I) -> object:
        return self.data[frozenset(I)]

    def subsets(self) -> list[frozenset[int]]:
        return sorted(self.data, key=lambda s: sorted(s))

    def to_numeric(self, t: Sequence[complex] | None = None) -> "PluckerVector":
        data = {}
        for I, v in self.data.items():
            data[I] = v.eval(list(t)) if isinstance(v, LaurentPoly) else complex(v)
        return PluckerVector(self.k, self.n, data)

    def as_array(self) -> np.ndarray:
        return np.array([complex(self.data[I]) for I in self.subsets()])

    def normalized(self) -> np.ndarray:
        arr = self.as_array()
        i = int(np.argmax(np.abs(arr)))
        return arr / arr[i]

    def projective_distance(self, other: "PluckerVector") -> float:
        if (self.k, self.n) != (other.k, other.n):
            raise ValueError("shape mismatch")
        a = self.as_array()
        b = other.as_array()
        i = int(np.argmax(np.abs(a) * np.abs(b)))
        if a[i] == 0 or b[i] == 0:
            return math.inf
        a = a / a[i]
        b = b / b[i]
        scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1.0)
        return float(np.max(np.abs(a - b)) / scale)

    def projectively_equal_exact(self, other: "PluckerVector") -> bool:
        """Cross-multiplication equality for exact (Laurent/rational) data."""
        pairs = [(self.data[I], other.data[I]) for I in self.data]
        ref = next(((a, b) for a, b in pairs
                    if not self._iszero(a) and not self._iszero(b)), None)
        if ref is None:
            return False
        a0, b0 = ref
        for a, b in pairs:
            if self._iszero(a) != self._iszero(b):
                return False
            if a * b0 != b * a0:
                return False
        return True

    def scalar_multiple_of(self, other: "PluckerVector"):
        """The exact ratio self/other when they are projectively equal."""
        for I, v in self.data.items():
            if not self._iszero(v) and not self._iszero(other.data[I]):
                return v, other.data[I]
        raise ValueError("no common nonzero coordinate")


def measure(G: PlabicGraph, wt: dict) -> PluckerVector:
    """Numeric boundary measurement: Delta_I = sum of matching weights."""
    groups = matchings_by_boundary(G)
    k = len(next(iter(groups)))
    data = {}
    for I, ms in groups.items():
        total = 0
        for m in ms:
            w = 1
            for e in m.edges:
                w = w * wt[e]
            total += w
        data[I] = total
    return PluckerVector(k, G.n, data)


def edge_label_counts(G: PlabicGraph) -> dict[frozenset[int], int]:
    """x_{p,q}(G): the number of interior edges labeled {p,q}."""
    counts: dict[frozenset[int], int] = {}
    labels = G.trace().edge_labels
    for e, lab in labels.items():
        u, v = G.edges[e]
        if G.is_boundary(u) or G.is_boundary(v):
            continue
        if len(lab) == 2:
            counts[lab] = counts.get(lab, 0) + 1
    return counts


def common_factor_exponents(G: PlabicGraph) -> dict[frozenset[int], int]:
    """y_{p,q}(G): (x-1)/2 on crossings, x/2 otherwise; parity is asserted."""
    f = G.trace().f
    crossings = f_crossings(f)
    y = {}
    for lab, x in edge_label_counts(G).items():
        if lab in crossings:
            if x % 2 != 1:
                raise AssertionError(f"even count {x} on crossing label {set(lab)}")
            y[lab] = (x - 1) // 2
        else:
            if x % 2 != 0:
                raise AssertionError(f"odd count {x} on non-crossing label {set(lab)}")
            y[lab] = x // 2
    return {lab: e for lab, e in y.items() if e}


def common_factor(G: PlabicGraph) -> LaurentPoly:
    """R_G(t) = prod over pairs of [q,p]^{y_pq}."""
    R = LaurentPoly.one(G.n)
    for lab, e in common_factor_exponents(G).items():
        p, q = sorted(lab)
        R = R * bracket(G.n, q, p) ** e
    return R


def upstream_wedge_pairs(f: BoundedAffinePermutation, r: int) -> set[frozenset[int]]:
    """Crossing pairs {p,q} whose upstream wedge contains the boundary arc
    between +(r-1) and -r."""
    n = f.n
    pw = f.perm_window()
    arc_lo = pos_plus(r - 1, n)      # the arc (arc_lo, arc_hi) has no marks inside
    out = set()
    for e in f_crossings(f):
        p, q = sorted(e)
        s, t = pw.index(p) + 1, pw.index(q) + 1
        a, b = pos_plus(s, n), pos_plus(t, n)
        mp, mq = pos_minus(p, n), pos_minus(q, n)
        N = 3 * n
        # the arc from a to b (one way or the other) avoiding -p and -q
        inside_cw = lambda x, u, v: 0 < (x - u) % N < (v - u) % N
        if not inside_cw(mp, a, b) and not inside_cw(mq, a, b):
            lo, hi = a, b
        elif not inside_cw(mp, b, a) and not inside_cw(mq, b, a):
            lo, hi = b, a
        else:
            raise AssertionError("crossing chords with no clean wedge arc")
        # the open arc (arc_lo, arc_lo + 1) between +(r-1) and -r lies inside
        # the closed wedge arc [lo, hi]
        if (arc_lo - lo) % N + 1 <= (hi - lo) % N:
            out.add(e)
    return out


def necklace_products(f: BoundedAffinePermutation) -> dict[int, LaurentPoly]:
    """The gauge-fixed necklace coordinates prod_{UW^{-1}(I_r)} [q,p]."""
    out = {}
    for r in range(1, f.n + 1):
        P = LaurentPoly.one(f.n)
        for e in upstream_wedge_pairs(f, r):
            p, q = sorted(e)
            P = P * bracket(f.n, q, p)
        out[r] = P
    return out


def measure_symbolic(G: PlabicGraph, gauge_fix: bool = True) -> PluckerVector:
    """Exact boundary measurement with bracket edge weights.

    With gauge_fix (default), every coordinate is divided by R_G(t); the
    divisions must be exact, and the necklace coordinates then equal the
    upstream-wedge products (up to one global sign fixed here).
    """
    f = G.trace().f
    if not f.is_loopless():
        raise ValueError("symbolic measurement needs a loopless strand permutation")
    wt = symbolic_weights(G)
    groups = matchings_by_boundary(G)
    n = G.n
    data: dict[frozenset[int], LaurentPoly] = {}
    for I, ms in groups.items():
        total = LaurentPoly.zero(n)
        for m in ms:
            w = LaurentPoly.one(n)
            for e in m.edges:
                w = w * wt[e]
            total = total + w
        data[I] = total
    k = len(next(iter(groups)))
    if not gauge_fix:
        return PluckerVector(k, n, data)
    exps = common_factor_exponents(G)
    fixed = {}
    for I, P in data.items():
        for lab, e in exps.items():
            p, q = sorted(lab)
            for _ in range(e):
                P = P.divide_bracket(q, p)
        fixed[I] = P
    # pin the global sign so the necklace coordinates match the products
    neck = grassmann_necklace(f)
    target = necklace_products(f)
    I1 = neck[1]
    got, want = fixed[I1], target[1]
    if got == want:
        sign = 1
    elif got == -want:
        sign = -1
    else:
        raise AssertionError("necklace coordinate is not the upstream-wedge product")
    if sign == -1:
        fixed = {I: -P for I, P in fixed.items()}
    for r in range(2, f.n + 1):
        if fixed[neck[r]] != target[r]:
            raise AssertionError(f"necklace coordinate {r} mismatch after gauge fix")
    return PluckerVector(k, n, fixed)


@functools.lru_cache(maxsize=None)
def _measured_cell(window: tuple[int, ...]) -> PluckerVector:
    f = BoundedAffinePermutation(window)
    return measure_symbolic(le_graph(f))


def symbolic_measurement(f: BoundedAffinePermutation) -> PluckerVector:
    """The canonically gauge-fixed exact measurement of f (cached)."""
    return _measured_cell(f.window)


class CellEvaluator:
    """Vectorized evaluation of the gauge-fixed measurement at numeric t."""

    def __init__(self, f: BoundedAffinePermutation):
        self.f = f
        sym = symbolic_measurement(f)
        self.subsets = sym.subsets()
        self.k, self.n = sym.k, sym.n
        self.pieces = []
        for I in self.subsets:
            P = sym[I]
            if not isinstance(P, LaurentPoly):
                P = LaurentPoly.const(self.n, P)
            if P.is_zero():
                self.pieces.append(None)
                continue
            exps = np.array(list(P.terms.keys()), dtype=float)
            coeffs = np.array([complex(c) for c in P.terms.values()])
            self.pieces.append((exps, coeffs))
        neck = grassmann_necklace(f)
        self.necklace_pos = [self.subsets.index(neck[r])
                             for r in range(1, f.n + 1)]

    def __call__(self, t) -> PluckerVector:
        tv = np.asarray(_t_values(t), dtype=complex)
        data = {}
        vals = []
        for I, piece in zip(self.subsets, self.pieces):
            if piece is None:
                data[I] = 0j
                vals.append(0j)
                continue
            exps, coeffs = piece
            v = complex(np.sum(coeffs * np.prod(tv[None, :] ** exps, axis=1)))
            data[I] = v
            vals.append(v)
        scale = max(abs(v) for v in vals)
        for pos in self.necklace_pos:
            if abs(vals[pos]) <= 1e-13 * scale:
                raise ValueError("necklace coordinate vanishes: t not admissible")
        return PluckerVector(self.k, self.n, data)


@functools.lru_cache(maxsize=None)
def cell_evaluator(window: tuple[int, ...]) -> CellEvaluator:
    return CellEvaluator(BoundedAffinePermutation(window))


def meas_f(f: BoundedAffinePermutation, t) -> PluckerVector:
    """Meas(f, t) for admissible t, through the canonical symbolic gauge.

    Well defined even where the raw dimer sums all vanish; raises when some
    necklace coordinate vanishes (t not admissible)."""
    return cell_evaluator(f.window)(t)


def meas_f_theta(f: BoundedAffinePermutation, theta) -> PluckerVector:
    th = _theta_values(theta)
    return meas_f(f, [cmath.exp(1j * x) for x in th])


# -- matrix representatives ------------------------------------------------------


class MatrixPoint:
    """A k x n full-rank matrix representing a point of Gr(k,n), with the
    column extension A_{q+n} = (-1)^{k-1} A_q."""

    def __init__(self, array):
        self.A = np.asarray(array, dtype=complex)
        if self.A.ndim != 2:
            raise ValueError("need a 2d array")
        self.k, self.n = self.A.shape
        if np.linalg.matrix_rank(self.A, tol=1e-10 * max(1.0, float(np.abs(self.A).max()))) < self.k:
            raise ValueError("matrix is rank deficient")

    def column(self, q: int) -> np.ndarray:
        m, r = divmod(q - 1, self.n)
        return self.A[:, r] * ((-1) ** ((self.k - 1) * (m % 2)))

    def minors(self) -> PluckerVector:
        data = {}
        for I in itertools.combinations(range(1, self.n + 1), self.k):
            data[frozenset(I)] = complex(np.linalg.det(self.A[:, [i - 1 for i in I]]))
        return PluckerVector(self.k, self.n, data)

    @staticmethod
    def from_plucker(X: PluckerVector, pivot: Iterable[int] | None = None) -> "MatrixPoint":
        """Reconstruct a matrix in row-echelon normal form at a nonzero minor
        of a numeric Pluecker vector."""
        k, n = X.k, X.n
        if any(isinstance(v, LaurentPoly) for v in X.data.values()):
            raise TypeError("evaluate the Pluecker vector before reconstructing")
        num = X
        if pivot is None:
            pivot = max((I for I in num.data), key=lambda I: abs(num[I]))
        pivot = sorted(pivot)
        base = num[frozenset(pivot)]
        if base == 0:
            raise ValueError("pivot minor vanishes")
        A = np.zeros((k, n), dtype=complex)
        for r in range(k):
            A[r, pivot[r] - 1] = 1.0
        for j in range(1, n + 1):
            if j in pivot:
                continue
            for r in range(k):
                cols = pivot[:r] + [j] + pivot[r + 1:]
                sign = (-1) ** _sort_sign(cols)
                A[r, j - 1] = sign * num[frozenset(cols)] / base
        return MatrixPoint(A)


def _sort_sign(seq: list[int]) -> int:
    """Parity of the permutation sorting seq (distinct entries)."""
    inv = 0
    for i, a in enumerate(seq):
        for b in seq[i + 1:]:
            if a > b:
                inv += 1
    return inv % 2


# -- twist -----------------------------------------------------------------------


def reverse_necklace_window(f: BoundedAffinePermutation, q: int) -> list[int]:
    """I'_q = {p in (q-n, q] : f(p) > q} as affine integers."""
    out = []
    for p in range(q - f.n + 1, q + 1):
        if f(p) > q:
            out.append(p)
    return sorted(out)


def twist_left(X: MatrixPoint, f: BoundedAffinePermutation) -> MatrixPoint:
    """The left twist: <tw(A)_q, A_q> = 1 and <tw(A)_q, A_p> = 0 for
    p < q < f(p), solved over the reverse-necklace column basis."""
    if not f.is_loopless():
        raise ValueError("left twist requires a loopless permutation")
    k, n = X.k, X.n
    out = np.zeros((k, n), dtype=complex)
    for q in range(1, n + 1):
        idx = reverse_necklace_window(f, q)
        if q not in idx:
            raise AssertionError("reverse necklace misses its own index")
        B = np.stack([X.column(p) for p in idx], axis=1)
        rhs = np.zeros(k, dtype=complex)
        rhs[idx.index(q)] = 1.0
        try:
            out[:, q - 1] = np.linalg.solve(B.T, rhs)
        except np.linalg.LinAlgError:
            raise ValueError("reverse-necklace columns singular: X outside the open cell")
    return MatrixPoint(out)


def twist_monomial_exponents(f: BoundedAffinePermutation,
                             I: Iterable[int]) -> dict[frozenset[int], int]:
    """Exponent of [q,p] in the twisted-minor monomial for the face label I:
    +1 for up-down misalignments inside I and down-up ones outside, -1 for
    positive crossings leaving I."""
    I = frozenset(I)
    exps: dict[frozenset[int], int] = {}

    def bump(pair, d):
        exps[pair] = exps.get(pair, 0) + d
        if exps[pair] == 0:
            del exps[pair]

    for e in mis_updown(f):
        if e <= I:
            bump(e, +1)
    for e in mis_downup(f):
        if not (e & I):
            bump(e, +1)
    for (p, q) in positive_crossings(f):
        if p in I and q not in I:
            bump(frozenset((p, q)), -1)
    return exps


def twist_minor_formula(f: BoundedAffinePermutation, I: Iterable[int], t) -> complex:
    """Evaluate the twisted-minor monomial at t (defined up to one common
    scalar shared by all face labels)."""
    tv = _t_values(t)
    val = 1.0 + 0j
    for pair, e in twist_monomial_exponents(f, I).items():
        p, q = sorted(pair)
        val *= bracket_eval(tv[q - 1], tv[p - 1]) ** e
    return val


def cross_ratio(t, a: int, b: int, c: int, d: int) -> complex:
    """ch(a,b;c,d) = (v_c - v_a)(v_d - v_b) / ((v_c - v_b)(v_d - v_a)),
    where v_p = t_p^2."""
    tv = _t_values(t)
    if len({a, b, c, d}) != 4:
        raise ValueError("cross-ratio needs four distinct indices")
    v = {i: tv[i - 1] ** 2 for i in (a, b, c, d)}
    den = (v[c] - v[b]) * (v[d] - v[a])
    if den == 0:
        raise ValueError("degenerate quadruple")
    return (v[c] - v[a]) * (v[d] - v[b]) / den


def cross_ratio_theta(theta, a: int, b: int, c: int, d: int) -> complex:
    th = _theta_values(theta)
    return cross_ratio([cmath.exp(1j * x) for x in th], a, b, c, d)

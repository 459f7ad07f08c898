"""Explicit curve bases for boundary measurements.

The curve of (f, theta) has coordinates prod sin(s - theta~_p) over the
affine necklace complements J~_r; its complex version replaces sines by
brackets with the prefactor (2i)^{1-k}.  Spanning bases come from k sample
points, from the Laurent (Fourier) coefficients in the sample variable, or
in the degenerate case from masked derivatives of the polynomial variant.
The top-cell reconstruction inverts the measurement map through twisted
minors, cross-ratio/bridge data, and the inscribed-polygon solve.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from critdimer.measurement import (
    MatrixPoint,
    PluckerVector,
    grassmann_necklace,
    meas_f_theta,
    twist_left,
    twist_monomial_exponents,
)
from critdimer.permutations import (
    BoundedAffinePermutation,
    j_window,
    top_cell,
)
from critdimer.strands import TTuple, ThetaTuple, _t_values, _theta_values


def _theta_affine(theta: Sequence[float], p: int) -> float:
    n = len(theta)
    m, r = divmod(p - 1, n)
    return theta[r] + m * math.pi


def _t_affine(t: Sequence[complex], p: int) -> complex:
    n = len(t)
    m, r = divmod(p - 1, n)
    return t[r] * (-1) ** (m % 2)


def curve_point_theta(f: BoundedAffinePermutation, theta, s: float) -> np.ndarray:
    """gamma_r(s) = prod_{p in J~_r} sin(s - theta~_p); the affine index sets
    carry the sign vector automatically."""
    th = _theta_values(theta)
    out = np.empty(f.n)
    for r in range(1, f.n + 1):
        v = 1.0
        for p in j_window(f, r):
            v *= math.sin(s - _theta_affine(th, p))
        out[r - 1] = v
    return out


def curve_point_t(f: BoundedAffinePermutation, t, s: complex) -> np.ndarray:
    """gamma^C_r(s) = (2i)^{1-k} prod_{p in J~_r} (s/t~_p - t~_p/s)."""
    tv = _t_values(t)
    pre = (2j) ** (1 - f.k)
    out = np.empty(f.n, dtype=complex)
    for r in range(1, f.n + 1):
        v = pre
        for p in j_window(f, r):
            tp = _t_affine(tv, p)
            v *= s / tp - tp / s
        out[r - 1] = v
    return out


def default_sample_points_theta(k: int) -> list[float]:
    """k points in [0, pi), offset to dodge the common angle choices."""
    return [(j * math.pi) / k + 0.1 for j in range(k)]


def default_sample_points_t(k: int) -> list[complex]:
    return [1.1 ** (j + 1) * cmath.exp(1j * (0.7 * j + 0.3)) for j in range(k)]


def sample_matrix(f: BoundedAffinePermutation, param, samples=None) -> np.ndarray:
    """k x n matrix of curve points; complex when param is a t tuple."""
    is_theta = isinstance(param, ThetaTuple) or (
        not isinstance(param, TTuple)
        and all(not isinstance(x, complex) or x.imag == 0 for x in param))
    if is_theta:
        th = _theta_values(param)
        if samples is None:
            samples = default_sample_points_theta(f.k)
        rows = [curve_point_theta(f, th, s) for s in samples]
    else:
        tv = _t_values(param)
        if samples is None:
            samples = default_sample_points_t(f.k)
        rows = [curve_point_t(f, tv, s) for s in samples]
    return np.stack(rows, axis=0)


def span_pluckers(f: BoundedAffinePermutation, param, samples=None) -> PluckerVector:
    """Pluecker vector of the span of k curve samples; raises if the samples
    are rank deficient (degenerate parameters)."""
    if not f.is_loopless():
        raise ValueError("the curve formula is stated for loopless f")
    A = sample_matrix(f, param, samples)
    scale = float(np.abs(A).max()) or 1.0
    if np.linalg.matrix_rank(A, tol=1e-9 * scale) < f.k:
        raise ValueError("curve samples are rank deficient; use the derivative basis")
    return MatrixPoint(A).minors()


# -- Fourier coefficient basis ---------------------------------------------------


def elementary_symmetric(values: Sequence[complex], j: int) -> complex:
    if j < 0 or j > len(values):
        return 0j
    es = [1.0 + 0j] + [0.0j] * len(values)
    for v in values:
        for i in range(len(values), 0, -1):
            es[i] = es[i] + v * es[i - 1]
    return es[j]


def fourier_matrix(f: BoundedAffinePermutation, t) -> np.ndarray:
    """The k x n matrix c_{p,r} = e_{k-p}((t~_q^2)_{q in J~_r}) / prod t~_q,
    so that gamma^C_r(s) = (2i)^{1-k} sum_p (-1)^{k-p} c_{p,r} s^{2p-k-1}."""
    tv = _t_values(t)
    k, n = f.k, f.n
    F = np.empty((k, n), dtype=complex)
    for r in range(1, n + 1):
        tq = [_t_affine(tv, p) for p in j_window(f, r)]
        denom = np.prod(tq) if tq else 1.0
        squares = [x * x for x in tq]
        for p in range(1, k + 1):
            F[p - 1, r - 1] = elementary_symmetric(squares, k - p) / denom
    return F


def fourier_pluckers(f: BoundedAffinePermutation, t) -> PluckerVector:
    F = fourier_matrix(f, t)
    scale = float(np.abs(F).max()) or 1.0
    if np.linalg.matrix_rank(F, tol=1e-9 * scale) < f.k:
        raise ValueError("Fourier matrix is rank deficient")
    return MatrixPoint(F).minors()


# -- degenerate (derivative) basis -------------------------------------------------


@dataclass
class DegenerateBasis:
    vectors: np.ndarray              # n x n; row r is u_r
    multiplicities: tuple[int, ...]  # m_r
    support: tuple[frozenset[int], ...]


def _gamma_poly_coeffs(f: BoundedAffinePermutation, tv, r: int) -> np.ndarray:
    """Coefficients (ascending) of Gamma_r(x) = (2i)^{1-k} prod (x/t~_p - t~_p)."""
    coeffs = np.array([(2j) ** (1 - f.k)], dtype=complex)
    for p in j_window(f, r):
        tp = _t_affine(tv, p)
        # multiply by (x/tp - tp)
        up = np.concatenate([[0], coeffs]) / tp
        down = -tp * np.concatenate([coeffs, [0]])
        coeffs = up + down
    return coeffs


def _poly_deriv_eval(coeffs: np.ndarray, m: int, x: complex) -> complex:
    c = coeffs
    for _ in range(m):
        c = np.array([i * c[i] for i in range(1, len(c))], dtype=complex)
        if len(c) == 0:
            return 0j
    return complex(sum(ci * x ** i for i, ci in enumerate(c)))


def support_set(f: BoundedAffinePermutation, q: int) -> frozenset[int]:
    """supp_f(q) = {r : q not in J_r} (reduced index sets)."""
    neck = grassmann_necklace(f)
    return frozenset(r for r in range(1, f.n + 1) if q not in neck.j_sets[r - 1])


def degenerate_basis(f: BoundedAffinePermutation, t, tol: float = 1e-9) -> DegenerateBasis:
    """u_r = the m_r-th derivative of the polynomial curve at v_r = t_r^2,
    masked to supp_f(r); m_r counts coincidences v_q = v_r over q in J_r."""
    if not f.is_loopless():
        raise ValueError("needs a loopless permutation")
    tv = _t_values(t)
    n = f.n
    v = [x * x for x in tv]
    neck = grassmann_necklace(f)
    vectors = np.zeros((n, n), dtype=complex)
    mults = []
    supports = []
    for r in range(1, n + 1):
        m_r = sum(1 for q in neck.j_sets[r - 1]
                  if abs(v[q - 1] - v[r - 1]) <= tol * max(1.0, abs(v[r - 1])))
        supp = support_set(f, r)
        row = np.zeros(n, dtype=complex)
        for rp in range(1, n + 1):
            if rp in supp:
                coeffs = _gamma_poly_coeffs(f, tv, rp)
                row[rp - 1] = _poly_deriv_eval(coeffs, m_r, v[r - 1])
        vectors[r - 1] = row
        mults.append(m_r)
        supports.append(supp)
    return DegenerateBasis(vectors, tuple(mults), tuple(supports))


def degenerate_pluckers(f: BoundedAffinePermutation, t, r: int = 1) -> PluckerVector:
    """Pluecker vector of the basis {u_p : p in I_r}."""
    basis = degenerate_basis(f, t)
    neck = grassmann_necklace(f)
    rows = [basis.vectors[p - 1] for p in sorted(neck[r])]
    return MatrixPoint(np.stack(rows)).minors()


# -- dual curve --------------------------------------------------------------------


def dual_curve_point(f: BoundedAffinePermutation, t, s: complex) -> np.ndarray:
    """gamma-hat^C_r(s) = [t~_{f(r)}, t~_r] * gamma^C_r(s); zero at loops."""
    if not f.is_coloopless():
        raise ValueError("the dual curve is stated for coloopless f")
    tv = _t_values(t)
    base = curve_point_t(f, tv, s) if f.is_loopless() else None
    out = np.empty(f.n, dtype=complex)
    for r in range(1, f.n + 1):
        tf = _t_affine(tv, f(r))
        tr = _t_affine(tv, r)
        factor = tf / tr - tr / tf
        if base is not None:
            out[r - 1] = factor * base[r - 1]
        else:
            pre = (2j) ** (1 - f.k)
            v = pre
            for p in j_window(f, r):
                tp = _t_affine(tv, p)
                v *= s / tp - tp / s
            out[r - 1] = factor * v
    return out


def dual_sample_pluckers(f: BoundedAffinePermutation, t, samples=None) -> PluckerVector:
    tv = _t_values(t)
    if samples is None:
        samples = default_sample_points_t(f.k)
    rows = [dual_curve_point(f, tv, s) for s in samples]
    A = np.stack(rows)
    scale = float(np.abs(A).max()) or 1.0
    if np.linalg.matrix_rank(A, tol=1e-9 * scale) < f.k:
        raise ValueError("dual curve samples are rank deficient")
    return MatrixPoint(A).minors()


# -- top-cell reconstruction ---------------------------------------------------------


def inscribed_polygon_angles(sides: Sequence[float], tol: float = 1e-12) -> list[float]:
    """The unique 0 = phi_1 < ... < phi_m < pi with sin(phi_{j+1} - phi_j)
    proportional to the given sides (phi_{m+1} = pi).

    Solved by bisection on the common scale lambda with sin(gap_j) =
    lambda * side_j; the largest side may subtend an obtuse gap.
    """
    a = [float(x) for x in sides]
    if any(x <= 0 for x in a):
        raise ValueError("sides must be positive")
    m = len(a)
    imax = max(range(m), key=lambda i: a[i])
    if a[imax] >= sum(a) - a[imax]:
        raise ValueError("polygon inequality fails")
    amax = a[imax]

    def total_acute(lam: float) -> float:
        return sum(math.asin(min(1.0, lam * x)) for x in a)

    if total_acute(1.0 / amax) >= math.pi:
        lo, hi = 0.0, 1.0 / amax
        for _ in range(200):
            mid = (lo + hi) / 2
            if total_acute(mid) < math.pi:
                lo = mid
            else:
                hi = mid
            if hi - lo < tol * max(1.0, hi):
                break
        lam = (lo + hi) / 2
        gaps = [math.asin(min(1.0, lam * x)) for x in a]
    else:
        def g(lam: float) -> float:
            return (sum(math.asin(min(1.0, lam * x)) for i, x in enumerate(a) if i != imax)
                    - math.asin(min(1.0, lam * amax)))

        lo, hi = tol, 1.0 / amax
        for _ in range(200):
            mid = (lo + hi) / 2
            if g(mid) > 0:
                lo = mid
            else:
                hi = mid
            if hi - lo < tol * max(1.0, hi):
                break
        lam = (lo + hi) / 2
        gaps = [math.asin(min(1.0, lam * x)) for x in a]
        gaps[imax] = math.pi - gaps[imax]
    # normalize the tiny defect onto the last gap
    defect = math.pi - sum(gaps)
    gaps[-1] += defect
    phis = [0.0]
    for gap in gaps[:-1]:
        phis.append(phis[-1] + gap)
    return phis


class _BracketLog:
    """Least-squares recovery of log |[q,p]| combinations from twisted minors."""

    def __init__(self, f: BoundedAffinePermutation, X: PluckerVector):
        self.f = f
        self.n = f.n
        self.pairs = list(itertools.combinations(range(1, self.n + 1), 2))
        self.pair_index = {frozenset(pq): i for i, pq in enumerate(self.pairs)}
        A = MatrixPoint.from_plucker(X)
        tw = twist_left(A, f).minors()
        rows = []
        rhs = []
        for I in tw.subsets():
            val = tw[I]
            if abs(val) < 1e-13:
                raise ValueError("vanishing twisted minor on the top cell")
            exps = twist_monomial_exponents(f, I)
            row = [0.0] * (len(self.pairs) + 1)
            for pair, e in exps.items():
                row[self.pair_index[pair]] = float(e)
            row[-1] = 1.0
            rows.append(row)
            rhs.append(math.log(abs(val)))
        self.A = np.array(rows)
        self.b = np.array(rhs)
        sol, res, rank, _ = np.linalg.lstsq(self.A, self.b, rcond=None)
        self.sol = sol
        resid = float(np.max(np.abs(self.A @ sol - self.b)))
        if resid > 1e-6:
            raise ValueError(f"vector is not on the critical cell (residual {resid:.2e})")

    def ratio(self, num_pair: tuple[int, int], den_pair: tuple[int, int]) -> float:
        """|[num]| / |[den]| when the combination is determined by X."""
        delta = np.zeros(len(self.pairs) + 1)
        delta[self.pair_index[frozenset(num_pair)]] += 1.0
        delta[self.pair_index[frozenset(den_pair)]] -= 1.0
        # representability: delta must lie in the row space of A
        coeffs, _, _, _ = np.linalg.lstsq(self.A.T, delta, rcond=None)
        if np.max(np.abs(self.A.T @ coeffs - delta)) > 1e-8:
            raise ValueError("bracket ratio not determined by the measurement")
        return math.exp(float(delta @ self.sol))


def reconstruct_theta(k: int, n: int, X: PluckerVector, tol: float = 1e-6) -> ThetaTuple:
    """Invert the measurement map of the top cell f_{k,n} on its critical cell.

    Recovers the pinned admissible tuple (theta_1 = 0) through twisted-minor
    monomials: the quadrilateral (1,2,3,4) of side ratios feeds the inscribed
    polygon solve, the remaining angles come from anchored sine ratios, and
    the round trip against the measurement validates the output.
    """
    if not 2 <= k <= n - 1:
        raise ValueError("reconstruction needs 2 <= k <= n-1")
    if (X.k, X.n) != (k, n):
        raise ValueError("Pluecker vector shape mismatch")
    f = top_cell(k, n)
    arr = X.as_array()
    ref = arr[int(np.argmax(np.abs(arr)))]
    ratios = arr / ref
    if np.max(np.abs(ratios.imag)) > 1e-7 or np.min(ratios.real) < -1e-9:
        raise ValueError("vector has a nonreal or negative Pluecker ratio")
    logs = _BracketLog(f, X)
    if n == 3:
        sides = [1.0, logs.ratio((2, 3), (1, 2)), logs.ratio((1, 3), (1, 2))]
        phis = inscribed_polygon_angles(sides)
        theta = ThetaTuple(tuple(phis))
        _roundtrip_check(f, theta, X, tol)
        return theta
    quad = (1, 2, 3, 4)
    sides = [1.0,
             logs.ratio((2, 3), (1, 2)),
             logs.ratio((3, 4), (1, 2)),
             logs.ratio((1, 4), (1, 2))]
    phis = inscribed_polygon_angles(sides)
    theta = [0.0] * n
    theta[0], theta[1], theta[2], theta[3] = phis
    known = [1, 2, 3, 4]
    for q in range(5, n + 1):
        placed = False
        for u, w in itertools.combinations(known, 2):
            try:
                rho = logs.ratio(tuple(sorted((u, q))), tuple(sorted((w, q))))
            except ValueError:
                continue
            alpha, beta = theta[u - 1], theta[w - 1]
            # sin(x - alpha) / sin(x - beta) = rho, x in (beta, pi)
            num = math.sin(alpha) - rho * math.sin(beta)
            den = math.cos(alpha) - rho * math.cos(beta)
            x = math.atan2(num, den) % math.pi
            if x <= beta or x >= math.pi:
                continue
            check = math.sin(x - alpha) / math.sin(x - beta)
            if abs(check - rho) > 1e-6 * max(1.0, rho):
                continue
            theta[q - 1] = x
            placed = True
            break
        if not placed:
            raise ValueError(f"could not determine theta_{q} from the measurement")
        known.append(q)
    out = ThetaTuple(tuple(theta))
    _roundtrip_check(f, out, X, tol)
    return out


def _roundtrip_check(f, theta: ThetaTuple, X: PluckerVector, tol: float) -> None:
    Y = meas_f_theta(f, theta)
    dist = Y.projective_distance(X)
    if dist > tol:
        raise ValueError(f"reconstruction residual {dist:.2e} exceeds {tol}")

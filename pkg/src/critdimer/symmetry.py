"""Cyclic shift, alt-perp duality, dual measurements, and shift by 1.

The cyclic shift rotates matrix columns with a sign on the wrapped column
and acts on Pluecker labels by adding 1; alt-perp composes the orthogonal
complement (for the bilinear form) with alternating column signs and swaps
minors with their complements.  The shift-by-1 layer pairs black-trivalent
graphs of f with white-trivalent graphs of the downshift, transfers weights
along the face-label bijection (inverting boundary weights), and provides
the trivalent moves on both sides.
"""

from __future__ import annotations

import cmath
import itertools
import math
import random
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from critdimer.measurement import (
    MatrixPoint,
    PluckerVector,
    matchings_by_boundary,
    measure,
    twist_left,
)
from critdimer.permutations import (
    BoundedAffinePermutation,
    downshift,
    dual,
    dual_f_crossings,
    grassmann_necklace,
    shift_conjugate,
)
from critdimer.plabic import (
    BLACK,
    WHITE,
    Face,
    PlabicGraph,
    dual_critical_weights_t,
    dual_critical_weights_theta,
    critical_weights_theta,
    fan_triangulation,
    le_graph,
    square_faces,
    square_move,
    tree_graph,
    triangulation_graph,
)
from critdimer.strands import _t_values, _theta_values, is_admissible_theta


def shift_set(I, n: int, d: int = 1) -> frozenset[int]:
    return frozenset((i - 1 + d) % n + 1 for i in I)


def cyclic_shift(X):
    """S on a Pluecker vector (labels shift by one) or on a matrix point
    (columns rotate left, the wrapped column picks up (-1)^{k-1})."""
    if isinstance(X, PluckerVector):
        data = {I: X[shift_set(I, X.n, 1)] for I in X.data}
        return PluckerVector(X.k, X.n, data)
    if isinstance(X, MatrixPoint):
        A = X.A
        B = np.concatenate([A[:, 1:], ((-1) ** (X.k - 1)) * A[:, :1]], axis=1)
        return MatrixPoint(B)
    raise TypeError("cyclic_shift expects a PluckerVector or MatrixPoint")


def theta_compose_sigma(theta) -> tuple[float, ...]:
    """(theta~ o sigma)_p = theta~_{p+1} restricted to the window."""
    th = _theta_values(theta)
    return tuple(list(th[1:]) + [th[0] + math.pi])


def shift_equivariance_check(f: BoundedAffinePermutation, theta, tol: float = 1e-10) -> bool:
    """Meas(sigma^-1 f sigma, theta~ o sigma) = S(Meas(f, theta~))."""
    from critdimer.measurement import meas_f_theta

    lhs = meas_f_theta(shift_conjugate(f), theta_compose_sigma(theta))
    rhs = cyclic_shift(meas_f_theta(f, theta))
    return lhs.projective_distance(rhs) < tol


def alt_perp(X: MatrixPoint) -> MatrixPoint:
    """alt(X^perp): the orthogonal complement for the bilinear form (A x = 0),
    with the signs of the even-numbered columns flipped."""
    ns = scipy.linalg.null_space(X.A)          # columns x with A x = 0
    B = ns.T.copy()
    B[:, 1::2] *= -1
    return MatrixPoint(B)


def minor_complement_check(X: MatrixPoint, tol: float = 1e-12) -> bool:
    """Delta_I(X) = Delta_{[n]-I}(alt_perp(X)) projectively."""
    Y = alt_perp(X)
    mx = X.minors()
    my = Y.minors()
    data = {I: my[frozenset(range(1, X.n + 1)) - I] for I in mx.data}
    comp = PluckerVector(X.k, X.n, data)
    return mx.projective_distance(comp) < tol


# -- dual measurements ---------------------------------------------------------


def is_dual_admissible_theta(f: BoundedAffinePermutation, theta) -> bool:
    """theta_p < theta_q < theta_p + pi on every dual f-crossing."""
    th = _theta_values(theta)
    for e in dual_f_crossings(f):
        p, q = sorted(e)
        if not th[p - 1] < th[q - 1] < th[p - 1] + math.pi:
            return False
    return True


def theta_compose_f(f: BoundedAffinePermutation, theta) -> tuple[float, ...]:
    """(theta~ o f)_p = theta~_{f(p)} on the window p = 1..n."""
    th = _theta_values(theta)
    n = len(th)
    out = []
    for p in range(1, n + 1):
        q = f(p)
        m, r = divmod(q - 1, n)
        out.append(th[r] + m * math.pi)
    return tuple(out)


def dual_measure_theta(f: BoundedAffinePermutation, theta,
                       G: PlabicGraph | None = None) -> PluckerVector:
    """Meas-hat(f, theta): the measurement with sin weights on all edges."""
    if not f.is_coloopless():
        raise ValueError("the dual weighting needs a coloopless permutation")
    if G is None:
        G = le_graph(f)
    return measure(G, dual_critical_weights_theta(G, theta))


def dual_measure_t(f: BoundedAffinePermutation, t,
                   G: PlabicGraph | None = None) -> PluckerVector:
    if not f.is_coloopless():
        raise ValueError("the dual weighting needs a coloopless permutation")
    if G is None:
        G = le_graph(f)
    return measure(G, dual_critical_weights_t(G, t))


def duality_check(f: BoundedAffinePermutation, theta, tol: float = 1e-10) -> bool:
    """Admissibility transport and Meas(f, th~) = alt_perp(Meas-hat(f-hat, th~ o f))."""
    from critdimer.measurement import meas_f_theta

    fhat = dual(f)
    th_f = theta_compose_f(f, theta)
    if is_admissible_theta(f, theta) != is_dual_admissible_theta(fhat, th_f):
        return False
    if f.k == f.n:
        return True   # Gr(n,n) and Gr(0,n) are single points
    lhs = meas_f_theta(f, theta)
    rhs_hat = dual_measure_theta(fhat, th_f)
    M = MatrixPoint.from_plucker(rhs_hat)
    rhs = alt_perp(M).minors()
    return lhs.projective_distance(rhs) < tol


# -- shift by 1 ------------------------------------------------------------------


def is_black_trivalent(G: PlabicGraph) -> bool:
    return (all(G.colors[b] == BLACK for b in G.boundary)
            and all(G.degree(v) == 3 for v in G.interior_vertices()
                    if G.colors[v] == BLACK))


def is_white_trivalent(G: PlabicGraph) -> bool:
    return (all(G.colors[b] == WHITE for b in G.boundary)
            and all(G.degree(v) == 3 for v in G.interior_vertices()
                    if G.colors[v] == WHITE))


def _edge_faces(G: PlabicGraph) -> dict[int, list[frozenset[int]]]:
    """The (one or two) face labels adjacent to each edge."""
    out: dict[int, list[frozenset[int]]] = {e: [] for e in G.edges}
    for F in G.faces():
        for (v, tok) in F.states:
            if not isinstance(tok, tuple):
                out[tok].append(F.label)
    return out


@dataclass
class ShiftPairing:
    G: PlabicGraph
    Gdsh: PlabicGraph
    vertex_map: dict          # trivalent black of G -> trivalent white of Gdsh
    edge_map: dict[int, int]  # every edge of G -> edge of Gdsh
    face_map: dict            # white vertex of G -> face label of Gdsh


def shift_pair(G: PlabicGraph, Gdsh: PlabicGraph) -> ShiftPairing:
    """Certify that Gdsh is the downshift partner of G and build the vertex,
    edge, and white-vertex/face bijections from face-label triples."""
    f = G.trace().f
    fd = Gdsh.trace().f
    if not f.is_loopless() or downshift(f) != fd:
        raise ValueError("graphs are not an (f, downshift f) pair")
    if not is_black_trivalent(G):
        raise ValueError("G must be black-trivalent")
    if not is_white_trivalent(Gdsh):
        raise ValueError("the partner must be white-trivalent")
    ef_G = _edge_faces(G)
    ef_D = _edge_faces(Gdsh)
    # trivalent whites of Gdsh by their face-label triple
    white_by_triple = {}
    for w in Gdsh.interior_vertices():
        if Gdsh.colors[w] != WHITE:
            continue
        labs = frozenset(lab for e in Gdsh.rotations[w] for lab in ef_D[e])
        white_by_triple[labs] = w
    vertex_map = {}
    edge_map = {}
    for v in G.interior_vertices():
        if G.colors[v] != BLACK:
            continue
        labs = list({lab for e in G.rotations[v] for lab in ef_G[e]})
        if len(labs) != 3:
            raise ValueError("ambiguous face labels at a trivalent black vertex")
        # {Sab, Sac, Sbc} -> {Sa, Sb, Sc} via pairwise intersections
        triple = frozenset(labs[i] & labs[j]
                           for i, j in itertools.combinations(range(3), 2))
        if triple not in white_by_triple:
            raise ValueError(f"no white vertex with face triple {triple}")
        w = white_by_triple[triple]
        vertex_map[v] = w
        for e in G.rotations[v]:
            sab, sac = ef_G[e]
            # e is adjacent to faces Sab, Sac: its image separates Sb from Sc
            sa = sab & sac
            sb_sc = {x & y for x, y in itertools.combinations(labs, 2)} - {sa}
            cands = [ed for ed in Gdsh.rotations[w]
                     if set(ef_D[ed]) == sb_sc]
            if len(cands) != 1:
                raise ValueError("no unique image edge with the required faces")
            edge_map[e] = cands[0]
    # boundary edges map by position
    for p in range(1, G.n + 1):
        edge_map[G.boundary_edge(p)] = Gdsh.boundary_edge(p)
    if len(set(edge_map.values())) != len(edge_map) or len(edge_map) != len(G.edges):
        raise ValueError("edge bijection failed to cover the graphs")
    if len(edge_map) != len(Gdsh.edges):
        raise ValueError("partner graph has extra edges")
    # interior edge labels must be preserved
    lab_G = G.trace().edge_labels
    lab_D = Gdsh.trace().edge_labels
    for e, ed in edge_map.items():
        u, v = G.edges[e]
        if G.is_boundary(u) or G.is_boundary(v):
            continue
        if lab_G[e] != lab_D[ed]:
            raise ValueError("interior edge labels not preserved")
    # white vertices of G <-> faces of Gdsh (intersection of adjacent labels)
    face_map = {}
    dsh_labels = {F.label for F in Gdsh.faces()}
    for w in G.interior_vertices():
        if G.colors[w] != WHITE:
            continue
        labs = [lab for e in G.rotations[w] for lab in ef_G[e]]
        inter = frozenset.intersection(*labs)
        if inter not in dsh_labels:
            raise ValueError(f"white vertex label {set(inter)} is not a face of the partner")
        face_map[w] = inter
    return ShiftPairing(G, Gdsh, vertex_map, edge_map, face_map)


def bundled_pair(n: int) -> ShiftPairing:
    """The shipped (f_{2,n}, f_{1,n}) pair from the fan triangulation."""
    tris = fan_triangulation(n)
    return shift_pair(triangulation_graph(n, tris), tree_graph(n, tris))


def shift_transfer(pairing: ShiftPairing, wt: dict) -> dict:
    """Interior weights copy along e -> dsh(e); boundary weights invert."""
    out = {}
    G = pairing.G
    for e, ed in pairing.edge_map.items():
        u, v = G.edges[e]
        if G.is_boundary(u) or G.is_boundary(v):
            out[ed] = 1.0 / wt[e]
        else:
            out[ed] = wt[e]
    return out


def shift_transfer_inverse(pairing: ShiftPairing, wtd: dict) -> dict:
    out = {}
    G = pairing.G
    for e, ed in pairing.edge_map.items():
        u, v = G.edges[e]
        if G.is_boundary(u) or G.is_boundary(v):
            out[e] = 1.0 / wtd[ed]
        else:
            out[e] = wtd[ed]
    return out


def twisted_face_minors(G: PlabicGraph, wt: dict) -> dict[frozenset[int], complex]:
    """Delta_I(left twist of Meas(G, wt)) for the face labels I of G,
    normalized so the largest produces 1 (one common scalar is unfixed)."""
    X = measure(G, wt)
    M = MatrixPoint.from_plucker(X)
    tw = twist_left(M, G.trace().f).minors()
    labels = {F.label for F in G.faces()}
    vals = {lab: complex(tw[lab]) for lab in labels}
    ref = max(vals.values(), key=abs)
    return {lab: v / ref for lab, v in vals.items()}


def gauge_twist_check(pairing: ShiftPairing, wt: dict, w, c: float,
                      tol: float = 1e-10) -> bool:
    """Scaling the edges at the white vertex w of G by c multiplies exactly
    the twisted minor of the corresponding face of the partner by c."""
    from critdimer.plabic import gauge

    G, D = pairing.G, pairing.Gdsh
    lab_w = pairing.face_map[w]
    base = twisted_face_minors(D, shift_transfer(pairing, wt))
    moved = twisted_face_minors(D, shift_transfer(pairing, gauge(G, wt, w, c)))
    # compare ratios: moved/base should be c at lab_w and constant elsewhere
    ratios = {lab: moved[lab] / base[lab] for lab in base}
    other = [r for lab, r in ratios.items() if lab != lab_w]
    ref = other[0]
    if any(abs(r - ref) > tol * abs(ref) for r in other):
        return False
    want = ratios[lab_w] / ref
    return abs(want - c) < tol * max(1.0, abs(c))


def joint_measurements(pairing: ShiftPairing, wt: dict) -> tuple[PluckerVector, PluckerVector]:
    return (measure(pairing.G, wt),
            measure(pairing.Gdsh, shift_transfer(pairing, wt)))


def shift_diagram_check(pairing: ShiftPairing, trials: int = 20, seed: int = 0,
                        tol: float = 1e-10) -> dict:
    """The Prop 8.3/8.4 verification bundle; returns per-check max deviations."""
    from critdimer.plabic import gauge, random_positive_weights

    rng = random.Random(seed)
    G, D = pairing.G, pairing.Gdsh
    report = {"black_gauge": 0.0, "gauge_twist": True, "joint_injectivity": math.inf,
              "critical_coherence": 0.0}
    for _ in range(trials):
        wt = random_positive_weights(G, rng)
        # (i) black-trivalent gauge transports to a white gauge at the image
        v = rng.choice([u for u in G.interior_vertices() if G.colors[u] == BLACK])
        c = math.exp(rng.uniform(-1, 1))
        lhs = shift_transfer(pairing, gauge(G, wt, v, c))
        rhs = {e: w for e, w in shift_transfer(pairing, wt).items()}
        wv = pairing.vertex_map[v]
        for e in D.rotations[wv]:
            rhs[e] = rhs[e] * c
        dev = max(abs(lhs[e] - rhs[e]) / max(1.0, abs(rhs[e])) for e in lhs)
        report["black_gauge"] = max(report["black_gauge"], dev)
        # (ii) white gauge scales a single twisted minor
        w = rng.choice([u for u in G.interior_vertices() if G.colors[u] == WHITE])
        if not gauge_twist_check(pairing, wt, w, math.exp(rng.uniform(-1, 1)), tol):
            report["gauge_twist"] = False
        # (iii) joint injectivity: an independent weighting separates
        wt2 = random_positive_weights(G, rng)
        X1, Y1 = joint_measurements(pairing, wt)
        X2, Y2 = joint_measurements(pairing, wt2)
        sep = max(X1.projective_distance(X2), Y1.projective_distance(Y2))
        report["joint_injectivity"] = min(report["joint_injectivity"], sep)
        # and a black-gauged copy of wt does not separate
        same = gauge(G, wt, v, math.exp(rng.uniform(-1, 1)))
        X3, Y3 = joint_measurements(pairing, same)
        report["black_gauge"] = max(report["black_gauge"],
                                    X1.projective_distance(X3),
                                    Y1.projective_distance(Y3))
    # (iv) critical coherence: wt_theta transfers to the dual weighting of dsh f
    from critdimer.strands import theta_sample

    f = G.trace().f
    for s in range(trials):
        theta = theta_sample(f, seed + s)
        wt = critical_weights_theta(G, theta)
        lhs = measure(D, shift_transfer(pairing, wt))
        rhs = dual_measure_theta(downshift(f), theta)
        report["critical_coherence"] = max(report["critical_coherence"],
                                           lhs.projective_distance(rhs))
    return report


# -- trivalent moves ----------------------------------------------------------------


def black_trivalent_move(G: PlabicGraph, wt: dict, F: Face) -> tuple[PlabicGraph, dict]:
    """(M3)-type move on a black-trivalent graph: the square move at an
    interior quadrilateral face (black-trivalence is preserved)."""
    if not is_black_trivalent(G):
        raise ValueError("not a black-trivalent graph")
    G2, wt2 = square_move(G, wt, F)
    if not is_black_trivalent(G2):
        raise AssertionError("square move left the black-trivalent class")
    return G2, wt2


def wall_flip_sites(G: PlabicGraph) -> list:
    """Degree-2 interior black vertices joining two trivalent whites whose
    outer neighbors are degree-2 blacks: the (M2)-type sites on the
    white-trivalent side."""
    sites = []
    for m in G.interior_vertices():
        if G.colors[m] != BLACK or G.degree(m) != 2:
            continue
        u, w = (G.other_end(e, m) for e in G.rotations[m])
        if G.is_boundary(u) or G.is_boundary(w):
            continue
        if G.degree(u) != 3 or G.degree(w) != 3:
            continue
        outer_ok = True
        for x in (u, w):
            for e in G.rotations[x]:
                y = G.other_end(e, x)
                if y == m:
                    continue
                if G.is_boundary(y) or G.degree(y) != 2:
                    outer_ok = False
        if outer_ok:
            sites.append(m)
    return sites


def white_trivalent_move(G: PlabicGraph, wt: dict, m) -> tuple[PlabicGraph, dict]:
    """(M2)-type move on a white-trivalent graph: flip the wall at the
    degree-2 black m between two trivalent whites.

    The outer edges regroup by their adjacency to the old wall faces, the
    wall weights reset to 1, and each spoke picks up the far wall half over
    P = (diagonal spoke products); both the graph's own measurement and the
    shift-companion measurement are preserved, and the move matches the
    black-side square move under shift transfer.
    """
    if m not in wall_flip_sites(G):
        raise ValueError("not a wall-flip site")
    G2 = G.copy()
    wt = dict(wt)
    ef = _edge_faces(G2)
    em_u, em_w = G2.rotations[m]
    u, w = G2.other_end(em_u, m), G2.other_end(em_w, m)
    X, Y = ef[em_u]
    beta_u, beta_w = wt[em_u], wt[em_w]

    def split(vertex, wall_edge):
        others = [e for e in G2.rotations[vertex] if e != wall_edge]
        adjX = [e for e in others if X in ef[e]]
        adjY = [e for e in others if Y in ef[e]]
        if len(adjX) != 1 or len(adjY) != 1:
            raise ValueError("wall faces do not split the outer edges")
        return adjX[0], adjY[0]

    e_uX, e_uY = split(u, em_u)
    e_wX, e_wY = split(w, em_w)
    a_uX, a_uY, a_wX, a_wY = wt[e_uX], wt[e_uY], wt[e_wX], wt[e_wY]
    P = a_uX * a_wY + a_uY * a_wX
    if P == 0:
        raise ValueError("degenerate wall flip")
    # regroup: u keeps e_uX and takes e_wX; w keeps e_wY and takes e_uY;
    # the new wall separates the two end faces, so the planar rotations are
    # [e_uX, e_wX, wall] at u and [e_wY, e_uY, wall] at w
    a, b = G2.edges[e_wX]
    G2.edges[e_wX] = (u if a == w else a, u if b == w else b)
    a, b = G2.edges[e_uY]
    G2.edges[e_uY] = (w if a == u else a, w if b == u else b)
    G2.rotations[u] = [e_uX, e_wX, em_u]
    G2.rotations[w] = [e_wY, e_uY, em_w]
    G2._strands = None
    G2._faces = None
    # each spoke gains the wall half of the opposite white, over P
    wt[em_u] = 1.0
    wt[em_w] = 1.0
    wt[e_uX] = a_uX * beta_w / P
    wt[e_uY] = a_uY * beta_w / P
    wt[e_wX] = a_wX * beta_u / P
    wt[e_wY] = a_wY * beta_u / P
    G2.validate()
    return G2, wt

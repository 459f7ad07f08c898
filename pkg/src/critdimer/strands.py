"""Reduced strand diagrams as combinatorial objects.

The crossing graph of f, its directed refinement by positive crossings,
connected components, admissibility and nondegeneracy predicates for angle
tuples theta and complex tuples t, deterministic admissible samplers, and
the restriction of f to a union of components.
"""

from __future__ import annotations

import cmath
import itertools
import math
import random
from dataclasses import dataclass
from typing import Sequence

from critdimer.permutations import (
    BoundedAffinePermutation,
    chords_cross,
    cw_ordered,
    downshift,
    f_crossings,
    from_permutation,
    mis_downup,
    pos_minus,
    pos_plus,
)

ANGLE_TOL = 1e-9


@dataclass(frozen=True)
class CrossingGraph:
    n: int
    edges: frozenset[frozenset[int]]
    directed_edges: frozenset[tuple[int, int]]
    components: tuple[frozenset[int], ...]

    @property
    def c_f(self) -> int:
        return len(self.components)

    @property
    def d_f(self) -> int:
        return self.n - len(self.components)

    def component_of(self, p: int) -> frozenset[int]:
        for comp in self.components:
            if p in comp:
                return comp
        raise KeyError(p)


def positive_crossings(f: BoundedAffinePermutation) -> set[tuple[int, int]]:
    """Directed edges (p -> q): +s, +t, -p, -q in clockwise order."""
    n = f.n
    pw = f.perm_window()
    out = set()
    for p, q in itertools.permutations(range(1, n + 1), 2):
        s, t = pw.index(p) + 1, pw.index(q) + 1
        if cw_ordered([pos_plus(s, n), pos_plus(t, n),
                       pos_minus(p, n), pos_minus(q, n)], 3 * n):
            out.add((p, q))
    return out


def crossing_graph(f: BoundedAffinePermutation) -> CrossingGraph:
    if not f.is_loopless():
        raise ValueError("crossing graph requires a loopless permutation")
    n = f.n
    undirected = f_crossings(f)
    directed = positive_crossings(f)
    assert undirected == {frozenset(e) for e in directed}
    # union-find over [n]
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in undirected:
        a, b = tuple(e)
        parent[find(a)] = find(b)
    blocks: dict[int, set[int]] = {}
    for p in range(1, n + 1):
        blocks.setdefault(find(p), set()).add(p)
    comps = tuple(sorted((frozenset(b) for b in blocks.values()), key=min))
    return CrossingGraph(n, frozenset(undirected), frozenset(directed), comps)


def increasing_cycle_cover(f: BoundedAffinePermutation) -> bool:
    """Does every directed edge of the positive-crossing graph lie on an
    increasing cycle a_1 < a_2 < ... < a_m (consecutive edges, plus a_m -> a_1)?"""
    g = crossing_graph(f)
    edges = g.directed_edges
    n = f.n
    adj_up = {p: sorted(q for (a, q) in edges if a == p and q > p) for p in range(1, n + 1)}

    def up_reach(start: int) -> set[int]:
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj_up[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    def down_reach_to(target: int) -> set[int]:
        # vertices a with an increasing path a -> ... -> target
        seen = {target}
        changed = True
        while changed:
            changed = False
            for (a, b) in edges:
                if a < b and b in seen and a not in seen:
                    seen.add(a)
                    changed = True
        return seen

    for (p, q) in edges:
        if p > q:
            # closing edge: need an increasing path q -> ... -> p
            if p not in up_reach(q):
                return False
            continue
        tops = up_reach(q)
        bottoms = down_reach_to(p)
        if not any((a, b) in edges for a in tops for b in bottoms if a > b):
            return False
    return True


# -- theta / t tuples ----------------------------------------------------------


@dataclass(frozen=True)
class ThetaTuple:
    values: tuple[float, ...]

    def __getitem__(self, p: int) -> float:
        """Affine value theta~_p with theta~_{p+n} = theta~_p + pi."""
        n = len(self.values)
        m, r = divmod(p - 1, n)
        return self.values[r] + m * math.pi

    def to_t(self) -> "TTuple":
        return TTuple(tuple(cmath.exp(1j * th) for th in self.values))


@dataclass(frozen=True)
class TTuple:
    values: tuple[complex, ...]

    def __post_init__(self):
        if any(v == 0 for v in self.values):
            raise ValueError("t entries must be nonzero")

    def __getitem__(self, p: int) -> complex:
        """Affine value t~_p with t~_{p+n} = -t~_p."""
        n = len(self.values)
        m, r = divmod(p - 1, n)
        return self.values[r] * (-1) ** (m % 2)


def _theta_values(theta) -> tuple[float, ...]:
    if isinstance(theta, ThetaTuple):
        return theta.values
    return tuple(float(x) for x in theta)


def _t_values(t) -> tuple[complex, ...]:
    if isinstance(t, TTuple):
        return t.values
    return tuple(complex(x) for x in t)


def is_admissible_theta(f: BoundedAffinePermutation, theta, tol: float = 0.0) -> bool:
    """theta_p < theta_q < theta_p + pi on every f-crossing {p,q}, p < q."""
    th = _theta_values(theta)
    for e in f_crossings(f):
        p, q = sorted(e)
        if not (th[p - 1] + tol < th[q - 1] < th[p - 1] + math.pi - tol):
            return False
    return True


def is_admissible_t(f: BoundedAffinePermutation, t, tol: float = ANGLE_TOL) -> bool:
    """t_p != +-t_q on every f-crossing."""
    tv = _t_values(t)
    for e in f_crossings(f):
        p, q = sorted(e)
        a, b = tv[p - 1], tv[q - 1]
        scale = max(abs(a), abs(b))
        if abs(a - b) <= tol * scale or abs(a + b) <= tol * scale:
            return False
    return True


def is_generic_theta(theta, tol: float = ANGLE_TOL) -> bool:
    """Pairwise non-congruent modulo pi."""
    th = _theta_values(theta)
    for a, b in itertools.combinations(th, 2):
        d = (a - b) % math.pi
        if min(d, math.pi - d) <= tol:
            return False
    return True


def is_generic_t(t, tol: float = ANGLE_TOL) -> bool:
    """t_p != +-t_q for all p != q."""
    tv = _t_values(t)
    for a, b in itertools.combinations(tv, 2):
        scale = max(abs(a), abs(b))
        if abs(a - b) <= tol * scale or abs(a + b) <= tol * scale:
            return False
    return True


def is_nondegenerate_theta(f: BoundedAffinePermutation, theta, tol: float = ANGLE_TOL) -> bool:
    """Admissible and theta_p != theta_q mod pi on every down-up misalignment."""
    if not is_admissible_theta(f, theta):
        return False
    th = _theta_values(theta)
    for e in mis_downup(f):
        p, q = sorted(e)
        d = (th[p - 1] - th[q - 1]) % math.pi
        if min(d, math.pi - d) <= tol:
            return False
    return True


def is_nondegenerate_t(f: BoundedAffinePermutation, t, tol: float = ANGLE_TOL) -> bool:
    if not is_admissible_t(f, t):
        return False
    tv = _t_values(t)
    for e in mis_downup(f):
        p, q = sorted(e)
        a, b = tv[p - 1], tv[q - 1]
        scale = max(abs(a), abs(b))
        if abs(a - b) <= tol * scale or abs(a + b) <= tol * scale:
            return False
    return True


MARGIN = 1e-3


def theta_sample(f: BoundedAffinePermutation, seed: int = 0,
                 pin: bool = True) -> ThetaTuple:
    """A deterministic admissible tuple; by default the smallest index of
    every component of the crossing graph is pinned to 0.

    Within each component the angles increase with the index and stay inside
    a window of width < pi, which is sufficient for admissibility; increments
    keep a fixed margin so downstream strict inequalities are float-safe.
    With pin=False each component is shifted by a random constant, which
    moves the sample along directions the measurement ignores.
    """
    g = crossing_graph(f)
    rng = random.Random(seed)
    theta = [0.0] * f.n
    for comp in g.components:
        members = sorted(comp)
        m = len(members)
        base = 0.0 if pin else rng.uniform(0.0, math.pi)
        if m == 1:
            theta[members[0] - 1] = base
            continue
        cuts = sorted(rng.uniform(0.0, 1.0) for _ in range(m - 1))
        span = math.pi - (m + 1) * MARGIN
        vals = [base] + [base + MARGIN * (i + 1) + c * span for i, c in enumerate(cuts)]
        for p, v in zip(members, vals):
            theta[p - 1] = v
    out = ThetaTuple(tuple(theta))
    assert is_admissible_theta(f, out)
    return out


def t_sample(f: BoundedAffinePermutation, seed: int = 0, unit: bool = False,
             require: str | None = None, pin: bool = True) -> TTuple:
    """A deterministic admissible complex tuple, by default with component
    representatives pinned to 1.  With unit=True the sample lies on the unit
    circle (it is the exponential of a theta sample); otherwise moduli are
    drawn in [0.5, 2].  require may ask for a 'generic' or 'nondegenerate'
    sample; unattainable requirements raise (e.g. genericity on a pinned
    slice where every index represents its own component: pass pin=False,
    which only moves the sample along directions Meas ignores)."""
    rng = random.Random(seed ^ 0x5EED)
    for attempt in range(200):
        theta = theta_sample(f, seed + 7919 * attempt, pin=pin)
        vals = list(theta.to_t().values)
        if not unit:
            g = crossing_graph(f)
            reps = {min(c) for c in g.components} if pin else set()
            vals = [v if p in reps else v * rng.uniform(0.5, 2.0)
                    for p, v in enumerate(vals, start=1)]
        t = TTuple(tuple(vals))
        if not is_admissible_t(f, t):
            continue
        if require == "generic" and not is_generic_t(t):
            continue
        if require == "nondegenerate" and not is_nondegenerate_t(f, t):
            continue
        return t
    raise RuntimeError(f"failed to sample an admissible t (require={require})")


def theta_regular(n: int) -> ThetaTuple:
    """theta_r = r*pi/n."""
    return ThetaTuple(tuple(r * math.pi / n for r in range(1, n + 1)))


# -- restriction ---------------------------------------------------------------


def restrict(f: BoundedAffinePermutation, C) -> tuple[BoundedAffinePermutation, dict[int, int]]:
    """Erase all strands outside C (a union of components of the crossing
    graph) and relabel.  Returns (f restricted, old strand label -> new)."""
    C = frozenset(C)
    g = crossing_graph(f)
    covered = set()
    for comp in g.components:
        if comp & C:
            if not comp <= C:
                raise ValueError("C is not a union of components")
            covered |= comp
    if covered != C:
        raise ValueError("C is not a union of components")
    n = f.n
    pw = f.perm_window()
    # boundary marks of the kept strands, in clockwise order of position
    marks = []
    for p in sorted(C):
        s = pw.index(p) + 1
        marks.append((pos_plus(s, n), "+", p))
        marks.append((pos_minus(p, n), "-", p))
    marks.sort()
    kinds = [kind for _, kind, _ in marks]
    assert all(kinds[i] != kinds[(i + 1) % len(kinds)] for i in range(len(kinds))), \
        "strand directions fail to alternate"
    # start the relabelling at a '-' mark so that new -j, +j alternate properly
    start = kinds.index("-")
    marks = marks[start:] + marks[:start]
    new_minus: dict[int, int] = {}
    new_plus: dict[int, int] = {}
    for i, (_, kind, p) in enumerate(marks):
        j = i // 2 + 1
        if kind == "-":
            new_minus[p] = j
        else:
            new_plus[p] = j
    m = len(C)
    sigma = [0] * m
    for p in C:
        sigma[new_plus[p] - 1] = new_minus[p]
    f_res = from_permutation(sigma)
    index_map = {p: new_minus[p] for p in C}
    return f_res, index_map


def restrict_theta(f: BoundedAffinePermutation, theta, C) -> ThetaTuple:
    """theta restricted to the component union C: theta_p rides on the
    endpoint of strand S_p."""
    th = _theta_values(theta)
    _, index_map = restrict(f, C)
    vals = [0.0] * len(index_map)
    for p, j in index_map.items():
        vals[j - 1] = th[p - 1]
    return ThetaTuple(tuple(vals))


def component_refinement_check(f: BoundedAffinePermutation) -> bool:
    """Is the component partition of the crossing graph the common refinement
    of the segment-intersection partitions for f and its downshift?"""
    if not f.is_loopless():
        raise ValueError("needs a loopless permutation")
    n = f.n

    def hat_partition(g: BoundedAffinePermutation) -> list[set[int]]:
        # chords [b_s, b_p] with gbar(s) = p; shared endpoints intersect
        pw = g.perm_window()
        parent = list(range(n + 1))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        pos_b = lambda j: 3 * ((j - 1) % n) + 1
        for p, q in itertools.combinations(range(1, n + 1), 2):
            sp, tq = pw.index(p) + 1, pw.index(q) + 1
            ends1 = {pos_b(sp), pos_b(p)}
            ends2 = {pos_b(tq), pos_b(q)}
            if ends1 & ends2:
                meet = True
            elif len(ends1) == 1 or len(ends2) == 1:
                meet = False  # a degenerate chord (loop) meets only at its point
            else:
                meet = chords_cross(pos_b(sp), pos_b(p), pos_b(tq), pos_b(q), 3 * n)
            if meet:
                parent[find(p)] = find(q)
        blocks: dict[int, set[int]] = {}
        for p in range(1, n + 1):
            blocks.setdefault(find(p), set()).add(p)
        return list(blocks.values())

    part_f = hat_partition(f)
    part_dsh = hat_partition(downshift(f))
    label = {}
    for p in range(1, n + 1):
        a = next(i for i, b in enumerate(part_f) if p in b)
        b = next(i for i, blk in enumerate(part_dsh) if p in blk)
        label[p] = (a, b)
    refinement = {}
    for p, lab in label.items():
        refinement.setdefault(lab, set()).add(p)
    refined_blocks = {frozenset(b) for b in refinement.values()}
    cross_blocks = {frozenset(c) for c in crossing_graph(f).components}
    return refined_blocks == cross_blocks

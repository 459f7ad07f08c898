"""Bounded affine permutations and permutation-level combinatorics.

A bounded affine permutation is stored by its window f(1..n); all other
values follow from f(p+n) = f(p) + n.  This module derives everything the
rest of the library needs from the window alone: Grassmann necklaces,
crossing/misalignment relations of the straight-arrow strand diagram,
structural maps (inverse, dual, downshift, cyclic conjugate), Gale-order
positroid membership, bridges, and fixed-point-free pairings.

Crossing tests are exact integer comparisons on the cyclic order of the 3n
boundary symbols -1, b_1, +1, ..., -n, b_n, +n (clockwise); no floating
geometry is involved.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class BoundedAffinePermutation:
    """Window representation of f in B(k,n); immutable after construction."""

    __slots__ = ("n", "window", "k")

    def __init__(self, window: Sequence[int]):
        window = tuple(int(v) for v in window)
        n = len(window)
        if n == 0:
            raise ValueError("window must be nonempty")
        residues = sorted(v % n for v in window)
        if residues != list(range(n)):
            raise ValueError(f"window {window} is not a bijection mod {n}")
        for j, v in enumerate(window, start=1):
            if not j <= v <= j + n:
                raise ValueError(f"bound violated: f({j}) = {v} not in [{j}, {j + n}]")
        total = sum(v - j for j, v in enumerate(window, start=1))
        if total % n != 0:
            raise ValueError(f"sum of f(j)-j is {total}, not a multiple of {n}")
        self.n = n
        self.window = window
        self.k = total // n

    # -- basics --------------------------------------------------------------

    def __call__(self, p: int) -> int:
        q, r = divmod(p - 1, self.n)
        return self.window[r] + q * self.n

    def __eq__(self, other) -> bool:
        return (isinstance(other, BoundedAffinePermutation)
                and self.window == other.window)

    def __hash__(self) -> int:
        return hash(self.window)

    def __repr__(self) -> str:
        return f"BAP(k={self.k}, n={self.n}, window={list(self.window)})"

    def perm(self, p: int) -> int:
        """The underlying permutation f-bar of [n]: reduction of f(p) mod n."""
        v = self(p) % self.n
        return v if v else self.n

    def perm_window(self) -> tuple[int, ...]:
        return tuple(self.perm(p) for p in range(1, self.n + 1))

    def inverse_value(self, q: int) -> int:
        """The integer p with f(p) = q."""
        r = q % self.n
        r = r if r else self.n
        p = self.perm_window().index(r) + 1
        return p + (q - self(p)) // self.n * self.n

    def is_loopless(self) -> bool:
        return all(v > j for j, v in enumerate(self.window, start=1))

    def is_coloopless(self) -> bool:
        return all(v < j + self.n for j, v in enumerate(self.window, start=1))

    def loops(self) -> list[int]:
        return [j for j, v in enumerate(self.window, start=1) if v == j]

    def coloops(self) -> list[int]:
        return [j for j, v in enumerate(self.window, start=1) if v == j + self.n]

    def length(self) -> int:
        """Number of pairs s in [n], s < t with f(s) > f(t)."""
        count = 0
        for s in range(1, self.n + 1):
            fs = self(s)
            # only t in (s, s+n) can invert since f(t) >= t > s+n otherwise
            for t in range(s + 1, s + self.n):
                if fs > self(t):
                    count += 1
        return count

    def to_json(self) -> dict:
        return {"n": self.n, "window": list(self.window)}

    @staticmethod
    def from_json(data: dict) -> "BoundedAffinePermutation":
        if set(data) - {"n", "window"}:
            raise ValueError("unexpected keys in BAP JSON")
        bap = BoundedAffinePermutation(data["window"])
        if "n" in data and data["n"] != bap.n:
            raise ValueError("declared n disagrees with window length")
        return bap


def from_window(values: Sequence[int]) -> BoundedAffinePermutation:
    return BoundedAffinePermutation(values)


def from_permutation(sigma: Sequence[int], fix_as_loops: bool = False) -> BoundedAffinePermutation:
    """Lift a permutation of [n] to a bounded affine permutation.

    The default lift is loopless: p < f(p) <= p + n with f(p) = sigma(p) mod n,
    so fixed points become coloops.  With fix_as_loops=True fixed points are
    resolved to loops f(p) = p instead.
    """
    n = len(sigma)
    if sorted(sigma) != list(range(1, n + 1)):
        raise ValueError("not a permutation of [n]")
    window = []
    for p, v in enumerate(sigma, start=1):
        if v == p:
            window.append(p if fix_as_loops else p + n)
        else:
            m = (v - p) % n
            window.append(p + m)
    return BoundedAffinePermutation(window)


def top_cell(k: int, n: int) -> BoundedAffinePermutation:
    """f_{k,n}: p -> p + k."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    return BoundedAffinePermutation([p + k for p in range(1, n + 1)])


def all_loopless(n: int, k: int | None = None) -> Iterator[BoundedAffinePermutation]:
    """All loopless bounded affine permutations on [n] (optionally fixed k)."""
    for sigma in itertools.permutations(range(1, n + 1)):
        f = from_permutation(sigma)
        if k is None or f.k == k:
            yield f


# -- Grassmann necklaces ------------------------------------------------------


@dataclass(frozen=True)
class GrassmannNecklace:
    k: int
    n: int
    sets: tuple[frozenset[int], ...]          # I_1..I_n
    j_sets: tuple[frozenset[int], ...] | None  # J_r = I_r - {r}, loopless case

    def __getitem__(self, r: int) -> frozenset[int]:
        """I_r for r in 1..n."""
        return self.sets[(r - 1) % self.n]


def grassmann_necklace(f: BoundedAffinePermutation) -> GrassmannNecklace:
    """I_q = reduction mod n of {f(p) : p < q <= f(p)}; J_q = I_q - {q}."""
    n = f.n
    sets = []
    for q in range(1, n + 1):
        vals = necklace_window(f, q)
        sets.append(frozenset((v - 1) % n + 1 for v in vals))
    loopless = f.is_loopless()
    j_sets = tuple(s - {q} for q, s in enumerate(sets, start=1)) if loopless else None
    return GrassmannNecklace(f.k, n, tuple(sets), j_sets)


def necklace_window(f: BoundedAffinePermutation, q: int) -> list[int]:
    """The affine set I~_q = {f(p) : p < q <= f(p)} (un-reduced integers)."""
    vals = []
    for p in range(q - f.n, q):
        if f(p) >= q:
            vals.append(f(p))
    return sorted(vals)


def j_window(f: BoundedAffinePermutation, r: int) -> list[int]:
    """J~_r = I~_r minus {r} for loopless f (affine integers)."""
    return [v for v in necklace_window(f, r) if v != r]


def sign_vector(f: BoundedAffinePermutation) -> tuple[int, ...]:
    """eps_r = (-1)^#{p in [n] : f-bar(p) <= p < r}."""
    n = f.n
    eps = []
    for r in range(1, n + 1):
        count = sum(1 for p in range(1, n + 1) if f.perm(p) <= p < r)
        eps.append(-1 if count % 2 else 1)
    return tuple(eps)


# -- circle positions and chord tests -----------------------------------------
#
# Clockwise positions on a circle with 3n marks: -j at 3(j-1), b_j at 3(j-1)+1,
# +j at 3(j-1)+2.  "Clockwise ordered" sequences are tested by offsets mod 3n.


def pos_minus(j: int, n: int) -> int:
    return 3 * ((j - 1) % n)


def pos_plus(j: int, n: int) -> int:
    return 3 * ((j - 1) % n) + 2


def cw_ordered(positions: Sequence[int], modulus: int) -> bool:
    """True when the points appear in the given order walking clockwise."""
    a = positions[0]
    offs = [(p - a) % modulus for p in positions]
    return all(offs[i] < offs[i + 1] for i in range(len(offs) - 1))


def chords_cross(a: int, b: int, c: int, d: int, modulus: int) -> bool:
    """Do open chords [a,b] and [c,d] (distinct endpoints) cross inside the disk?"""
    if len({a, b, c, d}) != 4:
        raise ValueError("chord endpoints must be distinct")
    inside_c = 0 < (c - a) % modulus < (b - a) % modulus
    inside_d = 0 < (d - a) % modulus < (b - a) % modulus
    return inside_c != inside_d


# -- crossing relations --------------------------------------------------------


def f_crossings(f: BoundedAffinePermutation) -> set[frozenset[int]]:
    """Unordered pairs {p,q} whose arrows +s -> -p and +t -> -q cross."""
    if not f.is_loopless():
        raise ValueError("f-crossings require a loopless permutation")
    n = f.n
    out = set()
    for p, q in itertools.combinations(range(1, n + 1), 2):
        s, t = f.perm_window().index(p) + 1, f.perm_window().index(q) + 1
        if chords_cross(pos_plus(s, n), pos_minus(p, n),
                        pos_plus(t, n), pos_minus(q, n), 3 * n):
            out.add(frozenset((p, q)))
    return out


def affine_f_crossings(f: BoundedAffinePermutation) -> set[tuple[int, int]]:
    """Ordered pairs (p,q), p in [n], q in (p, p+n), with s < t < p < q <= s+n
    for s = f^{-1}(p), t = f^{-1}(q)."""
    if not f.is_loopless():
        raise ValueError("affine f-crossings require a loopless permutation")
    out = set()
    for p in range(1, f.n + 1):
        s = f.inverse_value(p)
        for q in range(p + 1, p + f.n):
            t = f.inverse_value(q)
            if s < t < p < q <= s + f.n:
                out.add((p, q))
    return out


def alignments(f: BoundedAffinePermutation) -> set[frozenset[int]]:
    """Reductions {f(s) mod, f(t) mod} over inversions s in [n], s < t, f(s) > f(t)."""
    if not f.is_loopless():
        raise ValueError("alignments are read off a loopless permutation")
    out = set()
    for s in range(1, f.n + 1):
        for t in range(s + 1, s + f.n):
            if f(s) > f(t):
                p = (f(s) - 1) % f.n + 1
                q = (f(t) - 1) % f.n + 1
                out.add(frozenset((p, q)))
    return out


def _mis(f: BoundedAffinePermutation, clockwise: bool) -> set[frozenset[int]]:
    n = f.n
    pw = f.perm_window()
    out = set()
    for p, q in itertools.permutations(range(1, n + 1), 2):
        s, t = pw.index(p) + 1, pw.index(q) + 1
        seq = [pos_plus(s, n), pos_minus(p, n), pos_plus(t, n), pos_minus(q, n)]
        if not clockwise:
            seq = [seq[0]] + list(reversed(seq[1:]))
        if cw_ordered(seq, 3 * n):
            out.add(frozenset((p, q)))
    return out


def mis_updown(f: BoundedAffinePermutation) -> set[frozenset[int]]:
    """{p,q} with +s, -p, +t, -q in clockwise order."""
    if not f.is_loopless():
        raise ValueError("misalignments require a loopless permutation")
    return _mis(f, clockwise=True)


def mis_downup(f: BoundedAffinePermutation) -> set[frozenset[int]]:
    """{p,q} with +s, -p, +t, -q in counterclockwise order."""
    if not f.is_loopless():
        raise ValueError("misalignments require a loopless permutation")
    return _mis(f, clockwise=False)


def dual_f_crossings(f: BoundedAffinePermutation) -> set[frozenset[int]]:
    """Crossings of the dual diagram, whose arrows run -s -> +p."""
    if not f.is_coloopless():
        raise ValueError("dual crossings require a coloopless permutation")
    n = f.n
    pw = f.perm_window()
    out = set()
    for p, q in itertools.combinations(range(1, n + 1), 2):
        s, t = pw.index(p) + 1, pw.index(q) + 1
        a, b = pos_minus(s, n), pos_plus(p, n)
        c, d = pos_minus(t, n), pos_plus(q, n)
        if len({a, b, c, d}) < 4:
            # a loop p = s gives a degenerate arrow; it crosses nothing
            continue
        if chords_cross(a, b, c, d, 3 * n):
            out.add(frozenset((p, q)))
    return out


def crossing_relations(f: BoundedAffinePermutation) -> dict:
    """All chord relations of the (dual) strand diagram in one dict."""
    out = {}
    if f.is_loopless():
        out["f_crossings"] = f_crossings(f)
        out["affine_f_crossings"] = affine_f_crossings(f)
        out["alignments"] = alignments(f)
        out["mis_updown"] = mis_updown(f)
        out["mis_downup"] = mis_downup(f)
    if f.is_coloopless():
        out["dual_f_crossings"] = dual_f_crossings(f)
    return out


# -- structural maps -----------------------------------------------------------


def dual(f: BoundedAffinePermutation) -> BoundedAffinePermutation:
    """f-hat(p) = f^{-1}(p) + n, an element of B(n-k, n).

    f^{-1}(q) lies in [q-n, q], so the shifted window lands in [q, q+n].
    """
    return BoundedAffinePermutation([f.inverse_value(q) + f.n for q in range(1, f.n + 1)])


def shift_conjugate(f: BoundedAffinePermutation) -> BoundedAffinePermutation:
    """sigma^{-1} f sigma where sigma(p) = p + 1, i.e. p -> f(p+1) - 1."""
    return BoundedAffinePermutation([f(p + 1) - 1 for p in range(1, f.n + 1)])


def downshift(f: BoundedAffinePermutation) -> BoundedAffinePermutation:
    """The shift <-f(p) = f(p-1), an element of B(k-1, n); needs f loopless."""
    if not f.is_loopless():
        raise ValueError("downshift requires a loopless permutation")
    return BoundedAffinePermutation([f(p - 1) for p in range(1, f.n + 1)])


def structural_maps(f: BoundedAffinePermutation) -> dict:
    # f^{-1} itself is not bounded (f^{-1}(q) <= q), so it is reported as a
    # plain window; the bounded representative is the dual f^{-1} + n.
    out = {
        "inverse": tuple(f.inverse_value(q) for q in range(1, f.n + 1)),
        "shift_conjugate": shift_conjugate(f),
        "dual": dual(f),
        "length": f.length(),
        "loopless": f.is_loopless(),
        "coloopless": f.is_coloopless(),
    }
    if f.is_loopless():
        out["downshift"] = downshift(f)
    return out


# -- positroids via Gale orders -------------------------------------------------


def gale_leq(I: Iterable[int], J: Iterable[int], q: int, n: int) -> bool:
    """I <=_q J in the cyclic Gale order starting at q."""
    key = lambda x: (x - q) % n
    a = sorted(I, key=key)
    b = sorted(J, key=key)
    if len(a) != len(b):
        raise ValueError("sets must have equal size")
    return all(key(x) <= key(y) for x, y in zip(a, b))


def positroid_membership(f: BoundedAffinePermutation, J: Iterable[int]) -> bool:
    J = frozenset(J)
    if len(J) != f.k:
        raise ValueError(f"subset size {len(J)} != k = {f.k}")
    neck = grassmann_necklace(f)
    return all(gale_leq(neck[q], J, q, f.n) for q in range(1, f.n + 1))


def positroid(f: BoundedAffinePermutation) -> set[frozenset[int]]:
    """All k-subsets in M_f (exhaustive; intended for small n)."""
    return {frozenset(J) for J in itertools.combinations(range(1, f.n + 1), f.k)
            if positroid_membership(f, J)}


# -- bridges --------------------------------------------------------------------


def bridges(f: BoundedAffinePermutation) -> list[int]:
    """All r in [n] with r < r+1 <= f(r) < f(r+1) <= r + n."""
    out = []
    for r in range(1, f.n + 1):
        if r + 1 <= f(r) < f(r + 1) <= r + f.n:
            out.append(r)
    return out


def remove_bridge(f: BoundedAffinePermutation, r: int) -> BoundedAffinePermutation:
    """s_r f: swap the targets of r and r+1 (indices mod n)."""
    if r not in bridges(f):
        raise ValueError(f"no bridge at r = {r}")
    window = list(f.window)
    if r < f.n:
        window[r - 1], window[r] = f(r + 1), f(r)
    else:
        window[f.n - 1] = f(1) + f.n
        window[0] = f(f.n) - f.n
    return BoundedAffinePermutation(window)


def delete_index(f: BoundedAffinePermutation, p: int) -> BoundedAffinePermutation:
    """Remove a loop or coloop at position p, relabelling to [n-1]."""
    if f.n == 1:
        raise ValueError("cannot delete from n = 1")
    if f(p) not in (p, p + f.n):
        raise ValueError(f"position {p} is neither a loop nor a coloop")
    n = f.n

    def phi(j: int) -> int:       # [n-1] -> Z, skipping residue p
        m, r = divmod(j - 1, n - 1)
        r += 1
        return (r if r < p else r + 1) + n * m

    def psi(v: int) -> int:       # inverse relabel on values with residue != p
        m, r = divmod(v - 1, n)
        r += 1
        return (r if r < p else r - 1) + (n - 1) * m

    return BoundedAffinePermutation([psi(f(phi(j))) for j in range(1, n)])


def add_bridge_perm(f: BoundedAffinePermutation, r: int) -> BoundedAffinePermutation:
    """Inverse of remove_bridge: the permutation whose bridge removal at r is f."""
    window = list(f.window)
    if r < f.n:
        window[r - 1], window[r] = f(r + 1), f(r)
    else:
        window[f.n - 1] = f(1) + f.n
        window[0] = f(f.n) - f.n
    g = BoundedAffinePermutation(window)
    if remove_bridge(g, r) != f:
        raise ValueError(f"adding a bridge at {r} is not valid here")
    return g


# -- pairings --------------------------------------------------------------------


class Pairing:
    """A fixed-point-free involution tau on [2N]."""

    __slots__ = ("n", "tau")

    def __init__(self, tau: Sequence[int]):
        tau = tuple(int(v) for v in tau)
        n = len(tau)
        if n % 2:
            raise ValueError("pairings need even n")
        if sorted(tau) != list(range(1, n + 1)):
            raise ValueError("tau is not a permutation of [n]")
        for p in range(1, n + 1):
            if tau[p - 1] == p:
                raise ValueError(f"tau fixes {p}")
            if tau[tau[p - 1] - 1] != p:
                raise ValueError("tau is not an involution")
        self.n = n
        self.tau = tau

    def __call__(self, p: int) -> int:
        return self.tau[(p - 1) % self.n]

    def pairs(self) -> list[tuple[int, int]]:
        return [(p, self(p)) for p in range(1, self.n + 1) if p < self(p)]

    @staticmethod
    def from_pairs(n: int, pairs: Iterable[tuple[int, int]]) -> "Pairing":
        tau = [0] * n
        for a, b in pairs:
            tau[a - 1], tau[b - 1] = b, a
        return Pairing(tau)

    def __repr__(self) -> str:
        return f"Pairing({self.pairs()})"


def pairing_crossings(tau: Pairing) -> set[frozenset[frozenset[int]]]:
    """Pairs of tau-pairs whose chords interleave cyclically."""
    out = set()
    for (a, b), (c, d) in itertools.combinations(tau.pairs(), 2):
        if chords_cross(a, b, c, d, tau.n):
            out.add(frozenset((frozenset((a, b)), frozenset((c, d)))))
    return out


def pairing_to_perms(tau: Pairing) -> dict[str, BoundedAffinePermutation]:
    """The loopless lifts f^elec in B(N+1,2N) and f^Ising in B(N,2N)."""
    n = tau.n
    elec = from_permutation([tau(p + 1) for p in range(1, n + 1)])
    ising = from_permutation([tau(p) for p in range(1, n + 1)])
    if elec.k != n // 2 + 1:
        raise AssertionError("electrical lift has unexpected k")
    if ising.k != n // 2:
        raise AssertionError("Ising lift has unexpected k")
    return {"elec": elec, "ising": ising}

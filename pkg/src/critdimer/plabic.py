"""Planar bipartite graphs in a disk with a rotation system.

Vertices carry a color ('b'/'w'); boundary vertices b_1..b_n are listed in
clockwise order and have degree 1.  Rotations list the incident edge ids of
each vertex in clockwise order, which fixes a planar embedding: strands turn
right at black vertices (previous edge in the clockwise rotation) and left at
white ones (next edge), and faces are orbits of the walk that always takes
the previous edge, with virtual boundary arcs closing off the disk.

The module provides the strand trace (with loop/coloop conventions), face
target-labels, the reducedness test, graph constructors (star, bridge
decomposition, Le-diagram grid), local moves (square move, gauge,
contraction), and critical/dual weightings.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from critdimer.laurent import LaurentPoly, bracket, bracket_eval
from critdimer.permutations import (
    BoundedAffinePermutation,
    add_bridge_perm,
    bridges,
    delete_index,
    from_permutation,
    remove_bridge,
    top_cell,
)
from critdimer.strands import _t_values, _theta_values

BLACK, WHITE = "b", "w"


def _opp(c: str) -> str:
    return WHITE if c == BLACK else BLACK


class PlabicGraph:
    """Planar bipartite graph in a disk, encoded by a rotation system."""

    def __init__(self, n: int, colors: dict, boundary: Sequence,
                 edges: dict[int, tuple], rotations: dict):
        self.n = n
        self.colors = dict(colors)
        self.boundary = list(boundary)
        self.edges = {int(e): (u, v) for e, (u, v) in edges.items()}
        self.rotations = {v: list(rot) for v, rot in rotations.items()}
        self._strands = None
        self._faces = None
        self.validate()

    # -- structure -----------------------------------------------------------

    def validate(self) -> None:
        if len(self.boundary) != self.n:
            raise ValueError("boundary list length differs from n")
        bset = set(self.boundary)
        for e, (u, v) in self.edges.items():
            if u == v:
                raise ValueError(f"edge {e} is a self-loop")
            if self.colors[u] == self.colors[v]:
                raise ValueError(f"edge {e} joins two {self.colors[u]} vertices")
        incident: dict = {v: [] for v in self.colors}
        for e, (u, v) in self.edges.items():
            incident[u].append(e)
            incident[v].append(e)
        for v, rot in self.rotations.items():
            if sorted(rot) != sorted(incident.get(v, [])):
                raise ValueError(f"rotation at {v} does not match incident edges")
        for v in self.colors:
            if v not in self.rotations:
                raise ValueError(f"vertex {v} has no rotation")
        for b in self.boundary:
            if len(self.rotations[b]) != 1:
                raise ValueError(f"boundary vertex {b} must have degree 1")
        for v in self.colors:
            if v not in bset and len(self.rotations[v]) == 0:
                raise ValueError(f"isolated interior vertex {v}")

    def copy(self) -> "PlabicGraph":
        return PlabicGraph(self.n, self.colors, self.boundary, self.edges,
                           self.rotations)

    def interior_vertices(self) -> list:
        bset = set(self.boundary)
        return [v for v in self.colors if v not in bset]

    def degree(self, v) -> int:
        return len(self.rotations[v])

    def other_end(self, e: int, v):
        u, w = self.edges[e]
        if v == u:
            return w
        if v == w:
            return u
        raise ValueError(f"vertex {v} is not an endpoint of edge {e}")

    def boundary_edge(self, p: int) -> int:
        return self.rotations[self.boundary[p - 1]][0]

    def boundary_index(self, v) -> int:
        return self.boundary.index(v) + 1

    def is_boundary(self, v) -> bool:
        return v in set(self.boundary)

    def edge_list(self) -> list[int]:
        return sorted(self.edges)

    def _fresh_vertex(self, prefix: str = "v"):
        i = len(self.colors)
        while f"{prefix}{i}" in self.colors:
            i += 1
        return f"{prefix}{i}"

    def _fresh_edge(self) -> int:
        return max(self.edges, default=-1) + 1

    # -- strands ---------------------------------------------------------------

    def _strand_step(self, e: int, v):
        """Arriving at interior v via edge e, return the outgoing edge."""
        rot = self.rotations[v]
        i = rot.index(e)
        if self.colors[v] == BLACK:
            return rot[(i - 1) % len(rot)]
        return rot[(i + 1) % len(rot)]

    def trace(self) -> "StrandData":
        """Compute strands, the strand permutation, and edge labels."""
        if self._strands is not None:
            return self._strands
        n = self.n
        strands: dict[int, list[tuple[int, object, object]]] = {}
        used: set[tuple[int, object]] = set()
        targets = {}
        for p in range(1, n + 1):
            bp = self.boundary[p - 1]
            e = self.rotations[bp][0]
            v = self.other_end(e, bp)
            path = [(e, bp, v)]
            guard = 0
            while not self.is_boundary(v):
                e = self._strand_step(e, v)
                w = self.other_end(e, v)
                path.append((e, v, w))
                v = w
                guard += 1
                if guard > 4 * len(self.edges) + 8:
                    raise ValueError("strand revisits a directed half-edge")
            for (ee, a, b) in path:
                key = (ee, a)
                if key in used:
                    raise ValueError("strand revisits a directed half-edge")
                used.add(key)
            strands[p] = path
            targets[p] = self.boundary_index(v)
        sigma = [targets[p] for p in range(1, n + 1)]
        if sorted(sigma) != list(range(1, n + 1)):
            raise ValueError("strand endpoints do not form a permutation")
        window = []
        for p, v in enumerate(sigma, start=1):
            if v == p:
                # loop if b_p is white, coloop if black
                window.append(p if self.colors[self.boundary[p - 1]] == WHITE else p + n)
            else:
                window.append(p + (v - p) % n)
        f = BoundedAffinePermutation(window)
        labels: dict[int, frozenset[int]] = {}
        for p, path in strands.items():
            for (e, _, _) in path:
                lab = labels.get(e, frozenset())
                labels[e] = lab | {targets[p]}
        for e in self.edges:
            if e not in labels or len(labels[e]) != 2:
                # loops/coloops bounce through their leaf edge with one target
                if e in labels and len(labels[e]) == 1:
                    continue
                raise ValueError(f"edge {e} is not covered by exactly two strands")
        self._strands = StrandData(f=f, strands=strands, edge_labels=labels,
                                   graph=self)
        return self._strands

    # -- faces -------------------------------------------------------------------

    def _ext_rotation(self, v):
        if not self.is_boundary(v):
            return list(self.rotations[v])
        p = self.boundary_index(v)
        return [("arcnext", p)] + list(self.rotations[v]) + [("arcprev", p)]

    def _face_next(self, state):
        v, token = state
        rot = self._ext_rotation(v)
        i = rot.index(token)
        token2 = rot[(i - 1) % len(rot)]
        if isinstance(token2, tuple) and token2[0] == "arcnext":
            p = token2[1]
            q = p % self.n + 1
            return (self.boundary[q - 1], ("arcprev", q))
        if isinstance(token2, tuple) and token2[0] == "arcprev":
            p = token2[1]
            q = (p - 2) % self.n + 1
            return (self.boundary[q - 1], ("arcnext", q))
        return (self.other_end(token2, v), token2)

    def faces(self) -> list["Face"]:
        """All faces of the disk embedding (the outer region is dropped)."""
        if self._faces is not None:
            return self._faces
        states = []
        for e, (u, v) in self.edges.items():
            states.append((u, e))
            states.append((v, e))
        for p in range(1, self.n + 1):
            states.append((self.boundary[p - 1], ("arcnext", p)))
            q = p % self.n + 1
            states.append((self.boundary[q - 1], ("arcprev", q)))
        seen = set()
        orbits = []
        for s in states:
            if s in seen:
                continue
            orbit = []
            cur = s
            while cur not in seen:
                seen.add(cur)
                orbit.append(cur)
                cur = self._face_next(cur)
            orbits.append(orbit)
        outer_state = (self.boundary[0], ("arcnext", 1))
        trace = self.trace()
        face_of_state: dict = {}
        kept = []
        for orbit in orbits:
            if outer_state in orbit:
                continue
            idx = len(kept)
            kept.append(orbit)
            for s in orbit:
                face_of_state[s] = idx
        labels: list[set[int]] = [set() for _ in kept]
        # adjacency between faces across each (undirected) edge
        edge_faces: dict[int, list[int]] = {}
        for e, (u, v) in self.edges.items():
            fs = [face_of_state[s] for s in ((u, e), (v, e)) if s in face_of_state]
            edge_faces[e] = fs
        n = self.n
        for p, path in trace.strands.items():
            q = trace.f.perm(p)
            if trace.f(p) == p:
                continue                       # loops belong to no label
            if trace.f(p) == p + n:
                for lab in labels:             # coloops belong to every label
                    lab.add(q)
                continue
            used: dict[int, int] = {}
            for (e, _a, _b) in path:
                used[e] = used.get(e, 0) + 1
            # seeds: faces directly left of a single-traversal pass (a pass
            # along a doubly-used hairpin edge borders the wrong region), and
            # boundary faces on the clockwise arc from b_p to the target b_q
            seeds = set()
            for (e, a, _b) in path:
                if used[e] != 1:
                    continue
                s = (a, e)
                if s in face_of_state:
                    seeds.add(face_of_state[s])
            j = p
            while j % n != q % n:
                arc_state = (self.boundary[j % n], ("arcprev", j % n + 1))
                if arc_state in face_of_state:
                    seeds.add(face_of_state[arc_state])
                j += 1
            # flood the left region through edges the strand does not use
            stack = list(seeds)
            region = set(seeds)
            while stack:
                fidx = stack.pop()
                for s in kept[fidx]:
                    tok = s[1]
                    if isinstance(tok, tuple):
                        continue
                    if tok in used:
                        continue
                    for other_idx in edge_faces[tok]:
                        if other_idx not in region:
                            region.add(other_idx)
                            stack.append(other_idx)
            for fidx in region:
                labels[fidx].add(q)
        faces = []
        for orbit, label in zip(kept, labels):
            is_bd = any(isinstance(tok, tuple) for (_, tok) in orbit)
            faces.append(Face(states=tuple(orbit), label=frozenset(label),
                              is_boundary=is_bd))
        self._faces = faces
        return faces

    def face_count(self) -> int:
        return len(self.faces())

    def face_labels(self) -> set[frozenset[int]]:
        return {F.label for F in self.faces()}

    # -- serialization -------------------------------------------------------------

    def to_json(self) -> dict:
        idx = {v: i for i, v in enumerate(self.colors)}
        verts = [{"id": idx[v], "color": "black" if c == BLACK else "white",
                  "boundary": v in set(self.boundary)}
                 for v, c in self.colors.items()]
        eids = sorted(self.edges)
        epos = {e: i for i, e in enumerate(eids)}
        return {
            "n": self.n,
            "vertices": verts,
            "boundary": [idx[b] for b in self.boundary],
            "edges": [[idx[self.edges[e][0]], idx[self.edges[e][1]]] for e in eids],
            "rotations": {str(idx[v]): [epos[e] for e in rot]
                          for v, rot in self.rotations.items()},
        }

    @staticmethod
    def from_json(data: dict) -> "PlabicGraph":
        colors = {v["id"]: BLACK if v["color"] == "black" else WHITE
                  for v in data["vertices"]}
        edges = {i: (u, v) for i, (u, v) in enumerate(data["edges"])}
        rotations = {int(v): rot for v, rot in data["rotations"].items()}
        return PlabicGraph(data["n"], colors, data["boundary"], edges, rotations)

    def to_dot(self, labels: bool = True) -> str:
        lines = ["graph plabic {"]
        for v, c in self.colors.items():
            shape = "point" if v in set(self.boundary) else "circle"
            fill = "black" if c == BLACK else "white"
            name = f'"{v}"'
            if v in set(self.boundary):
                name = f'"b{self.boundary_index(v)}"'
            lines.append(f'  {name} [shape={shape}, style=filled, fillcolor={fill}];')
        try:
            lab = self.trace().edge_labels if labels else {}
        except ValueError:
            lab = {}
        for e, (u, v) in sorted(self.edges.items()):
            un = f'"b{self.boundary_index(u)}"' if self.is_boundary(u) else f'"{u}"'
            vn = f'"b{self.boundary_index(v)}"' if self.is_boundary(v) else f'"{v}"'
            label = ""
            if e in lab and len(lab[e]) == 2:
                a, b = sorted(lab[e])
                label = f' [label="{a}{b}"]'
            lines.append(f"  {un} -- {vn}{label};")
        lines.append("}")
        return "\n".join(lines)


@dataclass
class Face:
    states: tuple
    label: frozenset[int]
    is_boundary: bool


@dataclass
class StrandData:
    f: BoundedAffinePermutation
    strands: dict[int, list[tuple[int, object, object]]]
    edge_labels: dict[int, frozenset[int]]
    graph: PlabicGraph


def is_reduced(G: PlabicGraph) -> bool:
    """Face-count criterion: k(n-k) + 1 - l(f) faces."""
    f = G.trace().f
    expected = f.k * (G.n - f.k) + 1 - f.length()
    return G.face_count() == expected


# -- geometric rotation helper ----------------------------------------------------


def rotations_from_positions(colors: dict, edges: dict[int, tuple],
                             pos: dict) -> dict:
    """Clockwise rotations from 2D positions (y axis up, angles decreasing)."""
    incident: dict = {v: [] for v in colors}
    for e, (u, v) in edges.items():
        incident[u].append(e)
        incident[v].append(e)
    rotations = {}
    for v, inc in incident.items():
        x0, y0 = pos[v]

        def ang(e):
            w = edges[e][1] if edges[e][0] == v else edges[e][0]
            x1, y1 = pos[w]
            return -math.atan2(y1 - y0, x1 - x0)

        rotations[v] = sorted(inc, key=ang)
    return rotations


# -- basic constructors -------------------------------------------------------------


def _circle_positions(n: int, radius: float = 10.0) -> list[tuple[float, float]]:
    return [(radius * math.cos(math.pi / 2 - 2 * math.pi * p / n),
             radius * math.sin(math.pi / 2 - 2 * math.pi * p / n))
            for p in range(n)]


def single_white_star(n: int) -> PlabicGraph:
    """One interior white vertex joined to every boundary vertex: f_{1,n}."""
    colors = {"c": WHITE}
    boundary = []
    edges = {}
    rotations = {"c": list(range(n))}
    for p in range(1, n + 1):
        b = f"b{p}"
        colors[b] = BLACK
        boundary.append(b)
        edges[p - 1] = ("c", b)
        rotations[b] = [p - 1]
    return PlabicGraph(n, colors, boundary, edges, rotations)


def _lollipop_graph(window: Sequence[int]) -> PlabicGraph:
    """A graph of loops and coloops only (every strand bounces at a leaf)."""
    f = BoundedAffinePermutation(window)
    n = f.n
    colors = {}
    boundary = []
    edges = {}
    rotations = {}
    for p in range(1, n + 1):
        if f(p) == p:            # loop: white boundary, black leaf
            bc, lc = WHITE, BLACK
        elif f(p) == p + n:      # coloop: black boundary, white leaf
            bc, lc = BLACK, WHITE
        else:
            raise ValueError("lollipop graph needs loops/coloops only")
        b, leaf = f"b{p}", f"l{p}"
        colors[b], colors[leaf] = bc, lc
        boundary.append(b)
        e = p - 1
        edges[e] = (b, leaf)
        rotations[b] = [e]
        rotations[leaf] = [e]
    return PlabicGraph(n, colors, boundary, edges, rotations)


def insert_lollipop(G: PlabicGraph, p: int, loop: bool) -> PlabicGraph:
    """Insert a loop/coloop boundary vertex at position p (shifting others)."""
    colors = dict(G.colors)
    edges = dict(G.edges)
    rotations = {v: list(r) for v, r in G.rotations.items()}
    b = f"nb{p}_{len(colors)}"
    leaf = f"nl{p}_{len(colors)}"
    colors[b] = WHITE if loop else BLACK
    colors[leaf] = BLACK if loop else WHITE
    e = max(edges, default=-1) + 1
    edges[e] = (b, leaf)
    rotations[b] = [e]
    rotations[leaf] = [e]
    boundary = list(G.boundary)
    boundary.insert(p - 1, b)
    return PlabicGraph(G.n + 1, colors, boundary, edges, rotations)


def _insert_on_boundary_ray(G: PlabicGraph, p: int, color: str):
    """Put a new vertex of the given color on b_p's edge, next to b_p,
    buffering with a degree-2 vertex wherever bipartiteness demands it.
    Returns (graph, new_vertex)."""
    colors = dict(G.colors)
    edges = dict(G.edges)
    rotations = {v: list(r) for v, r in G.rotations.items()}
    bp = G.boundary[p - 1]
    e = rotations[bp][0]
    far = G.other_end(e, bp)
    nv = f"r{p}_{len(colors)}"
    colors[nv] = color
    eid = max(edges) + 1
    # replace e by bp--nv (id e) and nv--far (id eid)
    edges[e] = (bp, nv)
    edges[eid] = (nv, far)
    rotations[far][rotations[far].index(e)] = eid
    rotations[nv] = [e, eid]   # degree 2: cyclic order immaterial
    if colors[nv] == colors[far]:
        buf = f"r{p}b_{len(colors)}"
        colors[buf] = _opp(color)
        bid = eid + 1
        edges[eid] = (nv, buf)
        edges[bid] = (buf, far)
        rotations[far][rotations[far].index(eid)] = bid
        rotations[buf] = [eid, bid]
    if colors[nv] == colors[bp]:
        buf = f"r{p}c_{len(colors)}"
        colors[buf] = _opp(color)
        bid = max(edges) + 1
        edges[e] = (bp, buf)
        edges[bid] = (buf, nv)
        rotations[buf] = [e, bid]
        rotations[nv][rotations[nv].index(e)] = bid
    G2 = PlabicGraph(G.n, colors, G.boundary, edges, rotations)
    return G2, nv


def add_bridge(G: PlabicGraph, r: int) -> PlabicGraph:
    """Attach a bridge between the rays of b_r and b_{r+1}.

    A white vertex lands on ray r and a black one on ray r+1 (with degree-2
    buffers as needed); the bridge edge sits between them, on the clockwise
    side of ray r.  Undoes remove_bridge at r on the strand permutation.
    """
    r2 = r % G.n + 1
    G1, A = _insert_on_boundary_ray(G, r, WHITE)
    G2, B = _insert_on_boundary_ray(G1, r2, BLACK)
    colors = dict(G2.colors)
    edges = dict(G2.edges)
    rotations = {v: list(rot) for v, rot in G2.rotations.items()}
    eb = max(edges) + 1
    edges[eb] = (A, B)
    # ray vertex rotations are [down(toward boundary), up]; the bridge goes
    # between them: clockwise [down, bridge, up] at A, [down, up, bridge] at B
    da = rotations[A]
    rotations[A] = [da[0], eb, da[1]]
    db = rotations[B]
    rotations[B] = [db[0], db[1], eb]
    return PlabicGraph(G2.n, colors, G2.boundary, edges, rotations)


def blacken_boundary(G: PlabicGraph) -> PlabicGraph:
    """Recolor white boundary vertices black behind a degree-2 white buffer.

    Subdividing the boundary edge swaps the used/unused convention at that
    vertex, so boundary subsets and measurements are unchanged."""
    G = G.copy()
    for p in range(1, G.n + 1):
        b = G.boundary[p - 1]
        if G.colors[b] == BLACK:
            continue
        e = G.rotations[b][0]
        far = G.other_end(e, b)
        if G.degree(far) == 1:
            continue   # a genuine loop lollipop keeps its white boundary vertex
        u = G._fresh_vertex(f"wb{p}_")
        G.colors[b] = BLACK
        G.colors[u] = WHITE
        eid = max(G.edges) + 1
        G.edges[e] = (b, u)
        G.edges[eid] = (u, far)
        G.rotations[far][G.rotations[far].index(e)] = eid
        G.rotations[u] = [e, eid]
    G._strands = None
    G._faces = None
    G.validate()
    return G


def bridge_graph(f: BoundedAffinePermutation) -> PlabicGraph:
    """Reduced graph built by peeling bridges (smallest r first), loops and
    coloops, then re-adding them in reverse order."""
    ops: list[tuple] = []
    g = f
    while g.n > 1:
        if g.loops():
            p = g.loops()[0]
            ops.append(("loop", p))
            g = delete_index(g, p)
        elif g.coloops():
            p = g.coloops()[0]
            ops.append(("coloop", p))
            g = delete_index(g, p)
        else:
            br = bridges(g)
            if not br:
                raise AssertionError(f"no bridge, loop, or coloop in {g}")
            r = br[0]
            ops.append(("bridge", r))
            g = remove_bridge(g, r)
    G = _lollipop_graph(g.window)
    for kind, x in reversed(ops):
        if kind == "loop":
            G = insert_lollipop(G, x, loop=True)
        elif kind == "coloop":
            G = insert_lollipop(G, x, loop=False)
        else:
            G = add_bridge(G, x)
    G = blacken_boundary(G)
    got = G.trace().f
    if got != f:
        raise AssertionError(f"bridge graph traces to {got}, expected {f}")
    return G


# -- Le-diagram graphs ---------------------------------------------------------------


def _le_shape(f: BoundedAffinePermutation) -> tuple[list[int], list[int]]:
    """(row labels, column labels) of the Young diagram of f, in path order."""
    from critdimer.permutations import grassmann_necklace

    rows = sorted(grassmann_necklace(f)[1])
    cols = [q for q in range(1, f.n + 1) if q not in rows]
    return rows, cols


def _gamma_fillings(rows: list[int], cols: list[int], count: int,
                    empty_rows: set[int]) -> Iterable[set[tuple[int, int]]]:
    """All fillings of the shape {(p,q): p in rows, q in cols, p < q} with the
    Le property (no empty box with a plus above and a plus to its left), the
    prescribed number of pluses, empty rows exactly at the given coloops, and
    no empty columns.  Column labels increase westward."""
    boxes = [(p, q) for p in rows for q in cols if q > p]
    if count > len(boxes):
        return
    for plus_tuple in itertools.combinations(boxes, count):
        plus = set(plus_tuple)
        bad = False
        for p in rows:
            empty = all((p, q) not in plus for q in cols if q > p)
            if empty != (p in empty_rows):
                bad = True
                break
        if bad:
            continue
        if any(all((p, q) not in plus for p in rows if p < q) for q in cols):
            continue   # an empty column would be a loop
        ok = True
        for (p, q) in boxes:
            if (p, q) in plus:
                continue
            above = any((p2, q) in plus for p2 in rows if p2 < p)
            # "left" in the English picture means larger column label
            left = any((p, q2) in plus for q2 in cols if q2 > q)
            if above and left:
                ok = False
                break
        if ok:
            yield plus


def grid_graph(f: BoundedAffinePermutation,
               plus: set[tuple[int, int]]) -> PlabicGraph:
    """The grid graph of a filling of the Young diagram of f.

    Each plus box carries a white vertex (southwest, holding the west and
    south wire stubs) and a black vertex (northeast, holding north and east),
    joined by a connector.  Row wires run to the east boundary, column wires
    to the south boundary; empty columns get coloop lollipops.
    """
    rows, cols = _le_shape(f)
    rowpos = {p: i for i, p in enumerate(rows)}          # top to bottom
    colpos = {q: j for j, q in enumerate(cols)}          # east to west
    colors: dict = {}
    edges: dict[int, tuple] = {}
    pos: dict = {}
    eid = itertools.count()
    W = len(cols)
    H = len(rows)

    def wv(p, q):
        return ("w", p, q)

    def bv(p, q):
        return ("b", p, q)

    for (p, q) in plus:
        x = W - colpos[q]              # eastward coordinate
        y = -rowpos[p]
        colors[wv(p, q)] = WHITE
        colors[bv(p, q)] = BLACK
        pos[wv(p, q)] = (x - 0.25, y - 0.25)
        pos[bv(p, q)] = (x + 0.25, y + 0.25)
        edges[next(eid)] = (wv(p, q), bv(p, q))
    boundary = []
    for lab in range(1, f.n + 1):
        b = f"b{lab}"
        boundary.append(b)
        if lab in rowpos:
            colors[b] = BLACK
            pos[b] = (W + 1.5, -rowpos[lab])
        else:
            colors[b] = BLACK
            pos[b] = (W - colpos[lab], -H - 1.5)
    # row wires (an empty row is a coloop: white leaf on the black boundary)
    for p in rows:
        row_plus = sorted((q for q in cols if (p, q) in plus), key=lambda q: colpos[q])
        if not row_plus:
            leaf = f"leaf{p}"
            colors[leaf] = WHITE
            pos[leaf] = (W + 0.8, -rowpos[p])
            edges[next(eid)] = (f"b{p}", leaf)
            continue
        prev = f"b{p}"   # east end
        for q in row_plus:
            e = next(eid)
            edges[e] = (prev, bv(p, q))
            prev = wv(p, q)
    # column wires
    for q in cols:
        col_plus = sorted((p for p in rows if (p, q) in plus), key=lambda p: rowpos[p])
        if not col_plus:
            raise ValueError(f"column {q} of the filling is empty (loop)")
        prev = None
        for p in col_plus:
            if prev is not None:
                edges[next(eid)] = (prev, bv(p, q))
            prev = wv(p, q)
        edges[next(eid)] = (prev, f"b{q}")
    # bipartite repair: subdivide same-colored edges (row wire east ends)
    final_edges: dict[int, tuple] = {}
    fid = itertools.count()
    for (u, v) in edges.values():
        if colors[u] == colors[v]:
            mid = ("mid", u, v)
            colors[mid] = _opp(colors[u])
            pos[mid] = ((pos[u][0] + pos[v][0]) / 2, (pos[u][1] + pos[v][1]) / 2)
            final_edges[next(fid)] = (u, mid)
            final_edges[next(fid)] = (mid, v)
        else:
            final_edges[next(fid)] = (u, v)
    rotations = rotations_from_positions(colors, final_edges, pos)
    return PlabicGraph(f.n, colors, boundary, final_edges, rotations)


def le_filling(f: BoundedAffinePermutation) -> set[tuple[int, int]]:
    """The unique Le filling of the shape of f whose grid graph traces to f.

    Found by inverting the trace over Le fillings with the right plus count
    (the cell dimension); intended for desk-scale n.
    """
    if f.loops():
        raise ValueError("le_filling expects a permutation without loops")
    rows, cols = _le_shape(f)
    count = f.k * (f.n - f.k) - f.length()
    for plus in _gamma_fillings(rows, cols, count, empty_rows=set(f.coloops())):
        try:
            G = grid_graph(f, plus)
            if G.trace().f == f:
                return plus
        except ValueError:
            continue
    raise ValueError(f"no Le filling found for {f}")


def le_graph(f: BoundedAffinePermutation) -> PlabicGraph:
    """The (contracted) Le-diagram graph of f."""
    if f.n == 1 or all(f(p) in (p, p + f.n) for p in range(1, f.n + 1)):
        return _lollipop_graph(f.window)
    if f.loops():
        # strip loops, build, and reinsert lollipops
        p = f.loops()[0]
        G = le_graph(delete_index(f, p))
        return insert_lollipop(G, p, loop=True)
    G = grid_graph(f, le_filling(f))
    G = contract_degree_two(G)
    got = G.trace().f
    if got != f:
        raise AssertionError(f"Le graph traces to {got}, expected {f}")
    return G


def contract_degree_two(G: PlabicGraph) -> PlabicGraph:
    """Contract interior degree-2 vertices whose neighbors are both interior."""
    G = G.copy()
    changed = True
    while changed:
        changed = False
        for v in G.interior_vertices():
            if G.degree(v) != 2:
                continue
            e1, e2 = G.rotations[v]
            x, y = G.other_end(e1, v), G.other_end(e2, v)
            if G.is_boundary(x) or G.is_boundary(y) or x == y:
                continue
            _contract_at(G, v)
            changed = True
            break
    return G


def _contract_at(G: PlabicGraph, v) -> None:
    """Merge the two neighbors of the degree-2 vertex v in place."""
    e1, e2 = G.rotations[v]
    x, y = G.other_end(e1, v), G.other_end(e2, v)
    rx = G.rotations[x]
    ry = G.rotations[y]
    ix = rx.index(e1)
    iy = ry.index(e2)
    merged = rx[ix + 1:] + rx[:ix] + ry[iy + 1:] + ry[:iy]
    for e in ry[iy + 1:] + ry[:iy]:
        u, w = G.edges[e]
        G.edges[e] = (x if u == y else u, x if w == y else w)
    del G.edges[e1]
    del G.edges[e2]
    del G.rotations[v]
    del G.rotations[y]
    del G.colors[v]
    del G.colors[y]
    G.rotations[x] = merged
    G._strands = None
    G._faces = None


# -- triangulation graphs ------------------------------------------------------------


def fan_triangulation(n: int, apex: int = 2) -> list[tuple[int, int, int]]:
    """Triangles of the fan triangulation of the n-gon at the given vertex."""
    others = [(apex + i - 1) % n + 1 for i in range(1, n)]
    return [tuple(sorted((apex, others[i], others[i + 1])))
            for i in range(len(others) - 1)]


def triangulation_graph(n: int, triangles: Sequence[tuple[int, int, int]] | None = None
                        ) -> PlabicGraph:
    """Black-trivalent reduced graph for f_{2,n} from a polygon triangulation.

    One trivalent black vertex per triangle, one white vertex per polygon
    vertex v (joined to the triangles containing v), and boundary edges
    b_p -- W_{p+1}.  The interior faces are labeled by the diagonals.  For
    n = 4 with the fan at 2 this is the four-boundary square graph with two
    degree-2 white vertices, whose measurements appear in the golden tests.
    """
    if n < 3:
        raise ValueError("triangulation graphs need n >= 3")
    if triangles is None:
        triangles = fan_triangulation(n)
    triangles = [tuple(sorted(t)) for t in triangles]
    if len(triangles) != n - 2:
        raise ValueError("a triangulation of the n-gon has n-2 triangles")
    colors: dict = {}
    edges: dict[int, tuple] = {}
    pos: dict = {}
    eid = itertools.count()
    circ = _circle_positions(n)
    boundary = []
    for p in range(1, n + 1):
        b = f"b{p}"
        colors[b] = BLACK
        pos[b] = circ[p - 1]
        boundary.append(b)
    for v in range(1, n + 1):
        W = ("W", v)
        colors[W] = WHITE
        # near the boundary at the angle of b_{v-1}, which it attaches to
        x, y = circ[(v - 2) % n]
        pos[W] = (0.82 * x, 0.82 * y)
    for t in triangles:
        B = ("T",) + t
        colors[B] = BLACK
        xs = [pos[("W", v)] for v in t]
        pos[B] = (sum(x for x, _ in xs) / 3, sum(y for _, y in xs) / 3)
        for v in t:
            edges[next(eid)] = (("W", v), B)
    for p in range(1, n + 1):
        edges[next(eid)] = (f"b{p}", ("W", p % n + 1))
    rotations = rotations_from_positions(colors, edges, pos)
    G = PlabicGraph(n, colors, boundary, edges, rotations)
    got = G.trace().f
    if got != top_cell(2, n):
        raise AssertionError(f"triangulation graph traces to {got}")
    return G


def tree_graph(n: int, triangles: Sequence[tuple[int, int, int]] | None = None
               ) -> PlabicGraph:
    """White-trivalent reduced graph for f_{1,n} dual to a triangulation.

    One trivalent white vertex per triangle, degree-2 black vertices on the
    leaf edges (to the white boundary vertices) and in the middle of each
    wall between adjacent triangles; the n faces are labeled {1}, ..., {n}.
    """
    if n < 3:
        raise ValueError("tree graphs need n >= 3")
    if triangles is None:
        triangles = fan_triangulation(n)
    triangles = [tuple(sorted(t)) for t in triangles]
    colors: dict = {}
    edges: dict[int, tuple] = {}
    pos: dict = {}
    eid = itertools.count()
    circ = _circle_positions(n)
    boundary = []
    for p in range(1, n + 1):
        b = f"b{p}"
        colors[b] = WHITE
        pos[b] = circ[p - 1]
        boundary.append(b)
    # polygon vertex r sits on the arc between b_{r-1} and b_r

    def poly_pos(r):
        a = math.pi / 2 - 2 * math.pi * (r - 1) / n
        b = math.pi / 2 - 2 * math.pi * (r - 2) / n
        mid = (a + b) / 2
        return (10.0 * math.cos(mid), 10.0 * math.sin(mid))

    for t in triangles:
        W = ("S",) + t
        colors[W] = WHITE
        xs = [poly_pos(v) for v in t]
        pos[W] = (sum(x for x, _ in xs) / 3, sum(y for _, y in xs) / 3)
    # polygon sides (r, r+1): a leaf edge toward b_r through a degree-2 black
    for r in range(1, n + 1):
        side = {r, r % n + 1}
        owners = [t for t in triangles if side <= set(t)]
        if len(owners) != 1:
            raise ValueError(f"side {side} not covered by exactly one triangle")
        t = owners[0]
        x = ("x", r)
        colors[x] = BLACK
        bx, by = pos[f"b{r}"]
        wx, wy = pos[("S",) + t]
        pos[x] = (0.7 * bx + 0.3 * wx, 0.7 * by + 0.3 * wy)
        edges[next(eid)] = (f"b{r}", x)
        edges[next(eid)] = (x, ("S",) + t)
    # diagonals: walls between adjacent triangles through a degree-2 black
    diag_count: dict[tuple[int, int], list] = {}
    for t in triangles:
        for pair in itertools.combinations(t, 2):
            diag_count.setdefault(pair, []).append(t)
    for pair, ts in diag_count.items():
        if len(ts) == 2:
            m = ("m",) + pair
            colors[m] = BLACK
            (x1, y1), (x2, y2) = pos[("S",) + ts[0]], pos[("S",) + ts[1]]
            pos[m] = ((x1 + x2) / 2, (y1 + y2) / 2)
            edges[next(eid)] = (("S",) + ts[0], m)
            edges[next(eid)] = (m, ("S",) + ts[1])
    rotations = rotations_from_positions(colors, edges, pos)
    G = PlabicGraph(n, colors, boundary, edges, rotations)
    got = G.trace().f
    if got != top_cell(1, n):
        raise AssertionError(f"tree graph traces to {got}")
    return G


# -- weights ---------------------------------------------------------------------


def unit_weights(G: PlabicGraph) -> dict[int, float]:
    return {e: 1.0 for e in G.edges}


def random_positive_weights(G: PlabicGraph, rng: random.Random) -> dict[int, float]:
    return {e: math.exp(rng.uniform(-1.0, 1.0)) for e in G.edges}


def critical_weights_theta(G: PlabicGraph, theta) -> dict[int, float]:
    """wt_theta: sin(theta_q - theta_p) on interior edges labeled {p,q}, 1 on
    boundary edges (and on lollipop edges, which carry a single strand)."""
    th = _theta_values(theta)
    labels = G.trace().edge_labels
    wt = {}
    for e in G.edges:
        u, v = G.edges[e]
        if G.is_boundary(u) or G.is_boundary(v) or len(labels[e]) == 1:
            wt[e] = 1.0
            continue
        p, q = sorted(labels[e])
        wt[e] = math.sin(th[q - 1] - th[p - 1])
    return wt


def critical_weights_t(G: PlabicGraph, t) -> dict[int, complex]:
    """wt_t: bracket [t_q, t_p] on interior edges, 1 on boundary edges."""
    tv = _t_values(t)
    labels = G.trace().edge_labels
    wt = {}
    for e in G.edges:
        u, v = G.edges[e]
        if G.is_boundary(u) or G.is_boundary(v) or len(labels[e]) == 1:
            wt[e] = 1.0 + 0j
            continue
        p, q = sorted(labels[e])
        wt[e] = bracket_eval(tv[q - 1], tv[p - 1])
    return wt


def dual_critical_weights_theta(G: PlabicGraph, theta) -> dict[int, float]:
    """Dual weighting: sin(theta_q - theta_p) on every edge, boundary
    included; loop lollipops (single-strand edges) stay neutral, coloops are
    rejected (their boundary edge has no defined dual weight)."""
    f = G.trace().f
    if not f.is_coloopless():
        raise ValueError("dual weighting undefined at a coloop boundary edge")
    th = _theta_values(theta)
    labels = G.trace().edge_labels
    wt = {}
    for e in G.edges:
        lab = sorted(labels[e])
        if len(lab) != 2:
            wt[e] = 1.0
            continue
        p, q = lab
        wt[e] = math.sin(th[q - 1] - th[p - 1])
    return wt


def dual_critical_weights_t(G: PlabicGraph, t) -> dict[int, complex]:
    f = G.trace().f
    if not f.is_coloopless():
        raise ValueError("dual weighting undefined at a coloop boundary edge")
    tv = _t_values(t)
    labels = G.trace().edge_labels
    wt = {}
    for e in G.edges:
        lab = sorted(labels[e])
        if len(lab) != 2:
            wt[e] = 1.0 + 0j
            continue
        p, q = lab
        wt[e] = bracket_eval(tv[q - 1], tv[p - 1])
    return wt


def symbolic_weights(G: PlabicGraph) -> dict[int, LaurentPoly]:
    """Exact bracket weights in the polynomial ring Q[t_1^{\\pm}..t_n^{\\pm}]."""
    labels = G.trace().edge_labels
    n = G.n
    wt = {}
    for e in G.edges:
        u, v = G.edges[e]
        if G.is_boundary(u) or G.is_boundary(v) or len(labels[e]) == 1:
            wt[e] = LaurentPoly.one(n)
            continue
        p, q = sorted(labels[e])
        wt[e] = bracket(n, q, p)
    return wt


# -- gauge, contraction, square move ------------------------------------------------


def gauge(G: PlabicGraph, wt: dict, v, c) -> dict:
    """Rescale the weights of all edges incident to the interior vertex v."""
    if G.is_boundary(v):
        raise ValueError("gauge transformations act at interior vertices")
    if c == 0:
        raise ValueError("gauge constant must be nonzero")
    out = dict(wt)
    for e in G.rotations[v]:
        out[e] = out[e] * c
    return out


def contract(G: PlabicGraph, wt: dict, v) -> tuple[PlabicGraph, dict]:
    """Remove an interior degree-2 vertex with unit-weight incident edges by
    merging its two neighbors."""
    if G.is_boundary(v) or G.degree(v) != 2:
        raise ValueError("contract needs an interior degree-2 vertex")
    e1, e2 = G.rotations[v]
    if wt[e1] != wt[e2] or wt[e1] != 1:
        raise ValueError("contract needs unit incident weights")
    x, y = G.other_end(e1, v), G.other_end(e2, v)
    if G.is_boundary(x) or G.is_boundary(y) or x == y:
        raise ValueError("contraction would touch the boundary")
    G2 = G.copy()
    _contract_at(G2, v)
    out = {e: w for e, w in wt.items() if e in G2.edges}
    return G2, out


def uncontract(G: PlabicGraph, wt: dict, e: int, at=None) -> tuple[PlabicGraph, dict, object]:
    """Split the given endpoint of edge e off its vertex through a new
    degree-2 vertex with unit weights.  Returns (G', wt', new degree-2 vertex)."""
    u, v = G.edges[e]
    if at is None:
        at = u if G.colors[u] == WHITE else v
        if G.is_boundary(at):
            at = v if at == u else u
    if G.is_boundary(at):
        raise ValueError("cannot uncontract at a boundary vertex")
    G2 = G.copy()
    far = G2.other_end(e, at)
    v2 = G2._fresh_vertex("u")
    mid = G2._fresh_vertex("m")
    G2.colors[v2] = G2.colors[at]
    G2.colors[mid] = _opp(G2.colors[at])
    ea = max(G2.edges) + 1
    eb = ea + 1
    G2.edges[e] = (v2, far)
    G2.edges[ea] = (v2, mid)
    G2.edges[eb] = (mid, at)
    rot = G2.rotations[at]
    i = rot.index(e)
    G2.rotations[at] = rot[:i] + [eb] + rot[i + 1:]
    G2.rotations[v2] = [e, ea]
    G2.rotations[mid] = [ea, eb]
    G2._strands = None
    G2._faces = None
    out = dict(wt)
    out[ea] = 1
    out[eb] = 1
    return G2, out, mid


def square_faces(G: PlabicGraph) -> list[Face]:
    """Interior quadrilateral faces (candidate square-move sites)."""
    out = []
    for F in G.faces():
        if F.is_boundary:
            continue
        if len(F.states) == 4:
            corners = {v for (v, _e) in F.states}
            if len(corners) == 4:
                out.append(F)
    return out


def square_move(G: PlabicGraph, wt: dict, F: Face) -> tuple[PlabicGraph, dict]:
    """The square (spider) move at an interior quadrilateral face.

    Corners are made trivalent by uncontraction, corner gauges set the leg
    weights to 1, the face weights (a,b,c,d) become the opposite weight over
    ac + bd, corner colors swap, and legs are re-attached through degree-2
    vertices of the old corner color; degree-2 chains away from the boundary
    are contracted back.  Boundary measurements are unchanged projectively.
    """
    if F.is_boundary or len(F.states) != 4:
        raise ValueError("square move needs an interior quadrilateral face")
    G = G.copy()
    wt = dict(wt)
    face_edges = [e for (_v, e) in F.states]
    corners = [v for (v, _e) in F.states]
    if len(set(corners)) != 4:
        raise ValueError("square move needs four distinct corners")
    if any(G.degree(v) == 2 for v in corners):
        raise ValueError("square move corner of degree 2; contract the face first")
    # make every corner trivalent by splitting off its two face edges
    for idx in range(4):
        v = corners[idx]
        if G.degree(v) == 3:
            continue
        rot = G.rotations[v]
        fe = [e for e in rot if e in face_edges]
        assert len(fe) == 2
        i1, i2 = rot.index(fe[0]), rot.index(fe[1])
        if (i2 - i1) % len(rot) == 1:
            first = i1
        elif (i1 - i2) % len(rot) == 1:
            first = i2
        else:
            raise AssertionError("face edges not adjacent in rotation")
        order = rot[first:] + rot[:first]     # starts with the two face edges
        v2 = G._fresh_vertex("sq")
        mid = G._fresh_vertex("sm")
        G.colors[v2] = G.colors[v]
        G.colors[mid] = _opp(G.colors[v])
        ea = max(G.edges) + 1
        eb = ea + 1
        for e in order[:2]:
            uu, ww = G.edges[e]
            G.edges[e] = (v2 if uu == v else uu, v2 if ww == v else ww)
        G.edges[ea] = (v2, mid)
        G.edges[eb] = (mid, v)
        G.rotations[v2] = [order[0], order[1], ea]
        G.rotations[mid] = [ea, eb]
        G.rotations[v] = [eb] + order[2:]
        wt[ea] = 1
        wt[eb] = 1
        corners[idx] = v2
    G._strands = None
    G._faces = None
    # gauge the BLACK corners so their legs have weight 1; white corners keep
    # their legs (white gauges would disturb the shift-companion measurement)
    for v in corners:
        if G.colors[v] != BLACK:
            continue
        rot = G.rotations[v]
        leg = [e for e in rot if e not in face_edges]
        assert len(leg) == 1
        c = wt[leg[0]]
        if c == 0:
            raise ValueError("zero leg weight")
        for e in rot:
            wt[e] = wt[e] / c
    # spider rule: each face edge takes the opposite weight over ac + bd
    a, b, c, d = (wt[e] for e in face_edges)
    P = a * c + b * d
    if P == 0:
        raise ValueError("degenerate square move: ac + bd = 0")
    wt[face_edges[0]] = c / P
    wt[face_edges[1]] = d / P
    wt[face_edges[2]] = a / P
    wt[face_edges[3]] = b / P
    # swap corner colors; re-attach each leg through a vertex of the old color
    for v in corners:
        old = G.colors[v]
        G.colors[v] = _opp(old)
        rot = G.rotations[v]
        leg = [e for e in rot if e not in face_edges][0]
        u = G._fresh_vertex("lv")
        G.colors[u] = old
        ea = max(G.edges) + 1
        uu, ww = G.edges[leg]
        G.edges[leg] = (u if uu == v else uu, u if ww == v else ww)
        G.edges[ea] = (v, u)
        G.rotations[u] = [leg, ea]
        rot[rot.index(leg)] = ea
        wt[ea] = 1
    G._strands = None
    G._faces = None
    # contract degree-2 chains away from the boundary
    while True:
        target = None
        for v in G.interior_vertices():
            if G.degree(v) != 2:
                continue
            e1, e2 = G.rotations[v]
            x, y = G.other_end(e1, v), G.other_end(e2, v)
            if G.is_boundary(x) or G.is_boundary(y) or x == y:
                continue
            target = (v, e1, e2, x)
            break
        if target is None:
            break
        v, e1, e2, x = target
        if wt[e1] != wt[e2]:
            # gauge at x to equalize, then contract
            ratio = wt[e2] / wt[e1]
            for e in G.rotations[x]:
                wt[e] = wt[e] * ratio
            wt[e1] = wt[e2]
        _contract_at(G, v)
        wt = {e: w for e, w in wt.items() if e in G.edges}
    G.validate()
    return G, wt

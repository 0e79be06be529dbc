"""phi^4 Feynman multigraphs: 1PI tests, divergence degree, subdivergences.

Graphs are purely combinatorial: external legs are unlabeled stubs attached
to vertices and carry no momenta. Self-loops are ordinary internal edges.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable

MAX_CANONICAL_VERTICES = 10

Edge = tuple[int, int]
CanonicalKey = tuple[int, tuple[Edge, ...], tuple[int, ...]]


class GraphError(ValueError):
    """Raised for malformed or invariant-violating graphs."""


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: tuple[Edge, ...]
    external: tuple[int, ...] = ()
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        edges = tuple((min(u, v), max(u, v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "external", tuple(sorted(self.external)))
        if self.vertex_count < 0:
            raise GraphError("vertex_count must be nonnegative")
        for idx, (u, v) in enumerate(edges):
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise GraphError(f"edge #{idx} {(u, v)} references a missing vertex")
        for leg in self.external:
            if not 0 <= leg < self.vertex_count:
                raise GraphError(f"external leg at missing vertex {leg}")

    @property
    def internal_count(self) -> int:
        return len(self.edges)

    @property
    def leg_count(self) -> int:
        return len(self.external)

    def degree(self, v: int) -> int:
        d = self.external.count(v)
        for a, b in self.edges:
            d += (a == v) + (b == v)
        return d

    def degrees(self) -> list[int]:
        deg = [0] * self.vertex_count
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        for v in self.external:
            deg[v] += 1
        return deg

    def relabel(self, perm: list[int] | tuple[int, ...]) -> Graph:
        """Apply ``old vertex v -> perm[v]``."""
        return Graph(
            self.vertex_count,
            tuple((perm[a], perm[b]) for a, b in self.edges),
            tuple(perm[v] for v in self.external),
            self.name,
        )

    def __str__(self) -> str:
        label = self.name or "graph"
        return f"{label}(V={self.vertex_count}, I={self.internal_count}, J={self.leg_count})"


def _is_connected(n: int, edges: Iterable[Edge]) -> bool:
    if n == 0:
        return False
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        parent[find(a)] = find(b)
    root = find(0)
    return all(find(v) == root for v in range(n))


def is_connected(g: Graph) -> bool:
    return _is_connected(g.vertex_count, g.edges)


def loop_number(g: Graph) -> int:
    if not is_connected(g):
        raise GraphError(f"{g} is disconnected; loop number needs a connected graph")
    return g.internal_count - g.vertex_count + 1


def superficial_degree(g: Graph) -> int:
    """``4*loops - 2*internal_edges`` (phi^4 in four dimensions)."""
    return 4 * loop_number(g) - 2 * g.internal_count


def is_one_particle_irreducible(g: Graph) -> bool:
    if not is_connected(g):
        return False
    edges = list(g.edges)
    return all(_is_connected(g.vertex_count, edges[:k] + edges[k + 1:]) for k in range(len(edges)))


def check_graph(g: Graph, generator: bool = True) -> list[str]:
    """All invariant violations of ``g``; empty when valid."""
    problems = []
    if not is_connected(g):
        problems.append("graph is not connected via internal edges")
    for v, d in enumerate(g.degrees()):
        if d not in (2, 4):
            problems.append(f"vertex {v} has degree {d}, expected 4 (or 2 for an insertion vertex)")
    if generator:
        if g.leg_count not in (2, 4):
            problems.append(f"external leg count {g.leg_count} is not 2 or 4")
        if not problems and not is_one_particle_irreducible(g):
            problems.append("graph is not one-particle irreducible")
    return problems


# ---------------------------------------------------------------------------
# subgraphs


@dataclass(frozen=True)
class Subgraph:
    parent: Graph
    edge_subset: frozenset[int]

    def components(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        """Connected components as (sorted vertices, sorted edge indices)."""
        verts = sorted({v for k in self.edge_subset for v in self.parent.edges[k]})
        parent = {v: v for v in verts}

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        for k in self.edge_subset:
            a, b = self.parent.edges[k]
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        groups: dict[int, list[int]] = {}
        for v in verts:
            groups.setdefault(find(v), []).append(v)
        out = []
        for root in sorted(groups):
            vs = tuple(groups[root])
            es = tuple(sorted(k for k in self.edge_subset if self.parent.edges[k][0] in vs))
            out.append((vs, es))
        return out

    def component_graphs(self) -> list[Graph]:
        """Each component as a standalone graph; stubs of unselected edges become legs."""
        g = self.parent
        graphs = []
        for vs, es in self.components():
            index = {v: n for n, v in enumerate(vs)}
            legs = [index[v] for v in g.external if v in index]
            for k, (a, b) in enumerate(g.edges):
                if k in self.edge_subset:
                    continue
                if a in index:
                    legs.append(index[a])
                if b in index:
                    legs.append(index[b])
            edges = tuple((index[g.edges[k][0]], index[g.edges[k][1]]) for k in es)
            graphs.append(Graph(len(vs), edges, tuple(legs)))
        return graphs

    def loop_number(self) -> int:
        return sum(loop_number(c) for c in self.component_graphs())

    def superficial_degree(self) -> int:
        return sum(superficial_degree(c) for c in self.component_graphs())

    def is_admissible(self) -> bool:
        n = self.parent.internal_count
        if not self.edge_subset or len(self.edge_subset) >= n:
            return False
        return all(
            c.leg_count in (2, 4) and is_one_particle_irreducible(c) for c in self.component_graphs()
        )


def admissible_subgraphs(g: Graph) -> list[Subgraph]:
    """Every proper nonempty edge subset whose components are 1PI with 2 or 4 legs.

    Isomorphic subgraphs on distinct edge subsets are returned separately.
    """
    n = g.internal_count
    found = []
    for size in range(1, n):
        for subset in itertools.combinations(range(n), size):
            s = Subgraph(g, frozenset(subset))
            if s.is_admissible():
                found.append(s)
    return found


def contract(g: Graph, s: Subgraph) -> Graph:
    """Collapse each component of ``s`` to a single vertex."""
    if s.parent != g or not s.is_admissible():
        raise GraphError(f"edge subset {sorted(s.edge_subset)} is not an admissible subgraph of {g}")
    comps = s.components()
    new_index: dict[int, int] = {}
    for n, (vs, _) in enumerate(comps):
        for v in vs:
            new_index[v] = n
    nxt = len(comps)
    for v in range(g.vertex_count):
        if v not in new_index:
            new_index[v] = nxt
            nxt += 1
    edges = tuple(
        (new_index[a], new_index[b]) for k, (a, b) in enumerate(g.edges) if k not in s.edge_subset
    )
    return Graph(nxt, edges, tuple(new_index[v] for v in g.external))


# ---------------------------------------------------------------------------
# canonical forms


def _vertex_invariant(g: Graph, v: int) -> tuple:
    mult: dict[int, int] = {}
    loops = 0
    for a, b in g.edges:
        if a == b == v:
            loops += 1
        elif a == v:
            mult[b] = mult.get(b, 0) + 1
        elif b == v:
            mult[a] = mult.get(a, 0) + 1
    return (g.degree(v), g.external.count(v), loops, tuple(sorted(mult.values())))


def _encode(g: Graph, perm: tuple[int, ...]) -> tuple[tuple[Edge, ...], tuple[int, ...]]:
    edges = tuple(sorted((min(perm[a], perm[b]), max(perm[a], perm[b])) for a, b in g.edges))
    legs = tuple(sorted(perm[v] for v in g.external))
    return edges, legs


@lru_cache(maxsize=4096)
def _canonical(g: Graph) -> CanonicalKey:
    n = g.vertex_count
    inv = [_vertex_invariant(g, v) for v in range(n)]
    classes: dict[tuple, list[int]] = {}
    for v in range(n):
        classes.setdefault(inv[v], []).append(v)
    ordered = [classes[k] for k in sorted(classes)]
    best = None
    # vertices of class c are assigned the consecutive slot block of that class
    offsets = list(itertools.accumulate([0] + [len(c) for c in ordered]))
    for choice in itertools.product(*(itertools.permutations(c) for c in ordered)):
        perm = [0] * n
        for block, arrangement in enumerate(choice):
            for slot, v in enumerate(arrangement):
                perm[v] = offsets[block] + slot
        enc = _encode(g, tuple(perm))
        if best is None or enc < best:
            best = enc
    assert best is not None or n == 0
    edges, legs = best if best is not None else ((), ())
    return (n, edges, legs)


def canonical_form(g: Graph, max_vertices: int = MAX_CANONICAL_VERTICES) -> CanonicalKey:
    """Isomorphism-invariant key; equal keys iff the graphs are isomorphic.

    The key is the minimal (edges, legs) encoding over all vertex orderings
    compatible with a sorted vertex-invariant partition.
    """
    if g.vertex_count > max_vertices:
        raise GraphError(f"{g} exceeds the canonical-form bound of {max_vertices} vertices")
    return _canonical(Graph(g.vertex_count, g.edges, g.external))


def graph_from_key(key: CanonicalKey, name: str | None = None) -> Graph:
    n, edges, legs = key
    return Graph(n, edges, legs, name)


def key_loop_number(key: CanonicalKey) -> int:
    n, edges, _ = key
    return len(edges) - n + 1


# ---------------------------------------------------------------------------
# graph files


def graph_from_json(obj: dict, location: str = "graph", validate: bool = True) -> Graph:
    """Parse one graph object; with ``validate`` the first invariant violation is an error."""
    if not isinstance(obj, dict):
        raise GraphError(f"{location}: expected an object")
    for field_name in ("vertices", "edges"):
        if field_name not in obj:
            raise GraphError(f"{location}: missing field {field_name!r}")
    try:
        n = int(obj["vertices"])
        edges = []
        for k, e in enumerate(obj["edges"]):
            if len(e) != 2:
                raise GraphError(f"{location}: edge #{k} must have two endpoints")
            edges.append((int(e[0]), int(e[1])))
        legs = tuple(int(v) for v in obj.get("external", []))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, GraphError):
            raise
        raise GraphError(f"{location}: {exc}") from exc
    try:
        g = Graph(n, tuple(edges), legs, obj.get("name"))
    except GraphError as exc:
        raise GraphError(f"{location}: {exc}") from exc
    problems = check_graph(g) if validate else []
    if problems:
        raise GraphError(f"{location}: {problems[0]}")
    return g


def graph_to_json(g: Graph) -> dict:
    return {
        "name": g.name,
        "vertices": g.vertex_count,
        "edges": [list(e) for e in g.edges],
        "external": list(g.external),
    }


def load_graphs(path: str | Path, validate: bool = True) -> list[Graph]:
    """Read a graph file: one graph object or a list of them."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise GraphError(f"{path}: invalid JSON ({exc})") from exc
    items = data if isinstance(data, list) else [data]
    graphs = []
    for n, obj in enumerate(items):
        label = obj.get("name") if isinstance(obj, dict) else None
        graphs.append(graph_from_json(obj, f"{path}[{n}]" + (f" ({label})" if label else ""), validate))
    return graphs

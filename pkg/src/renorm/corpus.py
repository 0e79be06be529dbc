"""Built-in phi^4 graphs and a brute-force enumerator for small loop orders."""
from __future__ import annotations

import itertools

from .graphs import (
    Graph,
    canonical_form,
    graph_from_key,
    is_one_particle_irreducible,
)

# one-loop fish / bubble
B1 = Graph(2, ((0, 1), (0, 1)), (0, 0, 1, 1), "B1")
# one-loop tadpole
T1 = Graph(1, ((0, 0),), (0, 0), "T1")
# two-loop sunset
S = Graph(2, ((0, 1), (0, 1), (0, 1)), (0, 1), "S")
# two bubbles in a chain
B2 = Graph(3, ((0, 1), (0, 1), (1, 2), (1, 2)), (0, 0, 2, 2), "B2")

NAMED = (B1, T1, S, B2)


def _multigraphs(remaining: list[int]):
    """Yield edge lists realising the given residual degree sequence."""
    try:
        v = next(k for k, d in enumerate(remaining) if d)
    except StopIteration:
        yield []
        return
    for w in range(v, len(remaining)):
        if w == v:
            if remaining[v] < 2:
                continue
            remaining[v] -= 2
        else:
            if not remaining[w]:
                continue
            remaining[v] -= 1
            remaining[w] -= 1
        for rest in _multigraphs(remaining):
            yield [(v, w)] + rest
        if w == v:
            remaining[v] += 2
        else:
            remaining[v] += 1
            remaining[w] += 1


def phi4_graphs(loops: int, legs: int) -> list[Graph]:
    """All 1PI phi^4 graphs (every vertex 4-valent) up to isomorphism.

    Returned sorted by canonical key, unnamed.
    """
    if legs % 2 or legs < 0:
        return []
    # 4V = 2I + J and l = I - V + 1
    vertices = loops - 1 + legs // 2
    if vertices < 1:
        return []
    seen = {}
    for leg_spots in itertools.combinations_with_replacement(range(vertices), legs):
        residual = [4] * vertices
        for v in leg_spots:
            residual[v] -= 1
        if min(residual) < 0:
            continue
        for edges in _multigraphs(residual):
            g = Graph(vertices, tuple(edges), leg_spots)
            if not is_one_particle_irreducible(g):
                continue
            key = canonical_form(g)
            seen.setdefault(key, graph_from_key(key))
    return [seen[k] for k in sorted(seen)]


def builtin_graphs(max_loops: int = 3) -> list[Graph]:
    """Named graphs plus every 4-valent 1PI graph with 2 or 4 legs up to ``max_loops``.

    Graphs not in :data:`NAMED` are called ``G<loops>_<legs>_<index>``.
    """
    named = {canonical_form(g): g for g in NAMED}
    out = [g for g in NAMED if g.internal_count - g.vertex_count + 1 <= max_loops]
    for loops in range(1, max_loops + 1):
        for legs in (4, 2):
            idx = 0
            for g in phi4_graphs(loops, legs):
                key = canonical_form(g)
                if key in named:
                    continue
                idx += 1
                out.append(graph_from_key(key, f"G{loops}_{legs}_{idx}"))
    return out

"""Independent reference implementations used only by the tests."""
from __future__ import annotations

import itertools
from fractions import Fraction

import networkx as nx
import sympy
from scipy import integrate

Z, Y = sympy.symbols("z y")


def to_sympy(element):
    """Known terms of a RegElement as a sympy expression in z, y."""
    return sum((sympy.Rational(c.numerator, c.denominator) * Z**i * Y**j for (i, j), c in element.items()), sympy.S(0))


def sympy_terms(expr, order=None):
    """(i, j) -> Fraction of a Laurent polynomial in z, y, dropping z^i with i > order."""
    expr = sympy.expand(expr)
    out = {}
    for term in sympy.Add.make_args(expr):
        if term == 0:
            continue
        coeff, rest = term.as_coeff_Mul()
        powers = rest.as_powers_dict()
        i, j = int(powers.get(Z, 0)), int(powers.get(Y, 0))
        extra = rest / (Z**i * Y**j)
        coeff = coeff * extra
        if order is not None and i > order:
            continue
        c = sympy.Rational(coeff)
        out[(i, j)] = out.get((i, j), Fraction(0)) + Fraction(int(c.p), int(c.q))
    return {k: v for k, v in out.items() if v}


# -- graphs ------------------------------------------------------------------


def to_networkx(g):
    """Multigraph with leg counts as node attributes."""
    G = nx.MultiGraph()
    for v in range(g.vertex_count):
        G.add_node(v, legs=g.external.count(v))
    G.add_edges_from(g.edges)
    return G


def isomorphic(g1, g2) -> bool:
    return nx.is_isomorphic(
        to_networkx(g1), to_networkx(g2), node_match=lambda a, b: a["legs"] == b["legs"]
    )


def _connected(vertices, edges) -> bool:
    vertices = set(vertices)
    if not vertices:
        return True
    adj = {v: set() for v in vertices}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    start = next(iter(vertices))
    seen, stack = {start}, [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == vertices


def one_pi(vertices, edges) -> bool:
    if not _connected(vertices, edges):
        return False
    return all(_connected(vertices, edges[:k] + edges[k + 1:]) for k in range(len(edges)))


def brute_admissible(g):
    """Edge subsets (as sorted tuples) whose components are 1PI with 2 or 4 legs."""
    out = []
    n = len(g.edges)
    for size in range(1, n):
        for subset in itertools.combinations(range(n), size):
            chosen = [g.edges[k] for k in subset]
            verts = sorted({v for e in chosen for v in e})
            # components by BFS over chosen edges
            comps, left = [], set(verts)
            while left:
                v = left.pop()
                comp, stack = {v}, [v]
                while stack:
                    u = stack.pop()
                    for a, b in chosen:
                        for x, w in ((a, b), (b, a)):
                            if x == u and w not in comp:
                                comp.add(w)
                                stack.append(w)
                left -= comp
                comps.append(comp)
            ok = True
            for comp in comps:
                cedges = [e for e in chosen if e[0] in comp]
                legs = sum(g.external.count(v) for v in comp)
                for k, (a, b) in enumerate(g.edges):
                    if k in subset:
                        continue
                    legs += (a in comp) + (b in comp)
                if legs not in (2, 4) or not one_pi(comp, cedges):
                    ok = False
                    break
            if ok:
                out.append(subset)
    return out


# -- integrals ---------------------------------------------------------------


def cutoff_quadrature(cutoff: float, m: float = 1.0) -> float:
    val, _ = integrate.quad(lambda p: p**3 / (p * p + m * m) ** 2, 0.0, cutoff, epsabs=0, epsrel=1e-13, limit=200)
    return val


def dimreg_quadrature(z: float) -> float:
    """Analytic continuation of int_0^inf p^{3+z}/(p^2+1)^2 dp to 0 < z < 2.

    On [1, inf) subtract the large-p behaviour p^{z-1}, whose integral
    int_1^inf p^{z-1} dp = -1/z continues from Re z < 0.
    """
    lo, _ = integrate.quad(lambda p: p ** (3 + z) / (p * p + 1) ** 2, 0.0, 1.0, epsabs=0, epsrel=1e-13)
    hi, _ = integrate.quad(
        lambda p: p ** (z - 1) * (-2 * p * p - 1) / (p * p + 1) ** 2, 1.0, float("inf"), epsabs=0, epsrel=1e-13, limit=200
    )
    return lo + hi - 1.0 / z


def brute_contract(g, subset):
    """(component graphs with stubs as legs, quotient graph) as plain tuples
    (vertex_count, edges, legs), built without the library's helpers."""
    chosen = set(subset)
    parent = list(range(g.vertex_count))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for k in chosen:
        a, b = g.edges[k]
        parent[find(a)] = find(b)
    touched = {v for k in chosen for v in g.edges[k]}
    comps = {}
    for v in sorted(touched):
        comps.setdefault(find(v), []).append(v)
    pieces = []
    for root, vs in sorted(comps.items()):
        idx = {v: n for n, v in enumerate(vs)}
        edges = [(idx[a], idx[b]) for k, (a, b) in enumerate(g.edges) if k in chosen and a in idx]
        legs = [idx[v] for v in g.external if v in idx]
        for k, (a, b) in enumerate(g.edges):
            if k not in chosen:
                legs += [idx[x] for x in (a, b) if x in idx]
        pieces.append((len(vs), edges, legs))
    new = {}
    for root in sorted(comps):
        new[root] = len(new)
    for v in range(g.vertex_count):
        if v not in touched:
            new[("v", v)] = len(new)

    def image(v):
        return new[find(v)] if v in touched else new[("v", v)]

    quotient = (len(new), [(image(a), image(b)) for k, (a, b) in enumerate(g.edges) if k not in chosen],
                [image(v) for v in g.external])
    return pieces, quotient


def plain_isomorphic(p, q) -> bool:
    def build(t):
        n, edges, legs = t
        G = nx.MultiGraph()
        for v in range(n):
            G.add_node(v, legs=list(legs).count(v))
        G.add_edges_from(edges)
        return G

    return nx.is_isomorphic(build(p), build(q), node_match=lambda a, b: a["legs"] == b["legs"])

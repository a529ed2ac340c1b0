"""Random graph models, chordality machinery, and the edge-list file format.

All generators draw from a seeded PCG64 stream (``numpy.random.default_rng``),
so a fixed seed reproduces the exact edge set. Vertices are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from corrgen.errors import InvalidInput
from corrgen.linalg import SymMatrix

GRAPH_MODELS = ("er", "ba", "ws", "sbm", "chordal")


class Graph:
    """Undirected simple graph on ``p`` labeled vertices.

    Edges are stored as sorted ``(i, j)`` pairs with ``i < j``; iteration
    order is deterministic (lexicographic).
    """

    __slots__ = ("p", "edges", "_edge_set")

    def __init__(self, p: int, edges=()) -> None:
        if p < 1:
            raise InvalidInput("graph needs at least one vertex")
        norm = set()
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise InvalidInput(f"self-loop on vertex {i}")
            if not (0 <= i < p and 0 <= j < p):
                raise InvalidInput(f"edge ({i},{j}) out of range for p={p}")
            norm.add((min(i, j), max(i, j)))
        self.p = int(p)
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(norm))
        self._edge_set = frozenset(self.edges)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self._edge_set

    def adjacency(self) -> np.ndarray:
        """Dense boolean adjacency matrix."""
        adj = np.zeros((self.p, self.p), dtype=bool)
        for i, j in self.edges:
            adj[i, j] = adj[j, i] = True
        return adj

    def neighbor_sets(self) -> list[set[int]]:
        nbrs: list[set[int]] = [set() for _ in range(self.p)]
        for i, j in self.edges:
            nbrs[i].add(j)
            nbrs[j].add(i)
        return nbrs

    def edge_indices(self) -> tuple[np.ndarray, np.ndarray]:
        """Upper-triangular index arrays (rows, cols) of the edges."""
        if not self.edges:
            empty = np.empty(0, dtype=np.intp)
            return empty, empty
        arr = np.asarray(self.edges, dtype=np.intp)
        return arr[:, 0], arr[:, 1]

    def nonedge_indices(self) -> tuple[np.ndarray, np.ndarray]:
        """Upper-triangular index arrays of the non-edges."""
        iu, ju = np.triu_indices(self.p, k=1)
        adj = self.adjacency()
        mask = ~adj[iu, ju]
        return iu[mask], ju[mask]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and self.p == other.p
            and self._edge_set == other._edge_set
        )

    def __hash__(self) -> int:
        return hash((self.p, self._edge_set))

    def __repr__(self) -> str:
        return f"Graph(p={self.p}, edges={self.edge_count})"


@dataclass(frozen=True)
class EliminationOrdering:
    """A candidate perfect elimination ordering (a vertex permutation)."""

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.order) != list(range(len(self.order))):
            raise InvalidInput("ordering is not a permutation")


def density(g: Graph) -> float:
    """Edge density 2|E| / (p (p-1))."""
    if g.p < 2:
        raise InvalidInput("density needs p >= 2")
    return 2.0 * g.edge_count / (g.p * (g.p - 1))


def gen_erdos_renyi(p: int, edge_prob: float, seed) -> Graph:
    """Each of the p(p-1)/2 possible edges included independently."""
    if not 0.0 <= edge_prob <= 1.0:
        raise InvalidInput(f"edge probability {edge_prob} outside [0, 1]")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(p, k=1)
    keep = rng.random(iu.size) < edge_prob
    return Graph(p, zip(iu[keep], ju[keep]))


def gen_barabasi_albert(p: int, m: int, seed) -> Graph:
    """Preferential attachment from an m-vertex seed clique.

    Every new vertex attaches to m distinct existing vertices sampled
    proportionally to degree, so |E| = m(m-1)/2 + (p-m) m and the graph is
    connected.
    """
    if not 1 <= m < p:
        raise InvalidInput(f"need 1 <= m < p, got m={m}, p={p}")
    rng = np.random.default_rng(seed)
    edges = [(i, j) for i in range(m) for j in range(i + 1, m)]
    # One endpoint entry per incident edge: sampling uniformly from this
    # list is degree-proportional sampling.
    repeated: list[int] = [v for e in edges for v in e]
    for new in range(m, p):
        targets: set[int] = set()
        if not repeated:  # m == 1: single seed vertex, no edges yet
            targets.add(int(rng.integers(new)))
        while len(targets) < m:
            targets.add(repeated[int(rng.integers(len(repeated)))])
        for t in sorted(targets):
            edges.append((t, new))
            repeated.append(t)
            repeated.append(new)
    return Graph(p, edges)


def gen_watts_strogatz(p: int, k: int, beta: float, seed) -> Graph:
    """Ring lattice with k neighbors per vertex, each edge rewired with
    probability beta. |E| stays p k / 2."""
    if k % 2 != 0 or not 0 < k < p:
        raise InvalidInput(f"k must be even with 0 < k < p, got k={k}, p={p}")
    if not 0.0 <= beta <= 1.0:
        raise InvalidInput(f"beta {beta} outside [0, 1]")
    rng = np.random.default_rng(seed)
    edge_set: set[tuple[int, int]] = set()
    for off in range(1, k // 2 + 1):
        for i in range(p):
            j = (i + off) % p
            edge_set.add((min(i, j), max(i, j)))
    degrees = [k] * p
    for off in range(1, k // 2 + 1):
        for i in range(p):
            j = (i + off) % p
            e = (min(i, j), max(i, j))
            if e not in edge_set or rng.random() >= beta:
                continue
            if degrees[i] >= p - 1:
                continue  # no non-neighbor left to rewire to
            while True:
                w = int(rng.integers(p))
                if w != i and (min(i, w), max(i, w)) not in edge_set:
                    break
            edge_set.remove(e)
            degrees[j] -= 1
            edge_set.add((min(i, w), max(i, w)))
            degrees[w] += 1
    return Graph(p, edge_set)


def gen_sbm(block_sizes, prob_matrix, seed) -> Graph:
    """Stochastic block model: edge (i, j) present with probability
    prob_matrix[block(i)][block(j)]."""
    sizes = [int(s) for s in block_sizes]
    if not sizes or any(s < 1 for s in sizes):
        raise InvalidInput("block sizes must be positive")
    probs = np.asarray(prob_matrix, dtype=np.float64)
    nb = len(sizes)
    if probs.shape != (nb, nb):
        raise InvalidInput(
            f"prob_matrix shape {probs.shape} does not match {nb} blocks"
        )
    if not np.array_equal(probs, probs.T):
        raise InvalidInput("prob_matrix must be symmetric")
    if np.any(probs < 0.0) or np.any(probs > 1.0):
        raise InvalidInput("prob_matrix entries must lie in [0, 1]")
    p = sum(sizes)
    labels = np.repeat(np.arange(nb), sizes)
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(p, k=1)
    keep = rng.random(iu.size) < probs[labels[iu], labels[ju]]
    return Graph(p, zip(iu[keep], ju[keep]))


def maximum_cardinality_search(g: Graph) -> tuple[EliminationOrdering, bool]:
    """MCS ordering plus chordality flag.

    Visits vertices by descending count of already-visited neighbors; the
    reversed visit order is a PEO iff the graph is chordal, which is
    verified directly by checking that each vertex's later neighbors form
    a clique.
    """
    p = g.p
    nbrs = g.neighbor_sets()
    weight = [0] * p
    visited = [False] * p
    visit_order: list[int] = []
    for _ in range(p):
        best = -1
        for v in range(p):  # ties broken by smallest label
            if not visited[v] and (best < 0 or weight[v] > weight[best]):
                best = v
        visited[best] = True
        visit_order.append(best)
        for u in nbrs[best]:
            if not visited[u]:
                weight[u] += 1
    order = tuple(reversed(visit_order))
    pos = {v: i for i, v in enumerate(order)}
    is_chordal = True
    for i, v in enumerate(order):
        later = [u for u in nbrs[v] if pos[u] > i]
        for a_idx in range(len(later)):
            for b_idx in range(a_idx + 1, len(later)):
                if later[b_idx] not in nbrs[later[a_idx]]:
                    is_chordal = False
                    break
            if not is_chordal:
                break
        if not is_chordal:
            break
    return EliminationOrdering(order), is_chordal


def triangulate(g: Graph, seed=0) -> Graph:
    """Chordal supergraph via the elimination game with a min-degree
    heuristic; ties broken by the seeded stream. Chordal inputs are
    returned unchanged."""
    _, is_chordal = maximum_cardinality_search(g)
    if is_chordal:
        return g
    rng = np.random.default_rng(seed)
    work = g.neighbor_sets()
    remaining = set(range(g.p))
    fill: set[tuple[int, int]] = set()
    while remaining:
        dmin = min(len(work[v]) for v in remaining)
        candidates = sorted(v for v in remaining if len(work[v]) == dmin)
        v = candidates[int(rng.integers(len(candidates)))]
        nbr = sorted(work[v])
        for a_idx in range(len(nbr)):
            for b_idx in range(a_idx + 1, len(nbr)):
                a, b = nbr[a_idx], nbr[b_idx]
                if b not in work[a]:
                    work[a].add(b)
                    work[b].add(a)
                    fill.add((a, b))
        for u in nbr:
            work[u].discard(v)
        work[v].clear()
        remaining.remove(v)
    return Graph(g.p, set(g.edges) | fill)


def threshold_to_density(c: SymMatrix, d: float) -> Graph:
    """Keep the ceil(d p(p-1)/2) off-diagonal pairs with the largest
    absolute values; ties broken by lexicographic pair order."""
    if not 0.0 < d <= 1.0:
        raise InvalidInput(f"target density {d} outside (0, 1]")
    p = c.p
    iu, ju = np.triu_indices(p, k=1)
    mags = np.abs(c.values[iu, ju])
    k = math.ceil(d * p * (p - 1) / 2)
    order = np.lexsort((ju, iu, -mags))
    keep = order[:k]
    return Graph(p, zip(iu[keep], ju[keep]))


def build_graph(model: str, p: int, d: float, seed, ws_beta: float = 0.3) -> Graph:
    """Build a graph of the given model targeting edge density ``d``.

    Parameter mappings (the literature gives only the target density):
      er:      edge probability d
      ba:      m = ceil(d (p-1) / 2)
      ws:      k = nearest even integer to d (p-1), beta = ws_beta
      sbm:     two equal blocks, within = min(1, 1.4 d), between solved so
               the expected density equals d
      chordal: triangulated ba graph (the fill edges push density above d)
    """
    if model not in GRAPH_MODELS:
        raise InvalidInput(f"unknown graph model {model!r}")
    if not 0.0 < d <= 1.0:
        raise InvalidInput(f"target density {d} outside (0, 1]")
    if model == "er":
        return gen_erdos_renyi(p, d, seed)
    if model == "ba":
        m = min(p - 1, math.ceil(d * (p - 1) / 2))
        return gen_barabasi_albert(p, m, seed)
    if model == "ws":
        k = 2 * int(math.floor(d * (p - 1) / 2 + 0.5))
        k = max(2, min(k, p - 1 if (p - 1) % 2 == 0 else p - 2))
        return gen_watts_strogatz(p, k, ws_beta, seed)
    if model == "sbm":
        n1, n2 = p // 2, p - p // 2
        pairs_total = p * (p - 1) / 2
        pairs_within = n1 * (n1 - 1) / 2 + n2 * (n2 - 1) / 2
        within = min(1.0, 1.4 * d)
        between = (d * pairs_total - within * pairs_within) / (n1 * n2)
        between = min(1.0, max(0.0, between))
        return gen_sbm([n1, n2], [[within, between], [between, within]], seed)
    m = min(p - 1, math.ceil(d * (p - 1) / 2))
    return triangulate(gen_barabasi_albert(p, m, seed), seed)


def read_graph(path) -> Graph:
    """Read the edge-list format: header line ``p=<n>``, then ``i j`` lines."""
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise InvalidInput(f"cannot read graph file {path}: {exc}") from exc
    if not lines or not lines[0].startswith("p="):
        raise InvalidInput(f"graph file {path} missing 'p=<n>' header")
    try:
        p = int(lines[0][2:])
        edges = []
        for ln in lines[1:]:
            i, j = ln.split()
            edges.append((int(i), int(j)))
    except ValueError as exc:
        raise InvalidInput(f"malformed graph file {path}: {exc}") from exc
    return Graph(p, edges)


def write_graph(g: Graph, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"p={g.p}\n")
        for i, j in g.edges:
            fh.write(f"{i} {j}\n")

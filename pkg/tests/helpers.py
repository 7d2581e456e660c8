"""Independent pure-Python oracles used to cross-check the package.

Everything here is deliberately written with dicts, sets, and deques
instead of numpy so that a bug in the array code cannot hide in the
expected values.
"""

from collections import deque
from itertools import combinations
import random


def adjacency(n, edges):
    """Build a dict-of-sets adjacency from an undirected edge list."""
    adj = {v: set() for v in range(n)}
    for e in edges:
        u, v = e[0], e[1]
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    return adj


def bfs_dists(adj, source):
    """Hop distances from source; unreachable nodes are absent."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def ball(adj, source, k):
    """All nodes within k hops of source, source included."""
    return {v for v, d in bfs_dists(adj, source).items() if d <= k}


def power_edges(adj, k):
    """Edge set of the k-th graph power, as sorted (u, v) pairs with u < v."""
    out = set()
    for u in adj:
        for v in ball(adj, u, k):
            if v > u:
                out.add((u, v))
    return sorted(out)


def walk_vector(n, edges, x, k):
    """(A + I)^k x computed by dense repeated multiplication."""
    a = [[0] * n for _ in range(n)]
    for v in range(n):
        a[v][v] = 1
    adj = adjacency(n, edges)
    for u in adj:
        for v in adj[u]:
            a[u][v] = 1
    vec = list(x)
    for _ in range(k):
        vec = [sum(a[u][v] * vec[v] for v in range(n)) for u in range(n)]
    return vec


def sequential_kmis(adj, n, k, rank):
    """Greedy maximal k-independent set: repeatedly take the uncovered
    node of minimum rank and retire its k-hop ball."""
    order = sorted(range(n), key=lambda v: rank[v])
    covered = set()
    chosen = []
    for v in order:
        if v not in covered:
            chosen.append(v)
            covered |= ball(adj, v, k)
    return sorted(chosen)


def is_k_independent(adj, members, k):
    for u, v in combinations(sorted(members), 2):
        if v in ball(adj, u, k):
            return False
    return True


def covers_within_k(adj, n, members, k):
    covered = set()
    for v in members:
        covered |= ball(adj, v, k)
    return len(covered) == n


def brute_mwis(n, edges, x):
    """Exact maximum-weight independent set by subset enumeration.

    Only for tiny n; returns (best_weight, best_set).
    """
    adj = adjacency(n, edges)
    best_w, best_s = 0.0, frozenset()
    for r in range(n + 1):
        for combo in combinations(range(n), r):
            s = set(combo)
            if all(not (adj[u] & s) for u in s):
                w = sum(x[v] for v in s)
                if w > best_w:
                    best_w, best_s = w, frozenset(s)
    return best_w, best_s


def random_edges(rng, n, p):
    """Erdos-Renyi edge list from a random.Random instance."""
    return [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]


def path_edges(n):
    return [(i, i + 1) for i in range(n - 1)]


def cycle_edges(n):
    return path_edges(n) + [(0, n - 1)]


def star_edges(n):
    return [(0, i) for i in range(1, n)]


def king_grid_edges(rows, cols):
    """8-connected grid in row-major node order."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            u = r * cols + c
            for dr, dc in ((0, 1), (1, -1), (1, 0), (1, 1)):
                rr, cc = r + dr, c + dc
                if 0 <= rr < rows and 0 <= cc < cols:
                    edges.append((u, rr * cols + cc))
    return edges


def dyadic_weights(rng, n, denom_bits=4):
    """Strictly positive weights of the form m / 2^b, exact in binary floats."""
    return [rng.randrange(1, 64) / (1 << denom_bits) for _ in range(n)]


def make_rng(*seed):
    return random.Random("/".join(str(s) for s in seed))

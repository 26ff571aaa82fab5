"""Writes one graph6 line per isomorphism class of connected graphs on 2..8 vertices.

Every connected graph on k+1 vertices arises from a connected graph on k
vertices by adding a vertex (delete a non-cut vertex), so the classes are grown
level by level and deduplicated with WL hashes plus exact isomorphism tests.
"""
import sys
from collections import defaultdict
from itertools import combinations

import networkx as nx


def grow(level, k):
    buckets = defaultdict(list)
    for g in level:
        for r in range(1, k + 1):
            for nbrs in combinations(range(k), r):
                h = g.copy()
                h.add_node(k)
                h.add_edges_from((k, u) for u in nbrs)
                key = (h.number_of_edges(), nx.weisfeiler_lehman_graph_hash(h, iterations=3))
                if not any(nx.is_isomorphic(h, o) for o in buckets[key]):
                    buckets[key].append(h)
    return [g for b in buckets.values() for g in b]


def main(path):
    level = [nx.complete_graph(2)]
    out = []
    for k in range(2, 9):
        if k > 2:
            level = grow(level, k - 1)
        print(k, len(level), file=sys.stderr)
        level.sort(key=lambda g: nx.to_graph6_bytes(g, header=False))
        out.extend(level)
    with open(path, "wb") as fh:
        for g in out:
            fh.write(nx.to_graph6_bytes(g, header=False))


if __name__ == "__main__":
    main(sys.argv[1])

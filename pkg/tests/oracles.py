"""Reference implementations used only by the tests, kept independent of the package."""
import itertools
import math

import numpy as np


class UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def uf_components(adj):
    n = len(adj)
    uf = UnionFind(n)
    for i in range(n):
        for j in range(i + 1, n):
            if adj[i][j]:
                uf.union(i, j)
    roots = [uf.find(i) for i in range(n)]
    first = {}
    return [first.setdefault(r, len(first)) for r in roots]


def same_partition(a, b):
    """True when a and b induce the same partition (brute force over pairs)."""
    n = len(a)
    return all((a[i] == a[j]) == (b[i] == b[j]) for i in range(n) for j in range(i + 1, n))


def ari_pairs(a, b):
    """ARI from explicit pair enumeration."""
    n = len(a)
    pairs = list(itertools.combinations(range(n), 2))
    both = sum(1 for i, j in pairs if a[i] == a[j] and b[i] == b[j])
    in_a = sum(1 for i, j in pairs if a[i] == a[j])
    in_b = sum(1 for i, j in pairs if b[i] == b[j])
    expected = in_a * in_b / len(pairs)
    mx = (in_a + in_b) / 2
    return (both - expected) / (mx - expected)


def all_partitions(n, k):
    """Every labeling of n items with labels 0..k-1 in which all k labels occur, canonical form."""
    seen = set()
    for lab in itertools.product(range(k), repeat=n):
        if len(set(lab)) != k:
            continue
        first = {}
        canon = tuple(first.setdefault(c, len(first)) for c in lab)
        if canon not in seen:
            seen.add(canon)
            yield np.array(canon)


def gaussian_pdf_naive(x, mean, cov):
    d = len(mean)
    diff = np.asarray(x) - np.asarray(mean)
    return math.exp(-0.5 * diff @ np.linalg.inv(cov) @ diff) / math.sqrt((2 * math.pi) ** d * np.linalg.det(cov))


def set_partitions(n):
    """All set partitions of range(n) as restricted-growth label arrays."""

    def grow(prefix, top):
        if len(prefix) == n:
            yield np.array(prefix)
            return
        for c in range(top + 2):
            yield from grow(prefix + [c], max(top, c))

    if n == 0:
        return
    yield from grow([0], 0)

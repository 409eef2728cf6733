"""Bit-level combinatorics of the n-dimensional hypercube Q_n.

A vertex is a plain int in [0, 2^n); coordinate i (1-based) of a vertex is
bit (i - 1) of its index, so flipping coordinate i is ``v ^ (1 << (i - 1))``.
Vertex sets are frozensets of ints with the ambient dimension passed
alongside.  Everything here is a pure function of immutable inputs.
"""

from __future__ import annotations

import itertools
from math import comb

from .errors import CapacityError, InputDomainError

MAX_DIM = 30


def check_dim(n: int) -> int:
    if not 1 <= n <= MAX_DIM:
        raise InputDomainError(f"dimension must be in [1, {MAX_DIM}], got {n}")
    return n


def check_vertex(v: int, n: int) -> int:
    check_dim(n)
    if not 0 <= v < (1 << n):
        raise InputDomainError(f"vertex index {v} out of range for dimension {n}")
    return v


def neighbours(v: int, n: int) -> frozenset[int]:
    """All n vertices differing from v in exactly one coordinate."""
    check_vertex(v, n)
    return frozenset(v ^ (1 << i) for i in range(n))


def kth_shell(v: int, k: int, n: int) -> frozenset[int]:
    """Vertices at Hamming distance exactly k from v (empty if k > n)."""
    check_vertex(v, n)
    if k < 0:
        raise InputDomainError(f"shell index must be non-negative, got {k}")
    if k > n:
        return frozenset()
    out = []
    for bits in itertools.combinations(range(n), k):
        m = 0
        for b in bits:
            m |= 1 << b
        out.append(v ^ m)
    return frozenset(out)


def ball(v: int, r: int, n: int) -> frozenset[int]:
    """Vertices at distance at most r from v."""
    check_vertex(v, n)
    if not 0 <= r <= n:
        raise InputDomainError(f"radius must be in [0, {n}], got {r}")
    out: set[int] = set()
    for k in range(r + 1):
        out |= kth_shell(v, k, n)
    return frozenset(out)


def set_neighbourhood(members: frozenset[int] | set[int], n: int) -> frozenset[int]:
    """Union of the neighbourhoods of a nonempty vertex set (may meet it)."""
    if not members:
        raise InputDomainError("set_neighbourhood of the empty set is undefined")
    out: set[int] = set()
    for v in members:
        check_vertex(v, n)
        for i in range(n):
            out.add(v ^ (1 << i))
    return frozenset(out)


def set_shell(members: frozenset[int] | set[int], r: int, n: int) -> frozenset[int]:
    """Vertices whose minimum distance to the set equals exactly r.

    For a single vertex this coincides with :func:`kth_shell`; for sets it is
    the r-th level of a multi-source BFS, which keeps shell sizes consistent
    with the counting arguments built on them (e.g. the shell of a
    neighbourhood at r=2 has size C(n, 3)).
    """
    if not members:
        raise InputDomainError("set_shell of the empty set is undefined")
    if r < 0:
        raise InputDomainError(f"shell index must be non-negative, got {r}")
    seen = set(members)
    for v in seen:
        check_vertex(v, n)
    frontier = set(members)
    if r == 0:
        return frozenset(frontier)
    for _ in range(r):
        nxt: set[int] = set()
        for v in frontier:
            for i in range(n):
                w = v ^ (1 << i)
                if w not in seen:
                    nxt.add(w)
        seen |= nxt
        frontier = nxt
        if not frontier:
            break
    return frozenset(frontier)


def closed_neighbourhood_size(members: frozenset[int] | set[int], n: int) -> int:
    """|A ∪ Γ(A)| for a nonempty set A."""
    return len(set_neighbourhood(members, n) | set(members))


# ---------------------------------------------------------------------------
# Harper order: sort vertices (viewed as subsets of [n]) by size, then by
# the position of the largest element of the symmetric difference.  For equal
# sizes this is exactly numeric order on the bitmask index.
# ---------------------------------------------------------------------------


def harper_key(v: int) -> tuple[int, int]:
    return (v.bit_count(), v)


def harper_compare(a: int, b: int) -> int:
    """-1 if a precedes b in the Harper order, 0 if equal, +1 otherwise."""
    ka, kb = harper_key(a), harper_key(b)
    if ka < kb:
        return -1
    if ka > kb:
        return 1
    return 0


def harper_sorted(n: int) -> list[int]:
    """All 2^n vertices in Harper order."""
    check_dim(n)
    return sorted(range(1 << n), key=harper_key)


def harper_initial_segment(n: int, length: int) -> frozenset[int]:
    """The first ``length`` vertices of Q_n in the Harper order."""
    check_dim(n)
    if not 0 <= length <= (1 << n):
        raise InputDomainError(f"segment length {length} out of range for n={n}")
    return frozenset(harper_sorted(n)[:length])


def vertex_boundary_bound(members: frozenset[int] | set[int], n: int) -> tuple[int, int | None]:
    """(|Γ(A)|, Harper lower bound) for a set A with |A| <= n.

    The lower bound C(n,2) - C(n-|A|,2) is only claimed for |A| <= n; for
    larger sets it is reported as None.
    """
    actual = len(set_neighbourhood(members, n))
    k = len(members)
    if k > n:
        return actual, None
    return actual, comb(n, 2) - comb(n - k, 2)


# ---------------------------------------------------------------------------
# Spread families: pairwise-disjoint subsets of a weight layer whose members
# are pairwise far apart.  A greedy scan in index order is enough here; every
# returned family is verified by the caller's tests, not assumed.
# ---------------------------------------------------------------------------


def weight_layer(n: int, w: int) -> list[int]:
    """All vertices of Hamming weight w, in increasing index order."""
    check_dim(n)
    if not 0 <= w <= n:
        raise InputDomainError(f"weight must be in [0, {n}], got {w}")
    return sorted(kth_shell(0, w, n))


def spread_set_family(
    n: int, weight: int, spread: int, family_count: int, set_size: int
) -> list[frozenset[int]]:
    """Greedily build ``family_count`` disjoint ``spread``-spread sets.

    Each set holds ``set_size`` vertices of the given weight layer, pairwise
    at Hamming distance >= ``spread``.  Raises CapacityError naming the first
    set that could not be filled.
    """
    check_dim(n)
    if family_count < 1 or set_size < 1:
        raise InputDomainError("family_count and set_size must be positive")
    layer = weight_layer(n, weight)
    used: set[int] = set()
    family: list[frozenset[int]] = []
    for idx in range(family_count):
        current: list[int] = []
        for v in layer:
            if v in used:
                continue
            if all((v ^ u).bit_count() >= spread for u in current):
                current.append(v)
                if len(current) == set_size:
                    break
        if len(current) < set_size:
            raise CapacityError(
                f"spread family set {idx} reached only {len(current)}/{set_size} "
                f"vertices (n={n}, weight={weight}, spread={spread})"
            )
        used.update(current)
        family.append(frozenset(current))
    return family


# ---------------------------------------------------------------------------
# Automorphisms of Q_n: every automorphism is a coordinate permutation
# followed by a translation, x -> perm_bits(x) ^ t.
# ---------------------------------------------------------------------------


def permute_bits(x: int, pi: tuple[int, ...] | list[int]) -> int:
    """Send bit i of x to bit pi[i]."""
    y = 0
    for i, target in enumerate(pi):
        if (x >> i) & 1:
            y |= 1 << target
    return y


def automorphism_table(n: int, translation: int, pi: tuple[int, ...] | list[int]) -> list[int]:
    """The full vertex map of the automorphism x -> permute_bits(x, pi) ^ t."""
    check_vertex(translation, n)
    if sorted(pi) != list(range(n)):
        raise InputDomainError(f"{pi} is not a permutation of range({n})")
    return [permute_bits(x, pi) ^ translation for x in range(1 << n)]


def all_automorphism_tables(n: int) -> list[list[int]]:
    """Vertex maps of all 2^n * n! automorphisms (desk scale only)."""
    check_dim(n)
    if n > 5:
        raise InputDomainError("full automorphism enumeration is capped at n=5")
    tables = []
    for pi in itertools.permutations(range(n)):
        base = [permute_bits(x, pi) for x in range(1 << n)]
        for t in range(1 << n):
            tables.append([b ^ t for b in base])
    return tables


def is_automorphism_table(table: list[int], n: int) -> bool:
    """Whether a vertex bijection preserves cube adjacency."""
    size = 1 << n
    if sorted(table) != list(range(size)):
        return False
    for v in range(size):
        for i in range(n):
            if (table[v] ^ table[v ^ (1 << i)]).bit_count() != 1:
                return False
    return True

"""Random colourings of Q_n, their file format, and ball-distance functions.

Colour ids are dense integers 0..q-1.  For two-point distributions colour 0
carries probability p and colour 1 probability 1-p, which fixes the sign
convention used by the neighbourhood statistics in :mod:`cubeshot.probability`.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from .errors import BudgetError, InputDomainError
from .hypercube import check_dim, check_vertex

_MASS_TOL = 1e-12


@dataclass(frozen=True)
class ColourDistribution:
    """A finite colour distribution: two_point(p), uniform(q) or explicit."""

    kind: str
    p: float | None = None
    q: int | None = None
    masses: tuple[float, ...] | None = None

    @classmethod
    def two_point(cls, p: float) -> "ColourDistribution":
        if not 0.0 < p <= 1.0:
            raise InputDomainError(f"two-point probability must be in (0, 1], got {p}")
        return cls(kind="two_point", p=p)

    @classmethod
    def uniform(cls, q: int) -> "ColourDistribution":
        if q < 1:
            raise InputDomainError(f"palette size must be positive, got {q}")
        return cls(kind="uniform", q=q)

    @classmethod
    def explicit(cls, masses: Iterable[float]) -> "ColourDistribution":
        m = tuple(float(x) for x in masses)
        if not m:
            raise InputDomainError("explicit distribution needs at least one mass")
        if any(x < 0 for x in m):
            raise InputDomainError("masses must be non-negative")
        if abs(sum(m) - 1.0) > _MASS_TOL:
            raise InputDomainError(f"masses sum to {sum(m)}, not 1")
        return cls(kind="explicit", masses=m)

    @property
    def palette(self) -> int:
        if self.kind == "two_point":
            return 2
        if self.kind == "uniform":
            assert self.q is not None
            return self.q
        assert self.masses is not None
        return len(self.masses)


@dataclass(frozen=True)
class Seed:
    """Master seed; trial i draws from a sub-stream keyed by (master, i)."""

    master: int

    def rng(self, trial: int = 0) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.master, spawn_key=(trial,))
        return np.random.default_rng(ss)


@dataclass(eq=False)
class Colouring:
    """A total colour map on the 2^n vertices, stored in index order."""

    n: int
    q: int
    colours: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        check_dim(self.n)
        self.colours = np.asarray(self.colours, dtype=np.int64)
        if self.colours.shape != (1 << self.n,):
            raise InputDomainError(
                f"colouring for n={self.n} needs {1 << self.n} entries, "
                f"got shape {self.colours.shape}"
            )
        if self.q < 1:
            raise InputDomainError(f"palette size must be positive, got {self.q}")
        if self.colours.size and (self.colours.min() < 0 or self.colours.max() >= self.q):
            raise InputDomainError("colour id out of palette range")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Colouring):
            return NotImplemented
        return self.n == other.n and self.q == other.q and bool(
            np.array_equal(self.colours, other.colours)
        )

    def colour_counts(self) -> Counter:
        return Counter(self.colours.tolist())


def sample_colouring(n: int, dist: ColourDistribution, seed: Seed, trial: int = 0) -> Colouring:
    """Draw 2^n independent colours; bit-reproducible given (n, dist, seed, trial)."""
    check_dim(n)
    rng = seed.rng(trial)
    size = 1 << n
    if dist.kind == "two_point":
        cols = (rng.random(size) >= dist.p).astype(np.int64)
    elif dist.kind == "uniform":
        cols = rng.integers(0, dist.q, size=size, dtype=np.int64)
    else:
        cols = rng.choice(len(dist.masses), size=size, p=np.asarray(dist.masses))
    return Colouring(n=n, q=dist.palette, colours=cols)


def raw_distance(chi: Colouring, lam: Colouring) -> int:
    """Number of vertices on which the two colourings disagree."""
    if chi.n != lam.n:
        raise InputDomainError(f"dimension mismatch: {chi.n} vs {lam.n}")
    return int(np.count_nonzero(chi.colours != lam.colours))


def apply_vertex_map(chi: Colouring, table: list[int]) -> Colouring:
    """The colouring chi_f with chi_f(f(v)) = chi(v) for the bijection table f."""
    size = 1 << chi.n
    if sorted(table) != list(range(size)):
        raise InputDomainError("vertex map is not a permutation of the cube")
    out = np.empty(size, dtype=np.int64)
    out[np.asarray(table)] = chi.colours
    return Colouring(n=chi.n, q=chi.q, colours=out)


def coarsen(chi: Colouring, partition: dict[int, int]) -> Colouring:
    """Merge colours through a total map palette -> {0, 1}."""
    missing = [c for c in range(chi.q) if c not in partition]
    if missing:
        raise InputDomainError(f"partition is missing colours {missing[:5]}")
    bad = [c for c, side in partition.items() if side not in (0, 1)]
    if bad:
        raise InputDomainError(f"partition values must be 0 or 1, got {partition[bad[0]]}")
    lut = np.array([partition[c] for c in range(chi.q)], dtype=np.int64)
    return Colouring(n=chi.n, q=2, colours=lut[chi.colours])


# ---------------------------------------------------------------------------
# Ball distances: minimum number of colour disagreements over centred ball
# isomorphisms.  For n >= 2 the centre of a ball is its unique degree-n
# vertex, so isomorphisms are induced by coordinate permutations.
# ---------------------------------------------------------------------------


def _shell1_colours(chi: Colouring, v: int) -> list[int]:
    return [int(chi.colours[v ^ (1 << i)]) for i in range(chi.n)]


def _multiset_mismatch(a: list[int], b: list[int]) -> int:
    """min over bijections of mismatches between two equal-length lists."""
    ca, cb = Counter(a), Counter(b)
    common = sum(min(ca[c], cb.get(c, 0)) for c in ca)
    return len(a) - common


def ball_distance_r1(chi: Colouring, u: int, v: int) -> int:
    """Exact distance between the coloured 1-balls around u and v.

    Equals centre mismatch plus the multiset mismatch of neighbour colours,
    which is exactly the minimum over all neighbour bijections.
    """
    check_vertex(u, chi.n)
    check_vertex(v, chi.n)
    if chi.n < 2:
        raise InputDomainError("1-ball distance needs n >= 2 (centre must be degree-determined)")
    centre = int(chi.colours[u] != chi.colours[v])
    return centre + _multiset_mismatch(_shell1_colours(chi, u), _shell1_colours(chi, v))


def _pair_colour_matrix(chi: Colouring, v: int) -> list[list[int]]:
    n = chi.n
    mat = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            c = int(chi.colours[v ^ (1 << i) ^ (1 << j)])
            mat[i][j] = c
            mat[j][i] = c
    return mat


def _colour_degree_profiles(shell1: list[int], pairs: list[list[int]], q: int) -> list[Counter]:
    n = len(shell1)
    profs = []
    for i in range(n):
        cnt: Counter = Counter()
        for j in range(n):
            if j != i:
                cnt[pairs[i][j]] += 1
        profs.append(cnt)
    return profs


def _r2_exact(
    su: list[int], pu: list[list[int]], sv: list[int], pv: list[list[int]], n: int
) -> int:
    """Branch-and-bound minimum of shell mismatches over coordinate maps."""
    best = [n + n * (n - 1) // 2 + 1]

    def rec(level: int, used: int, images: list[int], cost: int) -> None:
        if cost >= best[0]:
            return
        if level == n:
            best[0] = cost
            return
        for a in range(n):
            if used & (1 << a):
                continue
            c = cost + (su[level] != sv[a])
            for k in range(level):
                if pu[level][k] != pv[a][images[k]]:
                    c += 1
            if c < best[0]:
                images.append(a)
                rec(level + 1, used | (1 << a), images, c)
                images.pop()

    rec(0, 0, [], 0)
    return best[0]


def ball_distance_r2(chi: Colouring, u: int, v: int, mode: str = "exact") -> int:
    """Distance between the coloured 2-balls around u and v.

    ``exact`` minimises mismatches over all coordinate permutations (n <= 8);
    ``lower_bound`` combines the centre mismatch, the shell-1 multiset bound
    and a pair-degree-profile assignment bound, and never exceeds the exact
    value.
    """
    check_vertex(u, chi.n)
    check_vertex(v, chi.n)
    if mode not in ("exact", "lower_bound"):
        raise InputDomainError(f"unknown mode {mode!r}")
    n = chi.n
    if u == v:
        return 0
    centre = int(chi.colours[u] != chi.colours[v])
    su, sv = _shell1_colours(chi, u), _shell1_colours(chi, v)
    pu, pv = _pair_colour_matrix(chi, u), _pair_colour_matrix(chi, v)

    if mode == "exact":
        if n > 8:
            raise BudgetError(f"exact 2-ball distance is capped at n=8, got n={n}")
        return centre + _r2_exact(su, pu, sv, pv, n)

    # Shell-wise multiset bound.
    s1 = _multiset_mismatch(su, sv)
    flat_u = [pu[i][j] for i in range(n) for j in range(i + 1, n)]
    flat_v = [pv[i][j] for i in range(n) for j in range(i + 1, n)]
    s2 = _multiset_mismatch(flat_u, flat_v)

    # Assignment bound: a mismatched shell-2 pair perturbs the colour-degree
    # profile of each endpoint by at most 2 in L1, so half the per-coordinate
    # profile gap, halved again for double counting, lower-bounds the
    # mismatch count under any fixed coordinate map.
    from scipy.optimize import linear_sum_assignment

    du = _colour_degree_profiles(su, pu, chi.q)
    dv = _colour_degree_profiles(sv, pv, chi.q)
    cost = np.zeros((n, n))
    for i in range(n):
        for a in range(n):
            l1 = sum(abs(du[i][c] - dv[a][c]) for c in set(du[i]) | set(dv[a]))
            cost[i, a] = (su[i] != sv[a]) + 0.25 * l1
    rows, cols = linear_sum_assignment(cost)
    assign = float(cost[rows, cols].sum())
    bound = max(int(np.ceil(assign - 1e-9)), s1 + s2)
    return centre + bound


def ball_distance_r2_bruteforce(chi: Colouring, u: int, v: int) -> int:
    """Unpruned permutation minimum; test oracle for the exact mode."""
    n = chi.n
    if n > 8:
        raise BudgetError("brute-force oracle capped at n=8")
    centre = int(chi.colours[u] != chi.colours[v])
    su, sv = _shell1_colours(chi, u), _shell1_colours(chi, v)
    pu, pv = _pair_colour_matrix(chi, u), _pair_colour_matrix(chi, v)
    best = None
    for pi in itertools.permutations(range(n)):
        c = sum(su[i] != sv[pi[i]] for i in range(n))
        c += sum(
            pu[i][j] != pv[pi[i]][pi[j]] for i in range(n) for j in range(i + 1, n)
        )
        if best is None or c < best:
            best = c
    return centre + best


# ---------------------------------------------------------------------------
# File format: line 1 "cube <n> <q>", line 2 the 2^n colour ids in vertex
# index order.  Round trips are required to be bit-exact.
# ---------------------------------------------------------------------------


def write_colouring(chi: Colouring, fh: IO[str]) -> None:
    fh.write(f"cube {chi.n} {chi.q}\n")
    fh.write(" ".join(str(int(c)) for c in chi.colours))
    fh.write("\n")


def read_colouring(fh: IO[str]) -> Colouring:
    header = fh.readline().split()
    if len(header) != 3 or header[0] != "cube":
        raise InputDomainError("colouring file must start with 'cube <n> <q>'")
    n, q = int(header[1]), int(header[2])
    tokens = fh.read().split()
    if len(tokens) != (1 << n):
        raise InputDomainError(
            f"colouring file for n={n} needs {1 << n} entries, got {len(tokens)}"
        )
    return Colouring(n=n, q=q, colours=np.array([int(t) for t in tokens], dtype=np.int64))

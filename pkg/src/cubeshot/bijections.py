"""Structural machinery for bijections of the cube.

Covers the classifier chain used to pin down when a vertex bijection must
already be close to an automorphism: clustering of neighbourhood images,
approximately-local duals, diagonal/self-dual flags, stability witnesses
for near-minimal boundaries, rigid layers of a spanning subgraph, and the
edge set on which a bijection and its dual act like an automorphism pair.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import comb, e
from typing import IO

from .canon import _canonical_tuple, _encode, _offsets
from .colouring import Colouring, apply_vertex_map, ball_distance_r2
from .errors import InputDomainError
from .hypercube import check_dim, check_vertex, set_shell


@dataclass(eq=False)
class BijectionTable:
    """A permutation of V(Q_n) with its cached inverse."""

    n: int
    forward: list[int]

    def __post_init__(self) -> None:
        check_dim(self.n)
        if sorted(self.forward) != list(range(1 << self.n)):
            raise InputDomainError("forward table is not a permutation of the cube")

    @cached_property
    def inverse(self) -> list[int]:
        inv = [0] * (1 << self.n)
        for x, y in enumerate(self.forward):
            inv[y] = x
        return inv

    def __call__(self, v: int) -> int:
        return self.forward[v]


def identity_map(n: int) -> BijectionTable:
    return BijectionTable(n=n, forward=list(range(1 << n)))


def odd_antipodal_map(n: int) -> BijectionTable:
    """Fix even-weight vertices; send odd-weight vertices to the antipode.

    Needs n even so the odd layer is preserved.  This is approximately local
    with zero defect without being an automorphism.
    """
    if n % 2:
        raise InputDomainError("the odd-antipodal map is a bijection only for even n")
    full = (1 << n) - 1
    fwd = [v if v.bit_count() % 2 == 0 else v ^ full for v in range(1 << n)]
    return BijectionTable(n=n, forward=fwd)


def from_automorphism(n: int, table: list[int]) -> BijectionTable:
    return BijectionTable(n=n, forward=list(table))


def conjugate(f: BijectionTable, table: list[int]) -> BijectionTable:
    """sigma o f o sigma^{-1} for an automorphism given as a vertex table."""
    inv = [0] * len(table)
    for x, y in enumerate(table):
        inv[y] = x
    fwd = [table[f.forward[inv[x]]] for x in range(1 << f.n)]
    return BijectionTable(n=f.n, forward=fwd)


def write_bijection(f: BijectionTable, fh: IO[str]) -> None:
    fh.write(f"bij {f.n}\n")
    fh.write(" ".join(str(x) for x in f.forward))
    fh.write("\n")


def read_bijection(fh: IO[str]) -> BijectionTable:
    header = fh.readline().split()
    if len(header) != 2 or header[0] != "bij":
        raise InputDomainError("bijection file must start with 'bij <n>'")
    n = int(header[1])
    values = [int(t) for t in fh.read().split()]
    if len(values) != (1 << n):
        raise InputDomainError(f"bijection file for n={n} needs {1 << n} entries")
    return BijectionTable(n=n, forward=values)


# ---------------------------------------------------------------------------
# Cluster membership: how spread out are images of neighbourhoods
# ---------------------------------------------------------------------------


@dataclass
class ClusterResult:
    member: bool
    violator: int | None
    max_shell_size: int


def cluster_membership(f: BijectionTable, r: int, slack: int) -> ClusterResult:
    """Check |Gamma^r(f(Gamma(v)))| <= C(n, r+1) + slack at every centre."""
    if r not in (1, 2):
        raise InputDomainError(f"cluster radius must be 1 or 2, got {r}")
    n = f.n
    limit = comb(n, r + 1) + slack
    worst = 0
    violator = None
    for v in range(1 << n):
        image = frozenset(f.forward[v ^ (1 << i)] for i in range(n))
        size = len(set_shell(image, r, n))
        worst = max(worst, size)
        if size > limit and violator is None:
            violator = v
    return ClusterResult(member=violator is None, violator=violator, max_shell_size=worst)


# ---------------------------------------------------------------------------
# Duals of approximately-local bijections
# ---------------------------------------------------------------------------


@dataclass
class DualMap:
    """Per-vertex argmax of |f(Gamma(v)) ∩ Gamma(w)| with its defects."""

    n: int
    mapping: list[int]
    defect: list[int]
    tied: list[bool] = field(repr=False)

    @property
    def max_defect(self) -> int:
        return max(self.defect)

    @property
    def unique(self) -> bool:
        # Two distinct neighbourhoods share at most 2 vertices, so once the
        # best overlap exceeds n/2 no second vertex can match it.
        return self.max_defect < self.n / 2

    def is_local(self, slack: int) -> bool:
        return self.max_defect <= slack

    def is_bijective(self) -> bool:
        return sorted(self.mapping) == list(range(1 << self.n))


def _dual_of_map(n: int, image_of: list[list[int]]) -> DualMap:
    """Dual of an arbitrary vertex map given neighbourhood images as sets."""
    mapping = [0] * (1 << n)
    defect = [0] * (1 << n)
    tied = [False] * (1 << n)
    for v in range(1 << n):
        score: dict[int, int] = {}
        for a in image_of[v]:
            for i in range(n):
                w = a ^ (1 << i)
                score[w] = score.get(w, 0) + 1
        best_w, best_s = None, -1
        tie = False
        for w, sc in score.items():
            if sc > best_s or (sc == best_s and w < best_w):
                if sc == best_s:
                    tie = True
                else:
                    tie = False
                best_w, best_s = w, sc
            elif sc == best_s:
                tie = True
        mapping[v] = best_w
        defect[v] = n - best_s
        tied[v] = tie
    return DualMap(n=n, mapping=mapping, defect=defect, tied=tied)


def compute_dual(f: BijectionTable) -> DualMap:
    """The dual map of f: for each v the vertex whose neighbourhood best
    matches f(Gamma(v)), found exhaustively over neighbours of the image."""
    n = f.n
    image_of = [
        list({f.forward[v ^ (1 << i)] for i in range(n)}) for v in range(1 << n)
    ]
    return _dual_of_map(n, image_of)


def dual_of_dual(f: BijectionTable, g: DualMap) -> DualMap:
    """The dual of the (possibly non-bijective) dual map g."""
    n = f.n
    image_of = [
        list({g.mapping[v ^ (1 << i)] for i in range(n)}) for v in range(1 << n)
    ]
    return _dual_of_map(n, image_of)


@dataclass
class MonoResult:
    cluster_member: bool
    member: bool
    violator: tuple[int, int, int] | None


def mono_membership(f: BijectionTable, slack: int, threshold: int) -> MonoResult:
    """At most one vertex w may see more than ``threshold`` of each image.

    Requires f in Cluster^1_slack first; that check is part of the verdict.
    """
    n = f.n
    cluster = cluster_membership(f, 1, slack)
    if not cluster.member:
        return MonoResult(cluster_member=False, member=False, violator=None)
    for v in range(1 << n):
        image = {f.forward[v ^ (1 << i)] for i in range(n)}
        score: dict[int, int] = {}
        for a in image:
            for i in range(n):
                w = a ^ (1 << i)
                score[w] = score.get(w, 0) + 1
        heavy = sorted(w for w, sc in score.items() if sc > threshold)
        if len(heavy) > 1:
            return MonoResult(cluster_member=True, member=False, violator=(v, heavy[0], heavy[1]))
    return MonoResult(cluster_member=True, member=True, violator=None)


@dataclass
class DualityFlags:
    is_diagonal: bool | None
    is_self_dual: bool | None
    indeterminate_witness: int | None


def diagonal_and_self(f: BijectionTable) -> DualityFlags:
    """Whether f equals the dual of its dual, and whether it is its own dual."""
    g = compute_dual(f)
    if not g.unique or any(g.tied):
        witness = next((v for v in range(1 << f.n) if g.tied[v]), None)
        return DualityFlags(is_diagonal=None, is_self_dual=None, indeterminate_witness=witness)
    h = dual_of_dual(f, g)
    if not h.unique or any(h.tied):
        witness = next((v for v in range(1 << f.n) if h.tied[v]), None)
        return DualityFlags(is_diagonal=None, is_self_dual=None, indeterminate_witness=witness)
    return DualityFlags(
        is_diagonal=h.mapping == f.forward,
        is_self_dual=g.mapping == f.forward,
        indeterminate_witness=None,
    )


@dataclass
class InverseDualResult:
    status: str  # "pass" | "fail" | "hypothesis_failure"
    counterexample: int | None = None
    note: str = ""


def inverse_dual_check(f: BijectionTable, slack: int) -> InverseDualResult:
    """Verify that g^{-1} witnesses f^{-1} being slack-approximately local."""
    n = f.n
    g = compute_dual(f)
    if not g.is_local(slack):
        return InverseDualResult(
            status="hypothesis_failure", note=f"f has defect {g.max_defect} > {slack}"
        )
    if not g.is_bijective():
        return InverseDualResult(status="hypothesis_failure", note="dual is not bijective")
    g_inv = [0] * (1 << n)
    for x, y in enumerate(g.mapping):
        g_inv[y] = x
    inv = f.inverse
    for v in range(1 << n):
        image = {inv[v ^ (1 << i)] for i in range(n)}
        target = g_inv[v]
        overlap = sum(1 for i in range(n) if (target ^ (1 << i)) in image)
        if overlap < n - slack:
            return InverseDualResult(status="fail", counterexample=v)
    return InverseDualResult(status="pass")


def dual_locality_measure(f: BijectionTable) -> int:
    """Max defect of the dual of f, measured through the dual chain."""
    g = compute_dual(f)
    gg = dual_of_dual(f, g)
    return gg.max_defect


# ---------------------------------------------------------------------------
# Stability of near-minimal boundaries
# ---------------------------------------------------------------------------


def stability_witness(members: frozenset[int] | set[int], n: int) -> tuple[int, int]:
    """The vertex whose neighbourhood meets A the most, with the overlap.

    Exhaustive: every vertex with positive overlap neighbours a point of A,
    so scoring Gamma(A) finds the exact argmax.  Ties break to the smallest
    index.
    """
    if not members:
        raise InputDomainError("stability witness of the empty set is undefined")
    score: dict[int, int] = {}
    for a in members:
        check_vertex(a, n)
        for i in range(n):
            w = a ^ (1 << i)
            score[w] = score.get(w, 0) + 1
    best = min(sorted(score), key=lambda w: (-score[w], w))
    return best, score[best]


def stability_witness_bruteforce(members, n: int) -> tuple[int, int]:
    """Unpruned argmax over all 2^n candidates; test oracle."""
    best_w, best_s = 0, -1
    mem = set(members)
    for w in range(1 << n):
        s = sum(1 for i in range(n) if (w ^ (1 << i)) in mem)
        if s > best_s:
            best_w, best_s = w, s
    return best_w, best_s


@dataclass
class TwoClusterResult:
    status: str  # "holds" | "fails" | "hypothesis_failure"
    witness: int | None = None
    overlap: int | None = None
    required: float | None = None
    margin: float | None = None
    note: str = ""


def two_cluster_stability(members, n: int, slack: float, threshold: float) -> TwoClusterResult:
    """Single-cluster conclusion for near-minimal boundaries.

    Hypotheses: |A| = n, |Gamma(A)| <= C(n,2) + slack*n, no two distinct
    vertices each seeing more than ``threshold`` points of A, and a
    non-negative radicand.  Conclusion: the best witness has overlap at
    least n * sqrt(1 - 2*slack/n - 14*sqrt(threshold/n)).
    """
    members = set(members)
    if len(members) != n:
        raise InputDomainError(f"two-cluster stability needs |A| = n = {n}, got {len(members)}")
    from .hypercube import set_neighbourhood

    boundary = len(set_neighbourhood(members, n))
    if boundary > comb(n, 2) + slack * n:
        return TwoClusterResult(
            status="hypothesis_failure",
            note=f"boundary {boundary} exceeds C(n,2) + slack*n = {comb(n, 2) + slack * n:.1f}",
        )
    score: dict[int, int] = {}
    for a in members:
        for i in range(n):
            w = a ^ (1 << i)
            score[w] = score.get(w, 0) + 1
    heavy = sorted(w for w, sc in score.items() if sc > threshold)
    if len(heavy) > 1:
        return TwoClusterResult(
            status="hypothesis_failure",
            note=f"two clusters: vertices {heavy[0]} and {heavy[1]} both exceed {threshold}",
        )
    radicand = 1.0 - 2.0 * slack / n - 14.0 * (threshold / n) ** 0.5
    if radicand < 0:
        return TwoClusterResult(status="hypothesis_failure", note="radicand negative, bound vacuous")
    witness, overlap = stability_witness(members, n)
    required = n * radicand**0.5
    margin = overlap - required
    return TwoClusterResult(
        status="holds" if overlap >= required else "fails",
        witness=witness,
        overlap=overlap,
        required=required,
        margin=margin,
    )


@dataclass
class HarperCheckResult:
    status: str  # "pass" | "fail" | "not_applicable"
    size: int
    size_limit: float | None = None
    boundary: int | None = None


def corollary_harper_check(members, r: int, slack: float, n: int) -> HarperCheckResult:
    """Small boundary at level r forces small size at level r-1.

    Applicable when |Gamma(A)| <= C(n,r) + n^{r-1}*slack; then |A| must be
    at most C(n,r-1) + 2(r+2) * n^{r-2} * slack.
    """
    if r < 2:
        raise InputDomainError(f"the corollary needs r >= 2, got {r}")
    from .hypercube import set_neighbourhood

    members = set(members)
    boundary = len(set_neighbourhood(members, n))
    if boundary > comb(n, r) + n ** (r - 1) * slack:
        return HarperCheckResult(status="not_applicable", size=len(members), boundary=boundary)
    limit = comb(n, r - 1) + 2 * (r + 2) * n ** (r - 2) * slack
    return HarperCheckResult(
        status="pass" if len(members) <= limit else "fail",
        size=len(members),
        size_limit=limit,
        boundary=boundary,
    )


# ---------------------------------------------------------------------------
# Invariant edges and rigid layers
# ---------------------------------------------------------------------------


def invariant_edge_graph(f: BijectionTable, g: DualMap) -> tuple[list[int], int]:
    """Adjacency bitmasks of the edge set on which (f, dual) respect adjacency.

    An edge uv survives when both f(u)g(v) and f(v)g(u) are cube edges;
    returns the per-vertex incidence bitmasks and the minimum degree.
    """
    n = f.n
    adj = [0] * (1 << n)
    for u in range(1 << n):
        for i in range(n):
            v = u ^ (1 << i)
            if u > v:
                continue
            if (f.forward[u] ^ g.mapping[v]).bit_count() == 1 and (
                f.forward[v] ^ g.mapping[u]
            ).bit_count() == 1:
                adj[u] |= 1 << i
                adj[v] |= 1 << i
    min_deg = min(a.bit_count() for a in adj)
    return adj, min_deg


@dataclass
class RigidLayers:
    base: int
    layers: list[frozenset[int]]


def rigid_layers(g_adj: list[int], base: int, k_max: int, n: int) -> RigidLayers:
    """Layers of vertices all of whose downward cube edges survive in G.

    G is a spanning subgraph given as per-vertex incidence bitmasks; layer i
    keeps the distance-i vertices whose every neighbour one step closer to
    the base is reachable through G and itself rigid.
    """
    check_vertex(base, n)
    if len(g_adj) != (1 << n):
        raise InputDomainError("subgraph must cover all cube vertices")
    layers = [frozenset([base])]
    for i in range(1, min(k_max, n) + 1):
        prev = layers[i - 1]
        current = set()
        for w in _shell_masks(base, i, n):
            diff = w ^ base
            ok = True
            for b in range(n):
                if not (diff >> b) & 1:
                    continue
                down = w ^ (1 << b)
                if down not in prev or not (g_adj[w] >> b) & 1:
                    ok = False
                    break
            if ok:
                current.add(w)
        layers.append(frozenset(current))
    return RigidLayers(base=base, layers=layers)


def _shell_masks(base: int, k: int, n: int):
    for bits in itertools.combinations(range(n), k):
        m = 0
        for b in bits:
            m |= 1 << b
        yield base ^ m


def rigid_layers_by_paths(g_adj: list[int], base: int, k_max: int, n: int) -> RigidLayers:
    """Equivalent characterisation: all shortest base-w paths survive in G."""
    layers = [frozenset([base])]
    for i in range(1, min(k_max, n) + 1):
        current = set()
        for w in _shell_masks(base, i, n):
            diff = w ^ base
            ok = True
            # Every edge of the interval subcube between base and w.
            sub_bits = [b for b in range(n) if (diff >> b) & 1]
            for pick in range(1 << len(sub_bits)):
                z = base
                for idx, b in enumerate(sub_bits):
                    if (pick >> idx) & 1:
                        z ^= 1 << b
                for idx, b in enumerate(sub_bits):
                    if not (pick >> idx) & 1:
                        if not (g_adj[z] >> b) & 1:
                            ok = False
                            break
                if not ok:
                    break
            if ok:
                current.add(w)
        layers.append(frozenset(current))
    return RigidLayers(base=base, layers=layers)


def rigid_layer_lower_bound(n: int, k: int, slack: float) -> float:
    """C(n,k) - e * n^{k-1} * slack."""
    return comb(n, k) - e * n ** (k - 1) * slack


# ---------------------------------------------------------------------------
# Membership in the signature-preserving class, and the drift measurement
# ---------------------------------------------------------------------------


@dataclass
class IsomResult:
    member: bool
    violator: int | None


def isom_membership(chi: Colouring, f: BijectionTable, r: int) -> IsomResult:
    """Whether sig(chi, v, r) == sig(chi_f, f(v), r) at every vertex."""
    if chi.n != f.n:
        raise InputDomainError("colouring and bijection dimensions differ")
    n = chi.n
    chif = apply_vertex_map(chi, f.forward)
    cache: dict = {}
    offs = _offsets(n, r)

    def sig(c: Colouring, v: int) -> bytes:
        cols = c.colours
        key = tuple(int(cols[v ^ m]) for m in offs)
        data = cache.get(key)
        if data is None:
            s = [int(cols[v ^ (1 << i)]) for i in range(n)]
            P = T = None
            if r >= 2:
                P = [[0] * n for _ in range(n)]
                for i in range(n):
                    for j in range(i + 1, n):
                        cc = int(cols[v ^ (1 << i) ^ (1 << j)])
                        P[i][j] = cc
                        P[j][i] = cc
            if r >= 3:
                T = [[[0] * n for _ in range(n)] for _ in range(n)]
                for i in range(n):
                    for j in range(i + 1, n):
                        for k in range(j + 1, n):
                            cc = int(cols[v ^ (1 << i) ^ (1 << j) ^ (1 << k)])
                            T[i][j][k] = T[i][k][j] = cc
                            T[j][i][k] = T[j][k][i] = cc
                            T[k][i][j] = T[k][j][i] = cc
            data = _encode(r, n, _canonical_tuple(n, r, int(cols[v]), s, P, T))
            cache[key] = data
        return data

    for v in range(1 << n):
        if sig(chi, v) != sig(chif, f.forward[v]):
            return IsomResult(member=False, violator=v)
    return IsomResult(member=True, violator=None)


@dataclass
class DriftResult:
    status: str  # "ok" | "hypothesis_failure" | "indeterminate"
    drift: int | None = None
    target: int | None = None
    note: str = ""


def local_equiv_drift(chi: Colouring, f: BijectionTable, v: int) -> DriftResult:
    """2-ball distance between v and the dual-chain pullback of f(v).

    Requires f to preserve all 2-ball signatures of chi (checked); reports a
    hypothesis failure otherwise.
    """
    check_vertex(v, chi.n)
    membership = isom_membership(chi, f, 2)
    if not membership.member:
        return DriftResult(
            status="hypothesis_failure",
            note=f"f does not preserve 2-ball signatures (violator {membership.violator})",
        )
    g = compute_dual(f)
    if not g.unique or any(g.tied):
        return DriftResult(status="indeterminate", note="dual of f is not unique")
    h = dual_of_dual(f, g)
    if not h.unique or any(h.tied):
        return DriftResult(status="indeterminate", note="second dual is not unique")
    target_image = f.forward[v]
    preimages = [x for x in range(1 << chi.n) if h.mapping[x] == target_image]
    if len(preimages) != 1:
        return DriftResult(status="indeterminate", note="second dual is not invertible at f(v)")
    target = preimages[0]
    drift = ball_distance_r2(chi, v, target, mode="exact")
    return DriftResult(status="ok", drift=drift, target=target)


# ---------------------------------------------------------------------------
# Classification report for the CLI
# ---------------------------------------------------------------------------


def classification_report(f: BijectionTable, slack: int, threshold: int) -> list[tuple[str, str]]:
    from .hypercube import is_automorphism_table

    n = f.n
    g = compute_dual(f)
    lines: list[tuple[str, str]] = [("n", str(n))]
    lines.append(("max_defect", str(g.max_defect)))
    lines.append(("local_member", str(g.is_local(slack)).lower()))
    lines.append(("dual_unique", str(g.unique and not any(g.tied)).lower()))
    lines.append(("dual_bijective", str(g.is_bijective()).lower()))
    for r in (1, 2):
        cluster = cluster_membership(f, r, slack)
        lines.append((f"cluster{r}_member", str(cluster.member).lower()))
        lines.append((f"cluster{r}_max_shell", str(cluster.max_shell_size)))
    mono = mono_membership(f, slack, threshold)
    lines.append(("mono_member", str(mono.member).lower()))
    flags = diagonal_and_self(f)
    lines.append(("diagonal", str(flags.is_diagonal).lower()))
    lines.append(("self_dual", str(flags.is_self_dual).lower()))
    lines.append(("automorphism", str(is_automorphism_table(f.forward, n)).lower()))
    if g.is_bijective():
        _, min_deg = invariant_edge_graph(f, g)
        lines.append(("invariant_edge_min_degree", str(min_deg)))
    return lines

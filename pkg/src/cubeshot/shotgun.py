"""Reconstruction of colourings from ball multisets.

The radius-3 reconstructor exploits the fact that the 2-ball of every
neighbour of v sits inside the 3-ball of v: when the 2-ball signatures of
all vertices are pairwise distinct they act as vertex identities, the input
multiset determines a coloured adjacency structure on those identities, and
labelling that structure layer by layer from an anchor recovers the
colouring.  When the uniqueness precondition fails, a backtracking
assembler over explicit ball placements (shared with the radius-2
reconstructor) is tried instead.

Output is identified up to cube automorphism only; recovering vertex labels
is impossible in principle.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

import numpy as np

from .canon import (
    BallMultiset,
    centre_r2_signature,
    decode_signature,
    extract_multiset,
    neighbour_r2_signature,
)
from .colouring import Colouring, apply_vertex_map
from .errors import BudgetError, InputDomainError
from .hypercube import all_automorphism_tables, check_dim

DEFAULT_ASSEMBLY_BUDGET = 2_000_000

EQUIVALENT = "equivalent"
INEQUIVALENT = "inequivalent"
UNKNOWN = "unknown"


@dataclass
class ReconstructionResult:
    status: str  # "success" | "ambiguous" | "failed"
    colouring: Colouring | None
    placements_tried: int
    log: list[str] = field(default_factory=list)
    collision: tuple[bytes, bytes] | None = None


def _monochromatic_result(ms: BallMultiset) -> ReconstructionResult | None:
    """Immediate success when the multiset is a single constant ball type."""
    if len(ms.entries) != 1:
        return None
    (data,) = ms.entries
    r, n, c0, s, P, T = decode_signature(
        next(iter(_sig_objects(ms)))
    )
    values = set(s) | {c0}
    if P is not None:
        values |= {P[i][j] for i in range(n) for j in range(i + 1, n)}
    if T is not None:
        values |= {
            T[i][j][k]
            for i in range(n)
            for j in range(i + 1, n)
            for k in range(j + 1, n)
        }
    if len(values) != 1:
        return None
    colour = values.pop()
    cols = np.full(1 << ms.n, colour, dtype=np.int64)
    chi = Colouring(n=ms.n, q=ms.q, colours=cols)
    return ReconstructionResult(
        status="success",
        colouring=chi,
        placements_tried=0,
        log=["step 0 place 0 sig %s alternatives 1" % data.hex()],
    )


def _sig_objects(ms: BallMultiset):
    return ms.signatures()


# ---------------------------------------------------------------------------
# Radius-3 fast path
# ---------------------------------------------------------------------------


def reconstruct_r3(
    ms: BallMultiset, assembler_budget: int = DEFAULT_ASSEMBLY_BUDGET
) -> ReconstructionResult:
    """Reconstruct a colouring from its multiset of coloured 3-balls."""
    if ms.r != 3:
        raise InputDomainError(f"reconstruct_r3 needs a radius-3 multiset, got r={ms.r}")
    mono = _monochromatic_result(ms)
    if mono is not None:
        return mono

    n = ms.n
    collision: tuple[bytes, bytes] | None = None
    for data, count in ms.entries.items():
        if count > 1:
            collision = (data, data)
            break

    centre_id: dict[bytes, bytes] = {}
    info: dict[bytes, tuple] = {}
    if collision is None:
        for sig in _sig_objects(ms):
            r, nn, c0, s, P, T = decode_signature(sig)
            cid = centre_r2_signature(n, c0, s, P).data
            if cid in centre_id:
                collision = (centre_id[cid], sig.data)
                break
            centre_id[cid] = sig.data
            info[sig.data] = (c0, s, P, T, cid)

    if collision is None:
        result = _label_id_graph(ms, centre_id, info)
        if result is not None:
            return result
        # Structural inconsistency without an explicit collision: treat like
        # a failed uniqueness hypothesis and fall through to the assembler.

    fallback = _assemble(ms, assembler_budget)
    if fallback.status == "success":
        return fallback
    status = "ambiguous" if collision is not None else fallback.status
    fallback.status = status
    fallback.collision = collision
    return fallback


def _label_id_graph(ms: BallMultiset, centre_id, info) -> ReconstructionResult | None:
    """BFS labelling of the identity graph; None on any structural mismatch."""
    n = ms.n
    size = 1 << n
    adjacency: dict[bytes, list[bytes]] = {}
    for data, (c0, s, P, T, cid) in info.items():
        nbrs = []
        for i in range(n):
            nid = neighbour_r2_signature(n, c0, s, P, T, i).data
            if nid not in centre_id:
                return None
            nbrs.append(nid)
        if len(set(nbrs)) != n:
            return None
        adjacency[cid] = sorted(nbrs)

    # Symmetry of the derived adjacency.
    for cid, nbrs in adjacency.items():
        for nid in nbrs:
            if cid not in adjacency[nid]:
                return None

    anchor_data = min(ms.entries, key=lambda d: (ms.entries[d], d))
    anchor = info[anchor_data][4]
    label: dict[bytes, int] = {anchor: 0}
    used_labels = {0}
    log = [f"step 0 place 0 sig {anchor_data.hex()} alternatives 1"]
    layer = []
    for bit, nid in enumerate(adjacency[anchor]):
        if nid in label:
            return None
        label[nid] = 1 << bit
        used_labels.add(1 << bit)
        layer.append(nid)
        log.append(
            f"step {bit + 1} place {1 << bit} sig {centre_id[nid].hex()} alternatives 1"
        )
    step = n + 1
    k = 1
    while layer and k < n:
        nxt = []
        for cid in layer:
            for nid in adjacency[cid]:
                if nid in label:
                    continue
                down = [label[x] for x in adjacency[nid] if x in label]
                if len(down) != k + 1:
                    return None
                lab = 0
                for d in down:
                    lab |= d
                if lab.bit_count() != k + 1 or lab in used_labels:
                    return None
                if len(set(down)) != k + 1 or any(
                    d.bit_count() != k or (d | lab) != lab for d in down
                ):
                    return None
                label[nid] = lab
                used_labels.add(lab)
                nxt.append(nid)
                log.append(
                    f"step {step} place {lab} sig {centre_id[nid].hex()} alternatives 1"
                )
                step += 1
        layer = nxt
        k += 1

    if len(label) != size:
        return None
    cols = np.empty(size, dtype=np.int64)
    for cid, lab in label.items():
        cols[lab] = info[centre_id[cid]][0]
    chi = Colouring(n=n, q=ms.q, colours=cols)
    if extract_multiset(chi, 3).entries != ms.entries:
        return None
    return ReconstructionResult(
        status="success", colouring=chi, placements_tried=size, log=log
    )


# ---------------------------------------------------------------------------
# Backtracking assembler (radius 2, and the radius-3 fallback)
# ---------------------------------------------------------------------------


def reconstruct_r2(
    ms: BallMultiset, budget: int = DEFAULT_ASSEMBLY_BUDGET
) -> ReconstructionResult:
    """Reconstruct a colouring from its multiset of coloured 2-balls."""
    if ms.r != 2:
        raise InputDomainError(f"reconstruct_r2 needs a radius-2 multiset, got r={ms.r}")
    if ms.n > 12:
        raise BudgetError(f"the assembler is capped at n=12, got n={ms.n}")
    mono = _monochromatic_result(ms)
    if mono is not None:
        return mono
    return _assemble(ms, budget)


def _ball_value(arrays, offsets_bits: tuple[int, ...]) -> int:
    c0, s, P, T = arrays
    k = len(offsets_bits)
    if k == 0:
        return c0
    if k == 1:
        return s[offsets_bits[0]]
    if k == 2:
        return P[offsets_bits[0]][offsets_bits[1]]
    return T[offsets_bits[0]][offsets_bits[1]][offsets_bits[2]]


def _alignment_extensions(arrays, v, col, n, r, counter, budget):
    """Distinct colour extensions from placing a decoded ball at v.

    Assigns ball coordinates to cube coordinates depth first, pruning on any
    clash with already-known colours and collapsing ball-side twin choices,
    which keeps monochromatic regions linear.
    """
    c0, s, P, T = arrays
    if col[v] is not None and col[v] != c0:
        return []
    extensions: list[dict[int, int]] = []
    seen: set[frozenset] = set()
    assigned_ball: list[int] = []   # ball coordinate mapped to cube coord = position

    def twin(a: int, b: int) -> bool:
        if s[a] != s[b]:
            return False
        Pa, Pb = P[a], P[b]
        for e in range(n):
            if e == a or e == b:
                continue
            if Pa[e] != Pb[e]:
                return False
        if T is not None:
            Ta, Tb = T[a], T[b]
            for e in range(n):
                if e == a or e == b:
                    continue
                Tae, Tbe = Ta[e], Tb[e]
                for f in range(e + 1, n):
                    if f == a or f == b:
                        continue
                    if Tae[f] != Tbe[f]:
                        return False
        return True

    def consistent(b: int, cube_pos: int) -> bool:
        x = v ^ (1 << cube_pos)
        known = col[x]
        if known is not None and known != s[b]:
            return False
        for pos2, b2 in enumerate(assigned_ball):
            y = x ^ (1 << pos2)
            known = col[y]
            if known is not None and known != P[b][b2]:
                return False
            if T is not None:
                for pos3 in range(pos2 + 1, len(assigned_ball)):
                    b3 = assigned_ball[pos3]
                    z = y ^ (1 << pos3)
                    known = col[z]
                    if known is not None and known != T[b][b2][b3]:
                        return False
        return True

    def rec(cube_pos: int, used: int) -> None:
        counter[0] += 1
        if counter[0] > budget:
            raise BudgetError(f"assembly budget exhausted after {counter[0]} nodes")
        if cube_pos == n:
            ext: dict[int, int] = {}
            if col[v] is None:
                ext[v] = c0
            for pos, b in enumerate(assigned_ball):
                x = v ^ (1 << pos)
                if col[x] is None:
                    ext[x] = s[b]
                for pos2 in range(pos + 1, n):
                    y = x ^ (1 << pos2)
                    if col[y] is None:
                        ext[y] = P[b][assigned_ball[pos2]]
                    if T is not None:
                        for pos3 in range(pos2 + 1, n):
                            z = y ^ (1 << pos3)
                            if col[z] is None:
                                ext[z] = T[b][assigned_ball[pos2]][assigned_ball[pos3]]
            key = frozenset(ext.items())
            if key not in seen:
                seen.add(key)
                extensions.append(ext)
            return
        reps: list[int] = []
        for b in range(n):
            if used & (1 << b):
                continue
            if not consistent(b, cube_pos):
                continue
            if any(twin(b, rep) for rep in reps):
                continue
            reps.append(b)
        for b in reps:
            assigned_ball.append(b)
            rec(cube_pos + 1, used | (1 << b))
            assigned_ball.pop()

    rec(0, 0)
    extensions.sort(key=lambda e: sorted(e.items()))
    return extensions


def _assemble(ms: BallMultiset, budget: int) -> ReconstructionResult:
    n, r = ms.n, ms.r
    size = 1 << n
    balls = {}
    for sig in _sig_objects(ms):
        _, _, c0, s, P, T = decode_signature(sig)
        balls[sig.data] = (c0, s, P, T)
    order = sorted(ms.entries, key=lambda d: (ms.entries[d], d))

    col: list[int | None] = [None] * size
    ball_at: list[bytes | None] = [None] * size
    remaining = dict(ms.entries)
    balled_nbrs = [0] * size
    counter = [0]
    placements = [0]
    trail: list[tuple[int, bytes, int]] = []

    def apply(v: int, data: bytes, ext: dict[int, int]) -> None:
        for x, c in ext.items():
            col[x] = c
        ball_at[v] = data
        remaining[data] -= 1
        for i in range(n):
            balled_nbrs[v ^ (1 << i)] += 1

    def undo(v: int, data: bytes, ext: dict[int, int]) -> None:
        for x in ext:
            col[x] = None
        ball_at[v] = None
        remaining[data] += 1
        for i in range(n):
            balled_nbrs[v ^ (1 << i)] -= 1

    def next_vertex() -> int:
        best, best_key = -1, None
        for v in range(size):
            if ball_at[v] is None:
                key = (balled_nbrs[v], -v)
                if best_key is None or key > best_key:
                    best, best_key = v, key
        return best

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, size + 2000))

    def search(placed: int) -> bool:
        if placed == size:
            return True
        v = next_vertex()
        candidates = [d for d in order if remaining[d] > 0]
        for data in sorted(candidates, key=lambda d: (remaining[d], d)):
            arrays = balls[data]
            exts = _alignment_extensions(arrays, v, col, n, r, counter, budget)
            for ext in exts:
                placements[0] += 1
                apply(v, data, ext)
                trail.append((v, data, len(exts)))
                if search(placed + 1):
                    return True
                trail.pop()
                undo(v, data, ext)
        return False

    try:
        # Seed the first ball in its canonical frame: the output is only
        # defined up to automorphism, so this gauge choice is free.
        seed_data = order[0]
        ext0 = {0: balls[seed_data][0]}
        arrays = balls[seed_data]
        c0, s, P, T = arrays
        for i in range(n):
            ext0[1 << i] = s[i]
            if r >= 2:
                for j in range(i + 1, n):
                    ext0[(1 << i) | (1 << j)] = P[i][j]
                    if r >= 3:
                        for k in range(j + 1, n):
                            ext0[(1 << i) | (1 << j) | (1 << k)] = T[i][j][k]
        apply(0, seed_data, ext0)
        trail.append((0, seed_data, 1))
        placements[0] += 1
        found = search(1)
    except BudgetError:
        sys.setrecursionlimit(limit)
        return ReconstructionResult(
            status="failed", colouring=None, placements_tried=placements[0],
            log=["budget exhausted"],
        )
    sys.setrecursionlimit(limit)

    if not found:
        return ReconstructionResult(
            status="failed", colouring=None, placements_tried=placements[0],
            log=["no consistent extension"],
        )
    cols = np.array(col, dtype=np.int64)
    chi = Colouring(n=n, q=ms.q, colours=cols)
    if extract_multiset(chi, r).entries != ms.entries:
        return ReconstructionResult(
            status="failed", colouring=None, placements_tried=placements[0],
            log=["assembled colouring failed the multiset round trip"],
        )
    log = [
        f"step {i} place {v} sig {data.hex()} alternatives {alts}"
        for i, (v, data, alts) in enumerate(trail)
    ]
    return ReconstructionResult(
        status="success", colouring=chi, placements_tried=placements[0], log=log
    )


# ---------------------------------------------------------------------------
# Equivalence of colourings up to cube automorphism
# ---------------------------------------------------------------------------


def _find_permutation(src: list[int], dst: list[int], n: int) -> tuple[int, ...] | None:
    """A coordinate permutation pi with dst[permute_bits(x, pi)] == src[x], or None."""
    img = [0] * (1 << n)
    pi = [0] * n

    def rec(k: int, used: int) -> bool:
        if k == n:
            return True
        lo, hi = 1 << k, 1 << (k + 1)
        for target in range(n):
            bit = 1 << target
            if used & bit:
                continue
            ok = True
            for x in range(lo, hi):
                im = img[x ^ lo] | bit
                if dst[im] != src[x]:
                    ok = False
                    break
                img[x] = im
            if ok:
                pi[k] = target
                if rec(k + 1, used | bit):
                    return True
        return False

    if dst[0] != src[0]:
        return None
    return tuple(pi) if rec(0, 0) else None


def verify_equivalence(
    chi: Colouring,
    lam: Colouring,
    mode: str = "exact",
    max_anchors: int = 16,
) -> str:
    """Decide whether some cube automorphism carries chi onto lam.

    Exact mode (n <= 8) searches translations times coordinate permutations
    with pruning and always returns a definite verdict.  Fingerprint mode
    compares ball-signature multisets at radii 1 and 2; on a match it runs a
    deterministic anchored permutation search and may return "unknown" only
    when the anchor candidate list was truncated.
    """
    if chi.n != lam.n:
        raise InputDomainError(f"dimension mismatch: {chi.n} vs {lam.n}")
    if mode not in ("exact", "fingerprint"):
        raise InputDomainError(f"unknown mode {mode!r}")
    n = chi.n
    if chi.colour_counts() != lam.colour_counts():
        return INEQUIVALENT

    if mode == "exact":
        if n > 8:
            raise BudgetError(f"exact equivalence search is capped at n=8, got n={n}")
        src = chi.colours.tolist()
        dst = lam.colours.tolist()
        src_nbr0 = sorted(src[1 << i] for i in range(n))
        for t in range(1 << n):
            if dst[t] != src[0]:
                continue
            if sorted(dst[t ^ (1 << i)] for i in range(n)) != src_nbr0:
                continue
            shifted = [dst[x ^ t] for x in range(1 << n)]
            if _find_permutation(src, shifted, n) is not None:
                return EQUIVALENT
        return INEQUIVALENT

    # Fingerprint: compare 1- and 2-ball signature multisets; on a match,
    # anchor on a rare 2-ball signature (an automorphism must map the anchor
    # onto a vertex with an identical signature) and search permutations.
    from .canon import _offsets, _canonical_tuple, _encode

    def r1_multiset(c: Colouring):
        cols = c.colours.tolist()
        out: dict = {}
        for v in range(1 << n):
            key = (cols[v], tuple(sorted(cols[v ^ (1 << i)] for i in range(n))))
            out[key] = out.get(key, 0) + 1
        return out

    if r1_multiset(chi) != r1_multiset(lam):
        return INEQUIVALENT

    def sig_per_vertex(c: Colouring) -> list[bytes]:
        cache: dict = {}
        cols = c.colours.tolist()
        offs = _offsets(n, 2)
        out = []
        s = [0] * n
        P = [[0] * n for _ in range(n)]
        for v in range(1 << n):
            key = tuple(cols[v ^ m] for m in offs)
            data = cache.get(key)
            if data is None:
                for i in range(n):
                    s[i] = cols[v ^ (1 << i)]
                    for j in range(i + 1, n):
                        cc = cols[v ^ (1 << i) ^ (1 << j)]
                        P[i][j] = cc
                        P[j][i] = cc
                data = _encode(2, n, _canonical_tuple(n, 2, cols[v], s, P, None))
                cache[key] = data
            out.append(data)
        return out

    sigs_chi = sig_per_vertex(chi)
    sigs_lam = sig_per_vertex(lam)

    def counted(sigs: list[bytes]) -> dict[bytes, int]:
        out: dict[bytes, int] = {}
        for d in sigs:
            out[d] = out.get(d, 0) + 1
        return out

    counts = counted(sigs_chi)
    if counts != counted(sigs_lam):
        return INEQUIVALENT
    anchor = min(range(1 << n), key=lambda v: (counts[sigs_chi[v]], v))
    targets = [v for v in range(1 << n) if sigs_lam[v] == sigs_chi[anchor]]
    truncated = len(targets) > max_anchors
    src = [int(c) for c in chi.colours[np.arange(1 << n) ^ anchor]]
    dst_all = lam.colours.tolist()
    for b in targets[:max_anchors]:
        shifted = [dst_all[x ^ b] for x in range(1 << n)]
        if _find_permutation(src, shifted, n) is not None:
            return EQUIVALENT
    return UNKNOWN if truncated else INEQUIVALENT


def verify_equivalence_bruteforce(chi: Colouring, lam: Colouring) -> str:
    """Unpruned search over all 2^n n! automorphisms; test oracle, n <= 4."""
    if chi.n > 5:
        raise BudgetError("brute-force equivalence oracle capped at n=5")
    for table in all_automorphism_tables(chi.n):
        if apply_vertex_map(chi, table) == lam:
            return EQUIVALENT
    return INEQUIVALENT


# ---------------------------------------------------------------------------
# Exhaustive indistinguishability atlas at tiny n (q = 2)
# ---------------------------------------------------------------------------


@dataclass
class IndistinguishabilityAtlas:
    n: int
    r: int
    q: int
    multiset_id: np.ndarray        # group id per colouring bitmask
    orbit_rep: np.ndarray          # least equivalent colouring bitmask
    ambiguous_groups: list[list[list[int]]]  # per group: equivalence classes
    witness_pairs: list[tuple[int, int]]     # class representative pairs
    fraction_distinguishable: float


def indistinguishability_search(n: int, r: int, q: int = 2) -> IndistinguishabilityAtlas:
    """Group all 2-colourings of Q_n by r-ball multiset and split by equivalence.

    Emits, for every multiset group containing more than one equivalence
    class, all representative pairs: these witness r-indistinguishability.
    """
    check_dim(n)
    if q != 2:
        raise InputDomainError("the exhaustive atlas is defined for q = 2")
    if n > 4:
        raise BudgetError(f"exhaustive search is capped at n=4, got n={n}")
    if not 1 <= r <= n:
        raise InputDomainError(f"radius must be in [1, {n}], got {r}")

    from .canon import _canonical_tuple, _encode, _offsets

    size = 1 << n
    total = 1 << size
    use_full_ball = r > 3  # only reachable at n = 4, r = 4
    offs = _offsets(n, r) if not use_full_ball else None

    # Multiset fingerprints.
    sig_ids: dict[bytes, int] = {}
    cache: dict = {}
    group_of: dict[tuple, int] = {}
    multiset_id = np.empty(total, dtype=np.int64)
    s_buf = [0] * n
    P_buf = [[0] * n for _ in range(n)] if r >= 2 else None
    T_buf = [[[0] * n for _ in range(n)] for _ in range(n)] if r >= 3 else None
    for cbits in range(total):
        cols = [(cbits >> v) & 1 for v in range(size)]
        ids = []
        for v in range(size):
            if use_full_ball:
                key = tuple(cols[v ^ m] for m in range(size))
            else:
                key = tuple(cols[v ^ m] for m in offs)
            data = cache.get(key)
            if data is None:
                if use_full_ball:
                    data = _full_ball_canonical(cols, v, n)
                else:
                    c0 = cols[v]
                    for i in range(n):
                        s_buf[i] = cols[v ^ (1 << i)]
                    if r >= 2:
                        for i in range(n):
                            for j in range(i + 1, n):
                                cc = cols[v ^ (1 << i) ^ (1 << j)]
                                P_buf[i][j] = cc
                                P_buf[j][i] = cc
                    if r >= 3:
                        for i in range(n):
                            for j in range(i + 1, n):
                                for k in range(j + 1, n):
                                    cc = cols[v ^ (1 << i) ^ (1 << j) ^ (1 << k)]
                                    T_buf[i][j][k] = T_buf[i][k][j] = cc
                                    T_buf[j][i][k] = T_buf[j][k][i] = cc
                                    T_buf[k][i][j] = T_buf[k][j][i] = cc
                    data = _encode(r, n, _canonical_tuple(n, r, c0, s_buf, P_buf, T_buf))
                cache[key] = data
            ids.append(sig_ids.setdefault(data, len(sig_ids)))
        fp = tuple(sorted(ids))
        multiset_id[cbits] = group_of.setdefault(fp, len(group_of))

    # Orbit representatives under the full automorphism group.
    tables = all_automorphism_tables(n)
    bits = (np.arange(total, dtype=np.int64)[:, None] >> np.arange(size)[None, :]) & 1
    orbit_rep = np.full(total, np.iinfo(np.int64).max, dtype=np.int64)
    for table in tables:
        weights = np.array([1 << t for t in table], dtype=np.int64)
        permuted = bits @ weights
        np.minimum(orbit_rep, permuted, out=orbit_rep)

    # Split groups into classes.
    groups: dict[int, dict[int, list[int]]] = {}
    for cbits in range(total):
        g = int(multiset_id[cbits])
        groups.setdefault(g, {}).setdefault(int(orbit_rep[cbits]), []).append(cbits)

    ambiguous: list[list[list[int]]] = []
    witnesses: list[tuple[int, int]] = []
    distinguishable = 0
    for g, classes in sorted(groups.items()):
        if len(classes) == 1:
            distinguishable += sum(len(v) for v in classes.values())
            continue
        reps = sorted(classes)
        ambiguous.append([sorted(classes[rep]) for rep in reps])
        for i in range(len(reps)):
            for j in range(i + 1, len(reps)):
                witnesses.append((reps[i], reps[j]))
    return IndistinguishabilityAtlas(
        n=n,
        r=r,
        q=2,
        multiset_id=multiset_id,
        orbit_rep=orbit_rep,
        ambiguous_groups=ambiguous,
        witness_pairs=witnesses,
        fraction_distinguishable=distinguishable / total,
    )


def _full_ball_canonical(cols: list[int], v: int, n: int) -> bytes:
    """Canonical form of a whole-cube ball: minimise over coordinate orders."""
    import itertools as _it

    size = 1 << n
    best = None
    for pi in _it.permutations(range(n)):
        tup = tuple(cols[v ^ _permute(m, pi)] for m in range(size))
        if best is None or tup < best:
            best = tup
    return f"{n}full:".encode() + ",".join(map(str, best)).encode()


def _permute(m: int, pi) -> int:
    y = 0
    for i, t in enumerate(pi):
        if (m >> i) & 1:
            y |= 1 << t
    return y

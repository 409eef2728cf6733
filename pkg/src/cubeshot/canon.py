"""Canonical signatures of coloured r-balls under centred isomorphism.

For n >= 3 the centre of a ball is graph-determined (the unique degree-n
vertex), so two coloured balls are isomorphic exactly when some coordinate
permutation carries one colour map onto the other.  A signature is the
lexicographically minimal encoding of the ball over all coordinate orders:
a canonical form, not a hash, so equality is decidable with zero collision
risk and byte-identical across runs and platforms.

The minimal order is found by individualization with backtracking: the
encoding is emitted coordinate by coordinate, at each step only candidates
achieving the minimal next segment are explored, and tied candidates that
are interchangeable (twins under a transposition fixing the rest of the
ball) are collapsed to one representative.  Monochromatic balls therefore
canonicalise in linear time instead of factorial.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import IO

from .errors import BudgetError, InputDomainError
from .hypercube import check_dim, check_vertex, permute_bits

DEFAULT_NODE_BUDGET = 500_000

_RADIUS_DIM_CAP = {1: 30, 2: 16, 3: 12}


def _check_budget(r: int, n: int) -> None:
    if r not in _RADIUS_DIM_CAP:
        raise InputDomainError(f"signatures support radii 1..3, got {r}")
    cap = _RADIUS_DIM_CAP[r]
    if n > cap:
        raise BudgetError(f"radius {r} signatures are capped at n={cap}, got n={n}")


@dataclass(frozen=True)
class BallSignature:
    """Canonical byte string identifying a coloured r-ball up to isomorphism."""

    data: bytes
    r: int
    n: int

    @property
    def hex(self) -> str:
        return self.data.hex()


@dataclass
class BallView:
    """A coloured r-ball: colours keyed by the offset bitmask from the centre."""

    centre: int
    r: int
    n: int
    colour_of: dict[int, int] = field(repr=False)

    def __post_init__(self) -> None:
        check_vertex(self.centre, self.n)
        if self.r not in (1, 2, 3):
            raise InputDomainError(f"ball views support radii 1..3, got {self.r}")
        expected = sum(1 for m in range(1 << self.n) if m.bit_count() <= self.r)
        if len(self.colour_of) != expected or any(
            m.bit_count() > self.r for m in self.colour_of
        ):
            raise InputDomainError("colour_of must cover exactly the offsets of weight <= r")


def ball_view(chi, v: int, r: int) -> BallView:
    """Extract the coloured r-ball around v from a colouring."""
    check_vertex(v, chi.n)
    _check_budget(r, chi.n)
    col = chi.colours
    colour_of = {}
    for bits in _offsets(chi.n, r):
        colour_of[bits] = int(col[v ^ bits])
    return BallView(centre=v, r=r, n=chi.n, colour_of=colour_of)


def permute_ball_view(view: BallView, pi) -> BallView:
    """The same ball with coordinates relabelled by pi (a test utility)."""
    moved = {permute_bits(m, pi): c for m, c in view.colour_of.items()}
    return BallView(centre=view.centre, r=view.r, n=view.n, colour_of=moved)


def _offsets(n: int, r: int) -> list[int]:
    out = [0]
    for k in range(1, r + 1):
        for bits in itertools.combinations(range(n), k):
            m = 0
            for b in bits:
                m |= 1 << b
            out.append(m)
    return out


# ---------------------------------------------------------------------------
# Core canonicalization over (c0, s, P, T) arrays:
#   s[i]       colour at offset {i}
#   P[i][j]    colour at offset {i,j}      (symmetric, diagonal unused)
#   T[i][j][k] colour at offset {i,j,k}    (fully symmetric)
# ---------------------------------------------------------------------------


def _canonical_tuple(
    n: int,
    r: int,
    c0: int,
    s: list[int],
    P: list[list[int]] | None,
    T: list[list[list[int]]] | None,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> tuple[int, ...]:
    if r == 1:
        return (c0, *sorted(s))

    counter = [0]

    # Each coordinate's relation profile: the sorted multiset of (partner
    # singleton colour, pair colour) codes against every other coordinate.
    # It is emitted into the encoding purely as an isomorphism-invariant tie
    # breaker: it collapses most branching before pair constraints bite, and
    # decoders simply skip it.
    qmax = max(max(s, default=0), c0) + 1
    for row in P:
        for x in row:
            if x >= qmax:
                qmax = x + 1
    key = [
        (s[c], *sorted(s[j] * qmax + P[c][j] for j in range(n) if j != c))
        for c in range(n)
    ]

    def segment(c: int, placed: list[int]) -> tuple[int, ...]:
        seg = list(key[c])
        Pc = P[c]
        for p in placed:
            seg.append(Pc[p])
        if T is not None:
            m = len(placed)
            for i in range(m):
                Tic = T[placed[i]]
                for j in range(i + 1, m):
                    seg.append(Tic[placed[j]][c])
        return tuple(seg)

    def twin(a: int, b: int) -> bool:
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

    def rec(placed: list[int], remaining: list[int]) -> tuple[int, ...]:
        if not remaining:
            return ()
        counter[0] += len(remaining)
        if counter[0] > node_budget:
            raise BudgetError(
                f"canonicalization budget exceeded after {counter[0]} segment "
                f"evaluations ({len(remaining)} of {n} coordinates unresolved)"
            )
        best_seg: tuple[int, ...] | None = None
        tied: list[int] = []
        for c in remaining:
            seg = segment(c, placed)
            if best_seg is None or seg < best_seg:
                best_seg, tied = seg, [c]
            elif seg == best_seg:
                tied.append(c)
        if len(tied) > 1:
            reps: list[int] = []
            for c in tied:
                if not any(twin(c, rep) for rep in reps):
                    reps.append(c)
        else:
            reps = tied
        best_tail: tuple[int, ...] | None = None
        for c in reps:
            placed.append(c)
            rest = [x for x in remaining if x != c]
            tail = rec(placed, rest)
            placed.pop()
            if best_tail is None or tail < best_tail:
                best_tail = tail
        assert best_seg is not None and best_tail is not None
        return best_seg + best_tail

    return (c0,) + rec([], list(range(n)))


def _encode(r: int, n: int, tup: tuple[int, ...]) -> bytes:
    head = f"{r}:{n}:".encode()
    return head + ",".join(map(str, tup)).encode()


def _decode(data: bytes) -> tuple[int, int, list[int]]:
    parts = data.decode().split(":")
    if len(parts) != 3:
        raise InputDomainError("malformed signature bytes")
    r, n = int(parts[0]), int(parts[1])
    values = [int(x) for x in parts[2].split(",")]
    return r, n, values


def signature_from_arrays(
    n: int,
    r: int,
    c0: int,
    s: list[int],
    P: list[list[int]] | None = None,
    T: list[list[list[int]]] | None = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> BallSignature:
    _check_budget(r, n)
    tup = _canonical_tuple(n, r, c0, s, P, T, node_budget)
    return BallSignature(data=_encode(r, n, tup), r=r, n=n)


def _view_arrays(view: BallView):
    n = view.n
    c0 = view.colour_of[0]
    s = [view.colour_of[1 << i] for i in range(n)]
    P = T = None
    if view.r >= 2:
        P = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                c = view.colour_of[(1 << i) | (1 << j)]
                P[i][j] = c
                P[j][i] = c
    if view.r >= 3:
        T = [[[0] * n for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    c = view.colour_of[(1 << i) | (1 << j) | (1 << k)]
                    T[i][j][k] = T[i][k][j] = c
                    T[j][i][k] = T[j][k][i] = c
                    T[k][i][j] = T[k][j][i] = c
    return c0, s, P, T


def signature_r1(view: BallView) -> BallSignature:
    """Signature of a 1-ball: centre colour plus sorted neighbour colours."""
    if view.r != 1:
        raise InputDomainError(f"signature_r1 needs a radius-1 ball, got r={view.r}")
    c0, s, _, _ = _view_arrays(view)
    return BallSignature(data=_encode(1, view.n, (c0, *sorted(s))), r=1, n=view.n)


def signature_general(view: BallView, node_budget: int = DEFAULT_NODE_BUDGET) -> BallSignature:
    """Canonical signature of an r-ball under the coordinate-permutation action."""
    _check_budget(view.r, view.n)
    c0, s, P, T = _view_arrays(view)
    return signature_from_arrays(view.n, view.r, c0, s, P, T, node_budget)


def decode_signature(sig: BallSignature):
    """Recover the canonical representative arrays (c0, s, P, T) of a signature."""
    r, n, values = _decode(sig.data)
    it = iter(values)
    c0 = next(it)
    s = [0] * n
    P = [[0] * n for _ in range(n)] if r >= 2 else None
    T = [[[0] * n for _ in range(n)] for _ in range(n)] if r >= 3 else None
    if r == 1:
        for k in range(n):
            s[k] = next(it)
        return r, n, c0, s, P, T
    for k in range(n):
        s[k] = next(it)
        for _ in range(n - 1):  # relation-profile tie breaker block
            next(it)
        for i in range(k):
            c = next(it)
            P[i][k] = c
            P[k][i] = c
        if r >= 3:
            for i in range(k):
                for j in range(i + 1, k):
                    c = next(it)
                    T[i][j][k] = T[i][k][j] = c
                    T[j][i][k] = T[j][k][i] = c
                    T[k][i][j] = T[k][j][i] = c
    return r, n, c0, s, P, T


def balls_isomorphic_bruteforce(a: BallView, b: BallView) -> bool:
    """Decide ball isomorphism by trying every coordinate permutation (oracle)."""
    if (a.r, a.n) != (b.r, b.n):
        return False
    for pi in itertools.permutations(range(a.n)):
        if all(b.colour_of[permute_bits(m, pi)] == c for m, c in a.colour_of.items()):
            return True
    return False


# ---------------------------------------------------------------------------
# Ball multisets
# ---------------------------------------------------------------------------


@dataclass(eq=True)
class BallMultiset:
    """Counted multiset of ball signatures; the shotgun input."""

    n: int
    q: int
    r: int
    entries: dict[bytes, int]

    def __post_init__(self) -> None:
        check_dim(self.n)
        if any(c <= 0 for c in self.entries.values()):
            raise InputDomainError("multiset counts must be positive")
        if sum(self.entries.values()) != (1 << self.n):
            raise InputDomainError(
                f"multiset counts must total {1 << self.n}, got {sum(self.entries.values())}"
            )

    def signatures(self) -> list[BallSignature]:
        return [BallSignature(data=d, r=self.r, n=self.n) for d in sorted(self.entries)]


def extract_multiset(chi, r: int, cache: dict | None = None) -> BallMultiset:
    """Map signature -> count over all 2^n centres of a colouring."""
    n = chi.n
    _check_budget(r, n)
    col = chi.colours.tolist()
    offs = _offsets(n, r)
    if cache is None:
        cache = {}
    entries: dict[bytes, int] = {}

    # Reusable buffers; each centre's arrays are fully overwritten.
    s = [0] * n
    P = [[0] * n for _ in range(n)] if r >= 2 else None
    T = [[[0] * n for _ in range(n)] for _ in range(n)] if r >= 3 else None

    for v in range(1 << n):
        key = (r, n) + tuple(col[v ^ m] for m in offs)
        data = cache.get(key)
        if data is None:
            c0 = col[v]
            for i in range(n):
                s[i] = col[v ^ (1 << i)]
            if r >= 2:
                for i in range(n):
                    vi = v ^ (1 << i)
                    Pi = P[i]
                    for j in range(i + 1, n):
                        c = col[vi ^ (1 << j)]
                        Pi[j] = c
                        P[j][i] = c
            if r >= 3:
                for i in range(n):
                    vi = v ^ (1 << i)
                    for j in range(i + 1, n):
                        vij = vi ^ (1 << j)
                        for k in range(j + 1, n):
                            c = col[vij ^ (1 << k)]
                            T[i][j][k] = T[i][k][j] = c
                            T[j][i][k] = T[j][k][i] = c
                            T[k][i][j] = T[k][j][i] = c
            tup = _canonical_tuple(n, r, c0, s, P, T)
            data = _encode(r, n, tup)
            cache[key] = data
        entries[data] = entries.get(data, 0) + 1
    return BallMultiset(n=n, q=chi.q, r=r, entries=entries)


# ---------------------------------------------------------------------------
# File format: header "balls <n> <q> <r>", then one "<count> <hex>" line per
# distinct signature, sorted ascending by hex string.
# ---------------------------------------------------------------------------


def write_multiset(ms: BallMultiset, fh: IO[str]) -> None:
    fh.write(f"balls {ms.n} {ms.q} {ms.r}\n")
    for hx in sorted(d.hex() for d in ms.entries):
        fh.write(f"{ms.entries[bytes.fromhex(hx)]} {hx}\n")


def read_multiset(fh: IO[str]) -> BallMultiset:
    header = fh.readline().split()
    if len(header) != 4 or header[0] != "balls":
        raise InputDomainError("multiset file must start with 'balls <n> <q> <r>'")
    n, q, r = int(header[1]), int(header[2]), int(header[3])
    entries: dict[bytes, int] = {}
    for line in fh:
        line = line.strip()
        if not line:
            continue
        count_str, hx = line.split()
        data = bytes.fromhex(hx)
        if data in entries:
            raise InputDomainError(f"duplicate signature line in multiset file: {hx}")
        entries[data] = int(count_str)
    return BallMultiset(n=n, q=q, r=r, entries=entries)


# ---------------------------------------------------------------------------
# Views into the canonical representative of a radius-3 signature: the
# centre's own 2-ball and the 2-ball of each neighbour are fully contained
# in the 3-ball, so both can be re-canonicalised from the decoded arrays.
# ---------------------------------------------------------------------------


def centre_r2_signature(n: int, c0: int, s, P, node_budget: int = DEFAULT_NODE_BUDGET) -> BallSignature:
    return signature_from_arrays(n, 2, c0, list(s), P, None, node_budget)


def neighbour_r2_signature(
    n: int, c0: int, s, P, T, i: int, node_budget: int = DEFAULT_NODE_BUDGET
) -> BallSignature:
    """2-ball signature of the neighbour in direction i inside a 3-ball.

    In the neighbour's frame, moving back along i reaches the old centre, so
    coordinate i keeps its role while singleton/pair colours are re-read from
    one shell further out.
    """
    s2 = [0] * n
    P2 = [[0] * n for _ in range(n)]
    for j in range(n):
        if j == i:
            s2[j] = c0
            continue
        s2[j] = P[i][j]
        P2[i][j] = s[j]
        P2[j][i] = s[j]
        for k in range(j + 1, n):
            if k == i:
                continue
            c = T[i][j][k]
            P2[j][k] = c
            P2[k][j] = c
    return signature_from_arrays(n, 2, s[i], s2, P2, None, node_budget)

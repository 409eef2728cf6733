"""Binomial tail formulas, neighbourhood statistics, and seeded estimators.

Monte Carlo experiments draw each trial from an independent sub-stream of a
single master seed, so aggregates are independent of execution order and a
published number is reproducible from the (seed, trial count) pair alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Iterable

import numpy as np

from .canon import extract_multiset
from .colouring import ColourDistribution, Colouring, Seed, sample_colouring
from .errors import InputDomainError
from .hypercube import check_vertex, permute_bits

Z_95 = 1.959963984540054


# ---------------------------------------------------------------------------
# Binomial bounds
# ---------------------------------------------------------------------------


def chernoff_lower_tail_bound(n: int, p: float, eps: float) -> float:
    """exp(-eps^2 n p / 2), an upper bound for P[Bin(n,p) <= np(1-eps)]."""
    if eps <= 0:
        raise InputDomainError(f"eps must be positive, got {eps}")
    if not 0 < p < 1:
        raise InputDomainError(f"p must be in (0,1), got {p}")
    return math.exp(-(eps**2) * n * p / 2.0)


def log_binomial_pmf(n: int, p: float, k: int) -> float:
    """log P[Bin(n,p) = k] via log-gamma."""
    if not 0 <= k <= n:
        raise InputDomainError(f"k must be in [0, {n}], got {k}")
    if not 0 < p < 1:
        if p in (0.0, 1.0):
            hit = (k == 0) if p == 0.0 else (k == n)
            return 0.0 if hit else -math.inf
        raise InputDomainError(f"p must be in [0,1], got {p}")
    return (
        math.lgamma(n + 1)
        - math.lgamma(k + 1)
        - math.lgamma(n - k + 1)
        + k * math.log(p)
        + (n - k) * math.log1p(-p)
    )


def binomial_pmf(n: int, p: float, k: int) -> float:
    """C(n,k) p^k (1-p)^(n-k), accurate to ~1e-13 relative error."""
    return math.exp(log_binomial_pmf(n, p, k))


def binomial_pmf_exact(n: int, p: Fraction, k: int) -> Fraction:
    """Exact rational pmf; the slow big-integer oracle."""
    return Fraction(math.comb(n, k)) * p**k * (1 - p) ** (n - k)


def binomial_lower_tail_exact(n: int, p: Fraction, kmax: int) -> Fraction:
    """Exact P[Bin(n,p) <= kmax]."""
    if kmax < 0:
        return Fraction(0)
    total = Fraction(0)
    term = (1 - p) ** n
    ratio_num, ratio_den = p, 1 - p
    for k in range(min(kmax, n) + 1):
        total += term
        term = term * (n - k) * ratio_num / ((k + 1) * ratio_den)
    return total


@dataclass
class PointTailProbe:
    """Exact pmf at an offset target against its predicted power of np."""

    n: int
    p: float
    c: float
    k: int                      # rounded target np + c*sqrt(np log np)
    rounding: float             # k minus the unrounded target
    log_point: float
    theta_exponent: float       # -(1/2 + c^2 / (2(1-p)))
    theta_form: float           # (np)^theta_exponent
    ratio: float                # point / theta_form
    tail_point_ratio: float     # P[Bin >= k] / P[Bin = k]
    tail_reference: float       # (np)^(1/3)


def point_tail_probe(n: int, p: float, c: float) -> PointTailProbe | None:
    """Compare the binomial point mass at np + c*sqrt(np log np) to the
    power law it should track; None when the target leaves [0, n]."""
    npv = n * p
    if npv <= 1:
        raise InputDomainError("need np > 1 so that log(np) is positive")
    target = npv + c * math.sqrt(npv * math.log(npv))
    k = round(target)
    if not 0 <= k <= n:
        return None
    log_point = log_binomial_pmf(n, p, k)
    exponent = -(0.5 + c * c / (2.0 * (1.0 - p)))
    theta = npv**exponent
    from scipy.stats import binom

    tail = float(binom.sf(k - 1, n, p))
    point = math.exp(log_point)
    return PointTailProbe(
        n=n,
        p=p,
        c=c,
        k=k,
        rounding=k - target,
        log_point=log_point,
        theta_exponent=exponent,
        theta_form=theta,
        ratio=point / theta,
        tail_point_ratio=tail / point if point > 0 else math.inf,
        tail_reference=npv ** (1.0 / 3.0),
    )


def point_exponent_regression(p: float, c: float, n_values: Iterable[int]) -> tuple[float, float]:
    """Log-log slope of the point mass against np, with its predicted value."""
    xs, ys = [], []
    for n in n_values:
        probe = point_tail_probe(n, p, c)
        if probe is None:
            continue
        xs.append(math.log(n * p))
        ys.append(probe.log_point)
    if len(xs) < 2:
        raise InputDomainError("need at least two usable sweep points")
    slope = float(np.polyfit(xs, ys, 1)[0])
    return slope, -(0.5 + c * c / (2.0 * (1.0 - p)))


def one_ball_type_count(n: int, q: int) -> int:
    """Number of coloured 1-balls up to isomorphism: q * C(n+q-1, q-1)."""
    if n < 1 or q < 1:
        raise InputDomainError("n and q must be positive")
    return q * math.comb(n + q - 1, q - 1)


# ---------------------------------------------------------------------------
# Neighbourhood statistics
# ---------------------------------------------------------------------------


def _check_two_colour(chi: Colouring) -> None:
    if chi.q > 2:
        raise InputDomainError(f"neighbourhood statistics need q <= 2, got q={chi.q}")


def neighbour_sum_centred(chi: Colouring, w: int, p: float) -> float:
    """Sum of neighbour colours minus its mean n(1-p); zero-mean by design."""
    _check_two_colour(chi)
    check_vertex(w, chi.n)
    total = sum(int(chi.colours[w ^ (1 << i)]) for i in range(chi.n))
    return total - chi.n * (1.0 - p)


def neighbour_sum_profile(chi: Colouring, w: int, p: float) -> list[float]:
    """The multiset of centred neighbour sums over the neighbours of w."""
    _check_two_colour(chi)
    check_vertex(w, chi.n)
    return [neighbour_sum_centred(chi, w ^ (1 << i), p) for i in range(chi.n)]


def _raw_neighbour_sum(cols, w: int, n: int) -> int:
    return sum(int(cols[w ^ (1 << i)]) for i in range(n))


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

STATISTICS = (
    "all_signatures_distinct",
    "min_pairwise_ball_distance",
    "reconstruction_success",
    "psi_event_rate",
)


@dataclass
class ExperimentConfig:
    n: int
    dist: ColourDistribution
    r: int
    trials: int
    seed: Seed
    statistic: str
    threshold_const: float = 1.0     # K in the r=1 distance threshold n - nK/log n
    pair_budget: int = 200_000       # pair scans beyond this are subsampled
    assembly_budget: int = 2_000_000

    def __post_init__(self) -> None:
        if self.statistic not in STATISTICS:
            raise InputDomainError(f"unknown statistic {self.statistic!r}")
        if self.trials < 1:
            raise InputDomainError("need at least one trial")


@dataclass
class TrialRecord:
    trial: int
    outcome: float
    value: float


@dataclass
class TrialSummary:
    config_label: str
    master_seed: int
    records: list[TrialRecord]
    notes: list[str] = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    @property
    def mean(self) -> float:
        return float(np.mean([r.outcome for r in self.records]))

    @property
    def wilson95(self) -> tuple[float, float]:
        return wilson_interval(self.mean, len(self.records))


def wilson_interval(mean: float, count: int, z: float = Z_95) -> tuple[float, float]:
    if count == 0:
        return (0.0, 1.0)
    denom = 1.0 + z * z / count
    centre = mean + z * z / (2 * count)
    rad = z * math.sqrt(max(mean * (1 - mean) / count + z * z / (4 * count * count), 0.0))
    return ((centre - rad) / denom, (centre + rad) / denom)


def write_trials_csv(summary: TrialSummary, fh: IO[str]) -> None:
    fh.write("trial,seed,outcome,value\n")
    for r in summary.records:
        fh.write(f"{r.trial},{summary.master_seed},{r.outcome},{r.value}\n")
    lo, hi = summary.wilson95
    fh.write(f"summary,{summary.master_seed},{summary.mean},{lo}:{hi}\n")


def _r1_signature_table(cols, n: int):
    out = []
    for v in range(1 << n):
        out.append((int(cols[v]), tuple(sorted(int(cols[v ^ (1 << i)]) for i in range(n)))))
    return out


def _r1_distance(sig_u, sig_v, n: int) -> int:
    centre = int(sig_u[0] != sig_v[0])
    a, b = sig_u[1], sig_v[1]
    i = j = common = 0
    while i < n and j < n:
        if a[i] == b[j]:
            common += 1
            i += 1
            j += 1
        elif a[i] < b[j]:
            i += 1
        else:
            j += 1
    return centre + n - common


def unique_balls_rate(config: ExperimentConfig) -> TrialSummary:
    """Per-trial distinctness of ball signatures, or pairwise-distance floors.

    For the distance statistic at r=1 the exact 1-ball distance is scanned
    over vertex pairs (subsampled beyond the pair budget, which makes the
    reported minimum an upper bound); at r=2 the scan uses the cheap lower
    bound, against the threshold n^2 p (1-p) / 2.
    """
    n, r = config.n, config.r
    records = []
    notes: list[str] = []
    for t in range(config.trials):
        chi = sample_colouring(n, config.dist, config.seed, trial=t)
        cols = chi.colours
        if config.statistic == "all_signatures_distinct":
            if r == 1:
                table = _r1_signature_table(cols, n)
                distinct = len(set(table))
            else:
                ms = extract_multiset(chi, r)
                distinct = len(ms.entries)
            records.append(TrialRecord(t, float(distinct == (1 << n)), float(distinct)))
            continue

        # min_pairwise_ball_distance
        size = 1 << n
        total_pairs = size * (size - 1) // 2
        if total_pairs <= config.pair_budget:
            pair_iter = ((u, v) for u in range(size) for v in range(u + 1, size))
        else:
            rng = config.seed.rng(trial=t)
            us = rng.integers(0, size, size=config.pair_budget)
            vs = rng.integers(0, size, size=config.pair_budget)
            pair_iter = ((int(u), int(v)) for u, v in zip(us, vs) if u != v)
            if not notes:
                notes.append(f"pair scan subsampled to {config.pair_budget} of {total_pairs}")
        if r == 1:
            table = _r1_signature_table(cols, n)
            best = None
            for u, v in pair_iter:
                d = _r1_distance(table[u], table[v], n)
                if best is None or d < best:
                    best = d
                    if best == 0:
                        break
            threshold = n - n * config.threshold_const / math.log(n)
        elif r == 2:
            from .colouring import ball_distance_r2

            best = None
            for u, v in pair_iter:
                d = ball_distance_r2(chi, u, v, mode="lower_bound")
                if best is None or d < best:
                    best = d
                    if best == 0:
                        break
            if config.dist.kind != "two_point":
                raise InputDomainError("the r=2 distance threshold needs a two-point distribution")
            p = config.dist.p
            threshold = n * n * p * (1 - p) / 2.0
        else:
            raise InputDomainError(f"distance statistic supports r in (1, 2), got {r}")
        records.append(TrialRecord(t, float(best > threshold), float(best)))
    return TrialSummary(
        config_label=f"{config.statistic} n={n} r={r}",
        master_seed=config.seed.master,
        records=records,
        notes=notes,
    )


def reconstruction_rate(config: ExperimentConfig) -> TrialSummary:
    """Per-trial reconstruction success with an equivalence verdict.

    outcome = 1 when the reconstructor succeeds; value = 1 when the output
    was verified equivalent to the source (exact mode for n <= 8, otherwise
    fingerprint plus anchored search).
    """
    from .shotgun import EQUIVALENT, reconstruct_r2, reconstruct_r3, verify_equivalence

    records = []
    for t in range(config.trials):
        chi = sample_colouring(config.n, config.dist, config.seed, trial=t)
        ms = extract_multiset(chi, config.r)
        if config.r == 3:
            res = reconstruct_r3(ms, assembler_budget=config.assembly_budget)
        elif config.r == 2:
            res = reconstruct_r2(ms, budget=config.assembly_budget)
        else:
            raise InputDomainError(f"reconstruction needs r in (2, 3), got {config.r}")
        if res.status != "success":
            records.append(TrialRecord(t, 0.0, 0.0))
            continue
        mode = "exact" if config.n <= 8 else "fingerprint"
        verdict = verify_equivalence(chi, res.colouring, mode=mode)
        records.append(TrialRecord(t, 1.0, float(verdict == EQUIVALENT)))
    return TrialSummary(
        config_label=f"reconstruction_success n={config.n} r={config.r}",
        master_seed=config.seed.master,
        records=records,
    )


def compatibility_event_rate(
    config: ExperimentConfig,
    u: int,
    v: int,
    pi1: tuple[int, ...],
    pi2: tuple[int, ...],
    family: Iterable[int],
) -> TrialSummary:
    """Rate of the events "the centred neighbour sum at the u-side point lies
    in the profile at the v-side point" over a family of coordinate sets.

    The family should be spread (pairwise Hamming distance >= 6) so that the
    events are functions of disjoint colour sets; a non-spread family is
    flagged, not rejected.  The membership test is carried out on integer
    neighbour sums, so the centring constant cancels exactly.
    """
    n = config.n
    check_vertex(u, n)
    check_vertex(v, n)
    sets = sorted(set(int(m) for m in family))
    if not sets:
        raise InputDomainError("the event family is empty")
    notes = []
    min_spread = min(
        ((a ^ b).bit_count() for a in sets for b in sets if a < b), default=n
    )
    if min_spread < 6:
        notes.append(f"family is only {min_spread}-spread; events may correlate")
    records = []
    matrix = np.zeros((config.trials, len(sets)), dtype=np.int8)
    for t in range(config.trials):
        chi = sample_colouring(n, config.dist, config.seed, trial=t)
        if chi.q > 2:
            raise InputDomainError("compatibility events need a 2-colour palette")
        cols = chi.colours
        events = []
        for idx, S in enumerate(sets):
            x = u ^ permute_bits(S, pi1)
            y = v ^ permute_bits(S, pi2)
            target = _raw_neighbour_sum(cols, x, n)
            profile = {_raw_neighbour_sum(cols, y ^ (1 << i), n) for i in range(n)}
            hit = target in profile
            events.append(hit)
            matrix[t, idx] = hit
        records.append(TrialRecord(t, float(all(events)), float(np.mean(events))))
    return TrialSummary(
        config_label=f"psi_event_rate n={n}",
        master_seed=config.seed.master,
        records=records,
        notes=notes,
        detail={"event_matrix": matrix, "sets": sets},
    )


def pairwise_independence_shuffle_test(
    matrix: np.ndarray, rng: np.random.Generator, shuffles: int = 200
) -> float:
    """Permutation p-value for cross-column dependence of binary events.

    The statistic is the summed squared off-diagonal covariance; shuffling
    each column independently preserves margins while breaking dependence.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape[1] < 2:
        return 1.0

    def stat(m: np.ndarray) -> float:
        cov = np.cov(m, rowvar=False)
        off = cov - np.diag(np.diag(cov))
        return float(np.sum(off * off))

    observed = stat(matrix)
    count = 0
    for _ in range(shuffles):
        shuffled = np.column_stack(
            [rng.permutation(matrix[:, j]) for j in range(matrix.shape[1])]
        )
        if stat(shuffled) >= observed:
            count += 1
    return (count + 1) / (shuffles + 1)


def run_experiment(config: ExperimentConfig, **kwargs) -> TrialSummary:
    """Dispatch a statistic to its runner; psi events need the event geometry
    (u, v, pi1, pi2, family) passed through as keyword arguments."""
    if config.statistic in ("all_signatures_distinct", "min_pairwise_ball_distance"):
        return unique_balls_rate(config)
    if config.statistic == "reconstruction_success":
        return reconstruction_rate(config)
    return compatibility_event_rate(config, **kwargs)

"""Outcome distributions of the central spin: enumeration, binomial, sampling.

Marginalizing the trajectory law over initial bath states leaves a
distribution over flip patterns d: since every squared per-spin
amplitude depends on d_j alone, the probability of a pattern is

    P(d) = w_up * prod_j p_up_j(d_j)  +  w_down * prod_j p_down_j(d_j)

with w_up = |a_up|^2 and p_S_j(-1) = (1 - r_S_j) sin^2(omega_S_j tau),
p_S_j(+1) = 1 - p_S_j(-1).  That is a two-component mixture of product
Bernoulli distributions, which gives three exact routes to the
distribution of the up-projection u = w_up W_up / (w_up W_up + w_down W_down):

* enumerate all 2^N patterns (N <= 20),
* reduce to flip counts when all h_j are equal (N + 1 atoms, any N),
* draw patterns directly from the mixture (any N, exact sampling).

All pattern weights accumulate in log domain; u is evaluated through
the logit so it comes out finite or exactly 0/1 even at N = 80.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import (
    EnvironmentTooLarge,
    FlipPattern,
    ModelParams,
    SystemAmplitudes,
    branch_flip_profile,
    spin_amplitude,
)

ENUMERATION_CAP = 20
WEIGHT_FLOOR = 1e-300
U_MERGE_TOL = 1e-12
SAMPLE_CHUNK = 8192


class DegenerateOutcomeError(ValueError):
    """Both branch weights vanished: the outcome state is undefined at this time."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


@dataclass(frozen=True)
class OutcomeAtom:
    """One possible up-projection value with its probability mass."""

    u: float
    weight: float
    pattern: FlipPattern | None = None


@dataclass
class ProjectionDistribution:
    """Distribution of the up-projection u at one time, as parallel arrays.

    kind is 'exact' (one atom per flip pattern), 'binomial' (atoms
    indexed by flip count, equal-u atoms merged) or 'sampled' (every
    atom carries weight 1/sample_count).  pattern_codes, when present,
    give the flip pattern of each atom as a bit code (bit i set = spin
    i+1 flipped).  dropped reports atoms removed for carrying weight
    below 1e-300; they are excluded from normalization checks.
    """

    u: np.ndarray
    weight: np.ndarray
    kind: str
    sample_count: int | None = None
    seed: int | None = None
    pattern_codes: np.ndarray | None = None
    flip_counts: np.ndarray | None = None
    dropped: int = 0

    def __post_init__(self):
        if self.kind not in ("exact", "binomial", "sampled"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.u.shape != self.weight.shape:
            raise ValueError("u and weight must be parallel arrays")

    def __len__(self) -> int:
        return self.u.size

    def total_weight(self) -> float:
        return float(np.sum(self.weight))

    def atoms(self, n: int | None = None) -> Iterator[OutcomeAtom]:
        """Materialize atoms; pass the environment size to decode patterns."""
        for i in range(self.u.size):
            pat = None
            if self.pattern_codes is not None and n is not None:
                pat = FlipPattern.from_code(int(self.pattern_codes[i]), n)
            yield OutcomeAtom(float(self.u[i]), float(self.weight[i]), pat)


def _log_branch_pair(params, alphas, t):
    """Log branch weights' ingredients shared by every engine route."""
    up = branch_flip_profile(params, "up", t)
    down = branch_flip_profile(params, "down", t)
    lw_up = math.log(alphas.w_up) if alphas.w_up > 0 else -math.inf
    lw_down = math.log(alphas.w_down) if alphas.w_down > 0 else -math.inf
    return up, down, lw_up, lw_down


def _u_from_logs(total_up, total_down):
    """u = 1/(1 + exp(total_down - total_up)), exact 0/1 at infinite logits.

    total_* are log(|alpha|^2 W) per branch.  Callers must exclude the
    degenerate case where both are -inf.
    """
    total_up = np.asarray(total_up, dtype=float)
    total_down = np.asarray(total_down, dtype=float)
    u = np.empty_like(total_up)
    up_dead = np.isneginf(total_up)
    down_dead = np.isneginf(total_down)
    u[up_dead] = 0.0
    u[down_dead] = 1.0
    live = ~(up_dead | down_dead)
    with np.errstate(over="ignore"):
        u[live] = 1.0 / (1.0 + np.exp(total_down[live] - total_up[live]))
    return u


def pattern_projection(
    params: ModelParams, alphas: SystemAmplitudes, t: float, pattern: FlipPattern
) -> float:
    """Up-projection u of the trajectory state selected by a flip pattern.

    Raises DegenerateOutcomeError when both branch weights are exactly
    zero (a measure-zero set of times); never returns NaN.
    """
    if len(pattern) != params.n_env:
        raise ValueError("pattern length does not match environment size")
    up, down, lw_up, lw_down = _log_branch_pair(params, alphas, t)
    flipped = pattern.flipped
    log_wu = float(np.sum(np.where(flipped, up.log_flip, up.log_keep)))
    log_wd = float(np.sum(np.where(flipped, down.log_flip, down.log_keep)))
    total_up = lw_up + log_wu
    total_down = lw_down + log_wd
    if math.isinf(total_up) and math.isinf(total_down):
        raise DegenerateOutcomeError(
            f"both branch weights vanish for this pattern at t={t}", t=t
        )
    return float(_u_from_logs(total_up, total_down))


def enumerate_outcomes(
    params: ModelParams, alphas: SystemAmplitudes, t: float, cap: int = ENUMERATION_CAP
) -> ProjectionDistribution:
    """Exact distribution with one atom per flip pattern (2^N of them).

    The initial-state marginal drops out because squared per-spin
    amplitudes depend only on d_j, so the result is independent of the
    bath occupation and of beta.  Atoms with weight below 1e-300
    (including exact zeros) are dropped and counted in ``dropped``.
    """
    n = params.n_env
    if n > cap:
        raise EnvironmentTooLarge(f"N={n} exceeds enumeration cap {cap} (2^N atoms)")
    up, down, lw_up, lw_down = _log_branch_pair(params, alphas, t)
    codes = np.arange(2**n, dtype=np.int64)
    log_wu = np.zeros(2**n)
    log_wd = np.zeros(2**n)
    for i in range(n):
        bit = ((codes >> i) & 1).astype(bool)
        log_wu += np.where(bit, up.log_flip[i], up.log_keep[i])
        log_wd += np.where(bit, down.log_flip[i], down.log_keep[i])
    with np.errstate(over="ignore"):
        weight = alphas.w_up * np.exp(log_wu) + alphas.w_down * np.exp(log_wd)
    keep = weight >= WEIGHT_FLOOR
    u = _u_from_logs(lw_up + log_wu[keep], lw_down + log_wd[keep])
    return ProjectionDistribution(
        u=u,
        weight=weight[keep],
        kind="exact",
        pattern_codes=codes[keep],
        dropped=int(np.count_nonzero(~keep)),
    )


def _log_choose(n: int, k: np.ndarray) -> np.ndarray:
    return np.array(
        [math.lgamma(n + 1) - math.lgamma(v + 1) - math.lgamma(n - v + 1) for v in k]
    )


def binomial_outcomes(
    params: ModelParams, alphas: SystemAmplitudes, t: float
) -> ProjectionDistribution:
    """Exact distribution for equal couplings, indexed by flip count.

    With all h_j equal the branch weight depends only on how many spins
    flipped, so the 2^N patterns collapse onto N + 1 atoms with binomial
    multiplicity.  Atoms whose u coincide within 1e-12 are merged;
    flip_counts then records the smallest flip count of each merged
    group.  Agrees with enumerate_outcomes exactly (after the same
    merging) wherever both apply.
    """
    n = params.n_env
    if len(set(params.h)) != 1:
        raise ValueError("binomial reduction requires all couplings equal")
    up, down, lw_up, lw_down = _log_branch_pair(params, alphas, t)
    k = np.arange(n + 1, dtype=np.int64)

    def log_w(profile):
        # 0 * (-inf) would be nan; the where() masks those slots out.
        with np.errstate(invalid="ignore"):
            keep_part = np.where(k < n, (n - k) * profile.log_keep[0], 0.0)
            flip_part = np.where(k > 0, k * profile.log_flip[0], 0.0)
        return keep_part + flip_part

    log_wu = log_w(up)
    log_wd = log_w(down)
    log_count = _log_choose(n, k)
    with np.errstate(over="ignore"):
        weight = alphas.w_up * np.exp(log_count + log_wu) + alphas.w_down * np.exp(
            log_count + log_wd
        )
    keep = weight >= WEIGHT_FLOOR
    u = _u_from_logs(lw_up + log_wu[keep], lw_down + log_wd[keep])
    dist = ProjectionDistribution(
        u=u,
        weight=weight[keep],
        kind="binomial",
        flip_counts=k[keep],
        dropped=int(np.count_nonzero(~keep)),
    )
    return merge_by_u(dist, U_MERGE_TOL)


def merge_by_u(dist: ProjectionDistribution, tol: float = U_MERGE_TOL) -> ProjectionDistribution:
    """Merge atoms whose u values coincide within tol (weights add).

    The merged u is the weight-weighted mean of the group.  Pattern
    codes are discarded (a merged atom has no single pattern); flip
    counts keep the smallest member.
    """
    if dist.u.size == 0:
        return dist
    order = np.argsort(dist.u, kind="stable")
    u_sorted = dist.u[order]
    w_sorted = dist.weight[order]
    boundaries = np.nonzero(np.diff(u_sorted) > tol)[0] + 1
    groups = np.split(np.arange(u_sorted.size), boundaries)
    u_out = np.empty(len(groups))
    w_out = np.empty(len(groups))
    k_out = None
    if dist.flip_counts is not None:
        k_sorted = dist.flip_counts[order]
        k_out = np.empty(len(groups), dtype=np.int64)
    for g, idx in enumerate(groups):
        w = w_sorted[idx]
        w_out[g] = np.sum(w)
        u_out[g] = np.average(u_sorted[idx], weights=w) if w_out[g] > 0 else u_sorted[idx[0]]
        if k_out is not None:
            k_out[g] = np.min(k_sorted[idx])
    return ProjectionDistribution(
        u=u_out,
        weight=w_out,
        kind=dist.kind,
        sample_count=dist.sample_count,
        seed=dist.seed,
        flip_counts=k_out,
        dropped=dist.dropped,
    )


def _sample_chunk(params, alphas, t, seed, chunk_index, size):
    """Draw one deterministic chunk of patterns and return their u values.

    The chunk stream is PCG64 seeded with
    SeedSequence(entropy=seed, spawn_key=(chunk_index,)); within a
    chunk the draw order is fixed: ``size`` uniforms pick the mixture
    branch, then a (size, N) uniform block picks the flips.
    """
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(chunk_index,)))
    up, down, lw_up, lw_down = _log_branch_pair(params, alphas, t)
    n = params.n_env
    branch_up = rng.random(size) < alphas.w_up
    flip_prob = np.where(branch_up[:, None], up.flip[None, :], down.flip[None, :])
    flips = rng.random((size, n)) < flip_prob
    log_wu = np.zeros(size)
    log_wd = np.zeros(size)
    for i in range(n):
        col = flips[:, i]
        log_wu += np.where(col, up.log_flip[i], up.log_keep[i])
        log_wd += np.where(col, down.log_flip[i], down.log_keep[i])
    return _u_from_logs(lw_up + log_wu, lw_down + log_wd)


def sample_outcomes(
    params: ModelParams,
    alphas: SystemAmplitudes,
    t: float,
    count: int,
    seed: int,
    workers: int = 1,
) -> ProjectionDistribution:
    """Draw ``count`` outcomes from the exact pattern law.

    Why this is exact and not approximate: the marginal pattern weight
    is w_up * B_up(d) + w_down * B_down(d) where each B_S is a product
    of independent per-spin Bernoulli factors (flip probability
    (1 - r_S_j) sin^2(omega_S_j tau)).  Picking the branch with
    probability w_S and then flipping each spin independently with its
    branch's probability therefore reproduces the mixture law exactly,
    at O(N) cost per sample, with no rejection or Markov-chain error.
    Sampled patterns always have positive weight under their own
    branch, so u is always well defined.

    Samples are produced in fixed chunks of 8192; chunk c uses the
    stream SeedSequence(entropy=seed, spawn_key=(c,)) and results are
    concatenated in chunk order, so the output is byte-identical for
    any worker count.
    """
    if count < 1:
        raise ValueError("sample count must be at least 1")
    sizes = [SAMPLE_CHUNK] * (count // SAMPLE_CHUNK)
    if count % SAMPLE_CHUNK:
        sizes.append(count % SAMPLE_CHUNK)
    jobs = list(enumerate(sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(lambda job: _sample_chunk(params, alphas, t, seed, *job), jobs)
            )
    else:
        parts = [_sample_chunk(params, alphas, t, seed, c, s) for c, s in jobs]
    u = np.concatenate(parts)
    return ProjectionDistribution(
        u=u,
        weight=np.full(count, 1.0 / count),
        kind="sampled",
        sample_count=count,
        seed=int(seed),
    )


def wavefunction_of_pattern(
    params: ModelParams,
    alphas: SystemAmplitudes,
    t: float,
    initial_spins,
    pattern: FlipPattern,
) -> np.ndarray:
    """Normalized system state for one (initial spins, flip pattern) outcome.

    Unlike the squared weights, the complex branch amplitudes carry
    phases that depend on the initial orientations (each kept spin
    contributes cos - i a s_j sin / omega).  Amplitude magnitudes are
    assembled from logs so the result stays finite at large N.
    """
    n = params.n_env
    spins = np.asarray(list(initial_spins), dtype=int)
    if spins.shape != (n,) or not np.all(np.abs(spins) == 1):
        raise ValueError("initial spins must be N values of +1/-1")
    if len(pattern) != n:
        raise ValueError("pattern length does not match environment size")

    def branch_log_and_phase(branch):
        prof = branch_flip_profile(params, branch, t)
        log_mag2 = float(np.sum(np.where(pattern.flipped, prof.log_flip, prof.log_keep)))
        phase = 0.0
        for j in range(1, n + 1):
            g = spin_amplitude(params, branch, j, t, int(spins[j - 1]), bool(pattern.flipped[j - 1]))
            if g != 0:
                phase += math.atan2(g.imag, g.real)
        return log_mag2, phase

    log_u2, phase_u = branch_log_and_phase("up")
    log_d2, phase_d = branch_log_and_phase("down")
    total_up = (math.log(alphas.w_up) if alphas.w_up > 0 else -math.inf) + log_u2
    total_down = (math.log(alphas.w_down) if alphas.w_down > 0 else -math.inf) + log_d2
    if math.isinf(total_up) and math.isinf(total_down):
        raise DegenerateOutcomeError(
            f"both branch amplitudes vanish for this outcome at t={t}", t=t
        )
    ref = max(total_up, total_down)
    au = math.sqrt(math.exp(total_up - ref)) if total_up > -math.inf else 0.0
    ad = math.sqrt(math.exp(total_down - ref)) if total_down > -math.inf else 0.0
    norm = math.hypot(au, ad)
    up_amp = (au / norm) * complex(math.cos(phase_u), math.sin(phase_u))
    down_amp = (ad / norm) * complex(math.cos(phase_d), math.sin(phase_d))
    phase_up_coeff = alphas.a_up / abs(alphas.a_up) if alphas.a_up != 0 else 1.0
    phase_down_coeff = alphas.a_down / abs(alphas.a_down) if alphas.a_down != 0 else 1.0
    return np.array([up_amp * phase_up_coeff, down_amp * phase_down_coeff], dtype=complex)

"""Brute-force universe oracle: dense Hamiltonian, exact propagation, outcomes.

Builds the full 2^(N+1)-dimensional Hamiltonian of system plus bath,
propagates by eigendecomposition (exact at any time, no stepping error
beyond linear algebra), and enumerates every trajectory outcome
(n_final, n_initial) with its weight.  Used to validate the factorized
engine and the reduced-density-matrix identity; practical for small N
only, the default cap is N = 12 (a dense complex matrix at N = 12 is
8192^2 entries, about 1 GiB, and eigh needs a few times that).

Basis ordering is documented bit-exactly: a universe basis index is
sys_bit * 2^N + env_index with sys_bit 0 for system up, 1 for down; in
env_index, environment spin j sits at bit N - j, bit value 0 meaning
spin up (+1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EnvironmentTooLarge, FlipPattern, ModelParams, SystemAmplitudes

DEFAULT_CAP = 12


@dataclass(frozen=True)
class EnvBasisState:
    """One product eigenstate of the bath Hamiltonian."""

    index: int
    spins: tuple[int, ...]
    energy: float


@dataclass(frozen=True)
class ThermalEnsemble:
    """Initial bath occupation f_n = exp(-beta E_n) / Z over the product basis."""

    f: np.ndarray
    partition: float

    def __post_init__(self):
        if abs(float(np.sum(self.f)) - 1.0) > 1e-9 or np.any(self.f < 0):
            raise ValueError("occupation weights must be a probability vector")


@dataclass
class TrajectoryOutcome:
    """One possible system wave-function with its probability.

    labels = (n_final, n_initial) are environment basis indices; None
    for analytically constructed outcomes.
    """

    phi: np.ndarray
    weight: float
    labels: tuple[int, int] | None = None


def spins_of_index(index: int, n: int) -> tuple[int, ...]:
    """Spin orientations (s_1 .. s_N) of env basis index; spin j at bit N - j."""
    return tuple(1 if ((index >> (n - j)) & 1) == 0 else -1 for j in range(1, n + 1))


def env_basis_state(params: ModelParams, index: int) -> EnvBasisState:
    n = params.n_env
    if not 0 <= index < 2**n:
        raise IndexError(f"basis index {index} outside 0..{2**n - 1}")
    spins = spins_of_index(index, n)
    return EnvBasisState(index, spins, params.mu * sum(spins))


def pattern_between(n_initial: int, n_final: int, n: int) -> FlipPattern:
    """Flip pattern d_j = s_j s'_j between two env basis indices."""
    xor = n_initial ^ n_final
    d = [(-1 if ((xor >> (n - j)) & 1) else 1) for j in range(1, n + 1)]
    return FlipPattern(d)


def _spin_sums(n: int) -> np.ndarray:
    """Sum of s_j over the bath for every env index."""
    idx = np.arange(2**n, dtype=np.int64)
    total = np.zeros(2**n, dtype=np.int64)
    for bit in range(n):
        total += (idx >> bit) & 1
    return (n - 2 * total).astype(float)


def build_hamiltonian(params: ModelParams, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Dense Hermitian H = H_E + V_SE on the documented product basis.

    H_E = mu * sum_j sz_j and V_SE = sz_S * sum_j (h_j sx_j + nu sz_j);
    the system's own Hamiltonian vanishes.  All entries are real, so the
    matrix is returned as float64 (real symmetric is Hermitian).
    """
    n = params.n_env
    if n > cap:
        raise EnvironmentTooLarge(
            f"N={n} exceeds cap {cap}; a dense universe needs ~{16 * 4 ** (n + 1) / 2 ** 30:.1f} GiB"
        )
    m = 2**n
    dim = 2 * m
    mu, nu = params.mu, params.nu
    sz = _spin_sums(n)

    h_mat = np.zeros((dim, dim))
    # Diagonal: branch up sees (mu + nu) sum sz_j, branch down (mu - nu).
    h_mat[np.arange(m), np.arange(m)] = (mu + nu) * sz
    h_mat[np.arange(m, dim), np.arange(m, dim)] = (mu - nu) * sz
    # Off-diagonal: sx_j flips bit N - j, with sign from sz_S.
    env = np.arange(m)
    for j in range(1, n + 1):
        partner = env ^ (1 << (n - j))
        hj = params.h[j - 1]
        h_mat[env, partner] += hj
        h_mat[m + env, m + partner] += -hj
    return h_mat


def thermal_ensemble(params: ModelParams) -> ThermalEnsemble:
    """Thermal bath occupation at inverse temperature params.beta."""
    energies = params.mu * _spin_sums(params.n_env)
    logw = -params.beta * energies
    shift = logw - np.max(logw)
    w = np.exp(shift)
    total = float(np.sum(w))
    log_z = float(np.max(logw) + np.log(total))
    with np.errstate(over="ignore"):
        partition = float(np.exp(log_z))
    return ThermalEnsemble(w / total, partition)


def _evolved_columns(
    params: ModelParams, alphas: SystemAmplitudes, t: float, cap: int
) -> np.ndarray:
    """exp(-i tau H) applied to |phi> x |n> for every env index n (as columns)."""
    tau = params.elapsed(t)
    h_mat = build_hamiltonian(params, cap)
    w, v = np.linalg.eigh(h_mat)
    propagator = (v * np.exp(-1j * tau * w)) @ v.conj().T
    m = 2 ** params.n_env
    psi0 = np.zeros((2 * m, m), dtype=complex)
    psi0[np.arange(m), np.arange(m)] = alphas.a_up
    psi0[m + np.arange(m), np.arange(m)] = alphas.a_down
    return propagator @ psi0


def trajectory_ensemble(
    params: ModelParams,
    alphas: SystemAmplitudes,
    ensemble: ThermalEnsemble,
    t: float,
    cap: int = DEFAULT_CAP,
) -> list[TrajectoryOutcome]:
    """All trajectory outcomes (n_final, n_initial) at time t.

    For each initial bath state n with f_n > 0 and each final n', the
    outcome state is the n'-component of the evolved universe vector,
    renormalized; its probability is f_n times the squared norm g.
    Outcomes with g below the squared propagator roundoff (~1e-24) are
    omitted: under exact arithmetic their probability is zero and their
    direction is pure numerical noise.  The listed weights still sum to
    one to the stated tolerance.
    """
    m = 2 ** params.n_env
    if ensemble.f.shape != (m,):
        raise ValueError("ensemble size does not match environment size")
    evolved = _evolved_columns(params, alphas, t, cap)
    up_block = evolved[:m, :]
    down_block = evolved[m:, :]
    g = np.abs(up_block) ** 2 + np.abs(down_block) ** 2
    outcomes: list[TrajectoryOutcome] = []
    for n_init in range(m):
        fn = float(ensemble.f[n_init])
        if fn == 0.0:
            continue
        for n_fin in range(m):
            gv = float(g[n_fin, n_init])
            if gv <= 1e-24:
                continue
            phi = np.array(
                [up_block[n_fin, n_init], down_block[n_fin, n_init]], dtype=complex
            ) / np.sqrt(gv)
            outcomes.append(TrajectoryOutcome(phi, fn * gv, (n_fin, n_init)))
    return outcomes


def reduced_density_check(
    outcomes: list[TrajectoryOutcome],
    params: ModelParams,
    alphas: SystemAmplitudes,
    ensemble: ThermalEnsemble,
    t: float,
    cap: int = DEFAULT_CAP,
) -> float:
    """Max elementwise gap between Tr_E rho(t) and sum of P |phi><phi|.

    The left side is a direct partial trace of the evolved universe
    density matrix; the right side resums the supplied outcomes.  The
    two agree to roundoff (contract: <= 1e-9).
    """
    m = 2 ** params.n_env
    evolved = _evolved_columns(params, alphas, t, cap)
    rho_traced = np.zeros((2, 2), dtype=complex)
    for n_init in range(m):
        fn = float(ensemble.f[n_init])
        if fn == 0.0:
            continue
        up = evolved[:m, n_init]
        down = evolved[m:, n_init]
        rho_traced[0, 0] += fn * np.vdot(up, up)
        rho_traced[0, 1] += fn * np.vdot(down, up)
        rho_traced[1, 0] += fn * np.vdot(up, down)
        rho_traced[1, 1] += fn * np.vdot(down, down)

    rho_ensemble = np.zeros((2, 2), dtype=complex)
    for out in outcomes:
        if out.phi.shape != (2,):
            raise ValueError("outcome states must be 2-component vectors")
        rho_ensemble += out.weight * np.outer(out.phi, out.phi.conj())
    return float(np.max(np.abs(rho_traced - rho_ensemble)))


def phase_distance(x: np.ndarray, y: np.ndarray) -> float:
    """Global-phase-invariant distance 1 - |<x|y>| between unit vectors."""
    return 1.0 - abs(np.vdot(x, y))

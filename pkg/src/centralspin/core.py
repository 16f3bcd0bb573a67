"""Central-spin model parameters and per-spin transition algebra.

The universe is one system spin-1/2 coupled to N environment spins-1/2.
The environment level splitting is mu, the longitudinal coupling is nu,
and spin j carries a vertical coupling h_j.  Energies are measured in
units of mu + nu, so both couplings are fixed by the single detuning
delta = mu - nu.  Conditioned on the system pointing up or down, the
j-th environment spin evolves under an effective 2x2 Hamiltonian

    up:    (mu + nu) sz + h_j sx  =        sz + h_j sx
    down:  (mu - nu) sz - h_j sx  =  delta sz - h_j sx

whose propagator matrix elements between initial and final spin
eigenstates are the per-spin transition amplitudes computed here.  With
omega = sqrt(a^2 + h^2) and ratio r = a^2 / omega^2 (a the sz
coefficient of the branch), the squared moduli are

    |G|^2 = cos^2(omega*tau) + r sin^2(omega*tau)   spin kept
    |G|^2 = (1 - r) sin^2(omega*tau)                spin flipped

and the two always sum to one.  Branch weights are products of N such
factors; at N = 80 raw products underflow float64, so all accumulation
happens in natural-log domain and exact zeros map to -inf.

Everything in this module is a pure function of immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

BRANCHES = ("up", "down")

NORM_TOL = 1e-12


class EnvironmentTooLarge(ValueError):
    """Exact construction refused beyond the configured environment-size cap."""


def dispersed_couplings(h: float, delta_h: float, n: int) -> tuple[float, ...]:
    """Vertical couplings spread over [h, h + delta_h): h_j = h + (j-1)*delta_h/n."""
    if n < 1:
        raise ValueError("need at least one environment spin")
    return tuple(h + (j - 1) * delta_h / n for j in range(1, n + 1))


@dataclass(frozen=True)
class ModelParams:
    """Immutable central-spin universe: detuning, couplings, bath size, temperature.

    delta is mu - nu with mu + nu = 1 enforced by construction, so
    mu = (1 + delta)/2 and nu = (1 - delta)/2.  beta is the inverse
    temperature of the initial bath ensemble and t0 the reference time
    from which elapsed times are measured.
    """

    delta: float
    h: tuple[float, ...]
    beta: float = 0.0
    t0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "h", tuple(float(x) for x in self.h))
        if len(self.h) < 1:
            raise ValueError("need at least one environment spin")
        for name in ("delta", "beta", "t0"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not all(math.isfinite(x) for x in self.h):
            raise ValueError("couplings must be finite")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")

    @property
    def n_env(self) -> int:
        return len(self.h)

    @property
    def mu(self) -> float:
        return (1.0 + self.delta) / 2.0

    @property
    def nu(self) -> float:
        return (1.0 - self.delta) / 2.0

    @property
    def h_array(self) -> np.ndarray:
        return np.asarray(self.h, dtype=float)

    def elapsed(self, t: float) -> float:
        tau = t - self.t0
        if tau < 0:
            raise ValueError(f"t={t} precedes the initial time t0={self.t0}")
        return tau


@dataclass(frozen=True)
class SystemAmplitudes:
    """Initial system state a_up|up> + a_down|down>, normalized to one."""

    a_up: complex
    a_down: complex

    def __post_init__(self):
        norm = abs(self.a_up) ** 2 + abs(self.a_down) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"amplitudes not normalized: |a|^2 = {norm}")

    @classmethod
    def from_up_weight(cls, w_up: float, phase: float = 0.0) -> "SystemAmplitudes":
        """State with |a_up|^2 = w_up and relative phase on the down amplitude."""
        if not 0.0 <= w_up <= 1.0:
            raise ValueError("up weight must lie in [0, 1]")
        return cls(math.sqrt(w_up), math.sqrt(1.0 - w_up) * complex(math.cos(phase), math.sin(phase)))

    @property
    def w_up(self) -> float:
        return abs(self.a_up) ** 2

    @property
    def w_down(self) -> float:
        return abs(self.a_down) ** 2

    def vector(self) -> np.ndarray:
        return np.array([self.a_up, self.a_down], dtype=complex)


@dataclass(frozen=True)
class SpinSpectral:
    """Frequency and kept-weight floor of one environment spin on one branch."""

    branch: str
    omega: float
    ratio: float


class FlipPattern:
    """Which environment spins differ between initial and final bath states.

    d[i] = +1 means spin j = i+1 kept its orientation, -1 means it
    flipped.  Squared per-spin amplitudes depend on the pattern only,
    never on the initial orientations themselves.
    """

    __slots__ = ("d",)

    def __init__(self, d: Iterable[int]):
        arr = np.asarray(list(d) if not isinstance(d, np.ndarray) else d, dtype=np.int8)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("pattern must be a non-empty 1-d sequence")
        if not np.all((arr == 1) | (arr == -1)):
            raise ValueError("pattern entries must be +1 or -1")
        self.d = arr

    def __len__(self) -> int:
        return self.d.size

    def __eq__(self, other) -> bool:
        return isinstance(other, FlipPattern) and np.array_equal(self.d, other.d)

    def __repr__(self) -> str:
        return f"FlipPattern({self.d.tolist()})"

    @property
    def flipped(self) -> np.ndarray:
        return self.d == -1

    @property
    def flip_count(self) -> int:
        return int(np.count_nonzero(self.d == -1))

    @classmethod
    def none(cls, n: int) -> "FlipPattern":
        return cls(np.ones(n, dtype=np.int8))

    @classmethod
    def from_code(cls, code: int, n: int) -> "FlipPattern":
        """Bit i of ``code`` set means spin j = i+1 flipped."""
        bits = (code >> np.arange(n)) & 1
        return cls(np.where(bits == 1, -1, 1).astype(np.int8))

    def code(self) -> int:
        return int(np.sum((self.d == -1) * (1 << np.arange(len(self)))))


def branch_axis(params: ModelParams, branch: str) -> tuple[float, float]:
    """(sz coefficient, sign of the sx coefficient) of the branch Hamiltonian."""
    if branch == "up":
        return params.mu + params.nu, 1.0
    if branch == "down":
        return params.mu - params.nu, -1.0
    raise ValueError(f"branch must be 'up' or 'down', got {branch!r}")


def spin_spectral(params: ModelParams, branch: str, j: int) -> SpinSpectral:
    """Frequency omega and ratio r of environment spin j (1-based) on a branch.

    omega = sqrt(a^2 + h_j^2), r = a^2 / omega^2 with a = 1 on the up
    branch and a = delta on the down branch.  r * omega^2 equals the
    squared sz coefficient.  When omega = 0 (delta = 0 and h_j = 0 on
    the down branch) the spin cannot flip at all; r is set to 1 by
    convention so the kept weight stays exactly 1.
    """
    if not 1 <= j <= params.n_env:
        raise IndexError(f"spin index {j} outside 1..{params.n_env}")
    a, _ = branch_axis(params, branch)
    hj = params.h[j - 1]
    omega = math.hypot(a, hj)
    ratio = (a / omega) ** 2 if omega > 0.0 else 1.0
    return SpinSpectral(branch, omega, ratio)


def spin_amplitude(
    params: ModelParams, branch: str, j: int, t: float, s: int, flipped: bool
) -> complex:
    """Exact propagator matrix element <s'| exp(-i tau (a sz + b sx)) |s>.

    s is the initial orientation (+1/-1) of spin j; the final one is s
    or -s according to ``flipped``.  From
    exp(-i tau (a sz + b sx)) = cos(w tau) I - i sin(w tau)(a sz + b sx)/w
    with w = sqrt(a^2 + b^2):

        kept:    cos(w tau) - i (a s / w) sin(w tau)
        flipped: -i (b / w) sin(w tau)
    """
    if s not in (1, -1):
        raise ValueError("initial spin must be +1 or -1")
    if not 1 <= j <= params.n_env:
        raise IndexError(f"spin index {j} outside 1..{params.n_env}")
    tau = params.elapsed(t)
    a, b_sign = branch_axis(params, branch)
    b = b_sign * params.h[j - 1]
    omega = math.hypot(a, b)
    if omega == 0.0:
        return 0.0 + 0.0j if flipped else 1.0 + 0.0j
    c, sn = math.cos(omega * tau), math.sin(omega * tau)
    if flipped:
        return complex(0.0, -b * sn / omega)
    return complex(c, -a * s * sn / omega)


class FlipProfile(NamedTuple):
    """Per-spin kept/flipped squared amplitudes of one branch, linear and log."""

    keep: np.ndarray
    flip: np.ndarray
    log_keep: np.ndarray
    log_flip: np.ndarray


def branch_flip_profile(params: ModelParams, branch: str, t: float) -> FlipProfile:
    """Squared per-spin amplitudes of a branch at elapsed time t - t0.

    keep[i] + flip[i] = 1 to a few ulp for every spin (asserted at
    1e-12 in the tests); logs of exact zeros are -inf.
    """
    tau = params.elapsed(t)
    a, _ = branch_axis(params, branch)
    h = params.h_array
    omega = np.hypot(a, h)
    arg = omega * tau
    s2 = np.sin(arg) ** 2
    c2 = np.cos(arg) ** 2
    # omega == 0 only when a == h_j == 0: that spin is frozen (keep 1, flip 0).
    safe = np.where(omega > 0.0, omega, 1.0)
    ratio = np.where(omega > 0.0, (a / safe) ** 2, 1.0)
    one_minus = np.where(omega > 0.0, (h / safe) ** 2, 0.0)
    keep = c2 + ratio * s2
    flip = one_minus * s2
    with np.errstate(divide="ignore"):
        return FlipProfile(keep, flip, np.log(keep), np.log(flip))


def log_branch_weight(params: ModelParams, branch: str, t: float, pattern: FlipPattern) -> float:
    """Natural log of the branch weight: sum over spins of log |G_j|^2.

    Depends on the flip pattern only (not on initial orientations);
    exactly -inf when any factor vanishes.
    """
    if len(pattern) != params.n_env:
        raise ValueError("pattern length does not match environment size")
    prof = branch_flip_profile(params, branch, t)
    terms = np.where(pattern.flipped, prof.log_flip, prof.log_keep)
    return float(np.sum(terms))

"""Constructors for the input and reference states of the protocol:
two-mode squeezed vacuum, coherent states, cat states, and two-mode
entangled coherent states (ECS).

Each factory renormalizes within the truncation and records the probability
mass the cutoff discarded as ``tail_mass`` on the returned state; a tail above
``TAIL_WARN`` additionally triggers a warning so that silently unconverged
cutoffs do not propagate into sweeps.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .fock import PureState, TruncationSpec

TAIL_WARN = 1e-6
DEGENERATE_ATOL = 1e-12


@dataclass(frozen=True)
class SqueezingSpec:
    """Squeezed pair source parametrized by r = tanh(xi), |r| < 1."""

    r: complex

    def __post_init__(self) -> None:
        if abs(self.r) >= 1.0:
            raise ValueError(f"|r| must be < 1, got {abs(self.r):.6g}")


@dataclass(frozen=True)
class CatSpec:
    """Coherent-state superposition eps_plus |beta> + eps_minus |-beta>
    (normalization handled by the factory)."""

    beta: complex
    eps_plus: complex
    eps_minus: complex

    @property
    def c_overlap(self) -> float:
        """Overlap <beta|-beta> = exp(-2 |beta|^2); real for any complex beta."""
        return math.exp(-2.0 * abs(self.beta) ** 2)

    @property
    def norm0(self) -> float:
        """Squared norm of the unnormalized superposition."""
        val = (
            abs(self.eps_plus) ** 2
            + abs(self.eps_minus) ** 2
            + 2.0 * self.c_overlap * (self.eps_plus.conjugate() * self.eps_minus).real
        )
        return float(val)


@dataclass(frozen=True)
class ECSSpec:
    """Two-mode entangled coherent state N (|a,a> +/- |-a,-a>)."""

    alpha: complex
    parity: Literal["even", "odd"]

    def __post_init__(self) -> None:
        if self.parity not in ("even", "odd"):
            raise ValueError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        if self.norm_squared_raw <= DEGENERATE_ATOL:
            raise ValueError("odd ECS with alpha = 0 is the zero vector")

    @property
    def norm_squared_raw(self) -> float:
        """Squared norm of |a,a> +/- |-a,-a> before normalization."""
        sign = 1.0 if self.parity == "even" else -1.0
        return 2.0 * (1.0 + sign * math.exp(-4.0 * abs(self.alpha) ** 2))

    @property
    def norm_constant(self) -> float:
        """Prefactor N = 1 / sqrt(2 (1 +/- exp(-4 |alpha|^2)))."""
        return 1.0 / math.sqrt(self.norm_squared_raw)


def coherent_amplitudes(gamma: complex, n_max: int) -> np.ndarray:
    """Exact coherent amplitudes e^{-|g|^2/2} g^n / sqrt(n!) up to the cutoff."""
    amps = np.zeros(n_max + 1, dtype=np.complex128)
    amps[0] = math.exp(-0.5 * abs(gamma) ** 2)
    for n in range(1, n_max + 1):
        amps[n] = amps[n - 1] * gamma / math.sqrt(n)
    return amps


def _warn_tail(tail: float, label: str) -> None:
    if tail > TAIL_WARN:
        warnings.warn(
            f"{label}: cutoff discards probability {tail:.3g}; consider a larger n_max",
            stacklevel=3,
        )


def make_tmsvs(sq: SqueezingSpec, trunc: TruncationSpec) -> PureState:
    """Two-mode squeezed vacuum sqrt(1-|r|^2) sum_n r^n |n,n>, renormalized
    within the cutoff.  The reduced single-mode state is thermal with
    weights (1-|r|^2) |r|^(2n)."""
    r = complex(sq.r)
    d = trunc.dim
    amps = np.zeros((d, d), dtype=np.complex128)
    scale = math.sqrt(1.0 - abs(r) ** 2)
    amps[np.arange(d), np.arange(d)] = scale * r ** np.arange(d)
    tail = abs(r) ** (2 * (trunc.n_max + 1))
    _warn_tail(tail, "make_tmsvs")
    norm = np.linalg.norm(amps)
    return PureState(trunc, 2, amps / norm, tail)


def make_coherent(gamma: complex, trunc: TruncationSpec) -> PureState:
    """Truncated coherent state |gamma>, renormalized within the cutoff."""
    amps = coherent_amplitudes(gamma, trunc.n_max)
    kept = float(np.linalg.norm(amps)) ** 2
    tail = max(0.0, 1.0 - kept)
    _warn_tail(tail, "make_coherent")
    return PureState(trunc, 1, amps / math.sqrt(kept), tail)


def make_cat(spec: CatSpec, trunc: TruncationSpec) -> PureState:
    """Normalized cat state (eps_plus |beta> + eps_minus |-beta>) / sqrt(N0).

    Raises for degenerate superpositions (N0 <= 1e-12), e.g. the odd
    combination at beta = 0.
    """
    n0 = spec.norm0
    if n0 <= DEGENERATE_ATOL:
        raise ValueError(
            f"cat state with beta={spec.beta}, eps=({spec.eps_plus}, {spec.eps_minus}) "
            "is degenerate (zero norm)"
        )
    raw = spec.eps_plus * coherent_amplitudes(spec.beta, trunc.n_max) + (
        spec.eps_minus * coherent_amplitudes(-spec.beta, trunc.n_max)
    )
    kept = float(np.linalg.norm(raw)) ** 2
    tail = max(0.0, 1.0 - kept / n0)
    _warn_tail(tail, "make_cat")
    return PureState(trunc, 1, raw / np.linalg.norm(raw), tail)


def six_cat_states(beta: complex) -> list[CatSpec]:
    """The six reference superpositions used for teleportation benchmarks,
    the coherent-superposition analogue of the six qubit axis states:
    (1,0), (0,1), and (1, s)/sqrt(2) for s in {1, -1, i, -i}."""
    s = 1.0 / math.sqrt(2.0)
    pairs = [
        (1.0, 0.0),
        (0.0, 1.0),
        (s, s),
        (s, -s),
        (s, 1j * s),
        (s, -1j * s),
    ]
    return [CatSpec(beta, ep, em) for ep, em in pairs]


def make_ecs(spec: ECSSpec, trunc: TruncationSpec) -> PureState:
    """Two-mode ECS with even (+) or odd (-) relative sign, renormalized
    within the cutoff.  The odd state has exactly zero weight on even total
    photon number (and vice versa)."""
    sign = 1.0 if spec.parity == "even" else -1.0
    a = coherent_amplitudes(spec.alpha, trunc.n_max)
    b = coherent_amplitudes(-spec.alpha, trunc.n_max)
    raw = np.outer(a, a) + sign * np.outer(b, b)
    kept = float(np.linalg.norm(raw)) ** 2
    tail = max(0.0, 1.0 - kept / spec.norm_squared_raw)
    _warn_tail(tail, "make_ecs")
    return PureState(trunc, 2, raw / np.linalg.norm(raw), tail)

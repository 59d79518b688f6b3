"""Multimode truncated Fock spaces: states, density operators, and the
algebraic primitives everything else is built on.

Every mode shares one per-mode photon cutoff ``n_max``.  A multimode ket is a
complex tensor with one axis of length ``n_max + 1`` per mode; a density
operator is the corresponding ``D x D`` matrix with
``D = (n_max + 1) ** num_modes`` and mode 0 as the slowest axis (C order).

Heralded measurement branches are carried around as *unnormalized* operators
whose trace is the branch probability, so ``trace < 1`` is legitimate and
expected.  Values are treated as immutable after construction; the wrapped
arrays are marked read-only to make accidental mutation loud.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

HERMITICITY_ATOL = 1e-10
NORM_ATOL = 1e-9
ZERO_PROBABILITY_ATOL = 1e-14


class TruncationMismatchError(ValueError):
    """Operands live in Fock spaces with different cutoffs or mode counts."""


class ZeroProbabilityError(ValueError):
    """A heralded branch carries numerically zero probability."""


class TruncationLeakageError(ValueError):
    """An operation would push photon-number weight past the cutoff."""


@dataclass(frozen=True)
class TruncationSpec:
    """Per-mode photon-number cutoff; kept photon numbers are 0..n_max."""

    n_max: int

    def __post_init__(self) -> None:
        if not isinstance(self.n_max, int) or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")

    @property
    def dim(self) -> int:
        return self.n_max + 1


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr, dtype=np.complex128)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class PureState:
    """Multimode ket.

    ``amplitudes`` has shape ``(dim,) * num_modes``.  ``tail_mass`` records the
    probability a constructor discarded at the cutoff (before its internal
    renormalization); operations that merely rearrange amplitudes carry it
    through unchanged.
    """

    truncation: TruncationSpec
    num_modes: int
    amplitudes: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self) -> None:
        if self.num_modes < 1:
            raise ValueError("num_modes must be >= 1")
        want = (self.truncation.dim,) * self.num_modes
        arr = np.asarray(self.amplitudes)
        if arr.shape != want:
            raise ValueError(f"amplitude tensor has shape {arr.shape}, expected {want}")
        object.__setattr__(self, "amplitudes", _freeze(arr))
        if self.norm() > 1.0 + NORM_ATOL:
            raise ValueError(f"state norm {self.norm():.6g} exceeds 1")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "PureState":
        n = self.norm()
        if n <= ZERO_PROBABILITY_ATOL:
            raise ZeroProbabilityError("cannot normalize a zero ket")
        return PureState(self.truncation, self.num_modes, self.amplitudes / n, self.tail_mass)

    def projector(self) -> "DensityOperator":
        """|psi><psi| as a density operator (unnormalized if the ket is)."""
        v = self.amplitudes.reshape(-1)
        return DensityOperator(self.truncation, self.num_modes, np.outer(v, v.conj()), self.tail_mass)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Multimode density operator stored as a dense ``D x D`` matrix.

    Construction checks Hermiticity (within 1e-10) and that the trace is real
    and non-negative.  Trace <= 1 is an invariant of the protocol pipeline and
    is asserted by the tests on pipeline outputs rather than enforced here,
    so that caller-scaled operators remain representable.
    """

    truncation: TruncationSpec
    num_modes: int
    matrix: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self) -> None:
        if self.num_modes < 1:
            raise ValueError("num_modes must be >= 1")
        d = self.truncation.dim ** self.num_modes
        arr = np.asarray(self.matrix)
        if arr.shape != (d, d):
            raise ValueError(f"density matrix has shape {arr.shape}, expected {(d, d)}")
        dev = np.abs(arr - arr.conj().T).max()
        if dev > HERMITICITY_ATOL:
            raise ValueError(f"matrix is not Hermitian: max |M - M^dag| = {dev:.3g}")
        tr = np.trace(arr)
        if abs(tr.imag) > HERMITICITY_ATOL or tr.real < -1e-12:
            raise ValueError(f"trace {tr} is not a probability weight")
        object.__setattr__(self, "matrix", _freeze(arr))

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def tensor(self) -> np.ndarray:
        """View of the matrix as a tensor with one ket and one bra axis per mode."""
        d = self.truncation.dim
        return self.matrix.reshape((d,) * (2 * self.num_modes))


State = Union[PureState, DensityOperator]


def _check_same_space(a: State, b: State) -> None:
    if a.truncation != b.truncation:
        raise TruncationMismatchError(
            f"cutoffs differ: n_max={a.truncation.n_max} vs {b.truncation.n_max}"
        )


def fock_state(trunc: TruncationSpec, occupations: Sequence[int]) -> PureState:
    """Product Fock state |n_0, n_1, ...>."""
    occ = list(occupations)
    if not occ:
        raise ValueError("need at least one mode")
    for n in occ:
        if not 0 <= n <= trunc.n_max:
            raise ValueError(f"occupation {n} outside 0..{trunc.n_max}")
    amps = np.zeros((trunc.dim,) * len(occ), dtype=np.complex128)
    amps[tuple(occ)] = 1.0
    return PureState(trunc, len(occ), amps)


def vacuum_state(trunc: TruncationSpec, num_modes: int) -> PureState:
    return fock_state(trunc, [0] * num_modes)


def tensor_product(a: State, b: State) -> State:
    """Tensor product of two states of the same kind, a's modes first."""
    _check_same_space(a, b)
    tail = max(a.tail_mass, b.tail_mass)
    if isinstance(a, PureState) and isinstance(b, PureState):
        amps = np.tensordot(a.amplitudes, b.amplitudes, axes=0)
        return PureState(a.truncation, a.num_modes + b.num_modes, amps, tail)
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        d = a.truncation.dim
        m = a.num_modes + b.num_modes
        t = np.tensordot(a.tensor(), b.tensor(), axes=0)
        # a-ket, a-bra, b-ket, b-bra -> (a-ket, b-ket, a-bra, b-bra)
        ka, mb = a.num_modes, b.num_modes
        perm = (
            list(range(ka))
            + [2 * ka + i for i in range(mb)]
            + [ka + i for i in range(ka)]
            + [2 * ka + mb + i for i in range(mb)]
        )
        mat = t.transpose(perm).reshape(d**m, d**m)
        return DensityOperator(a.truncation, m, mat, tail)
    raise TypeError("tensor_product needs two PureStates or two DensityOperators")


def partial_trace(rho: DensityOperator, modes_to_trace: Iterable[int]) -> DensityOperator:
    """Trace out the given modes, keeping the remaining ones in order."""
    drop = sorted(set(modes_to_trace))
    m = rho.num_modes
    if not drop:
        raise ValueError("no modes to trace")
    if any(i < 0 or i >= m for i in drop):
        raise ValueError(f"mode index outside 0..{m - 1}")
    if len(drop) == m:
        raise ValueError("tracing out every mode leaves no operator")
    keep = [i for i in range(m) if i not in drop]
    t = rho.tensor()
    # a traced mode's ket and bra axes share one label so einsum contracts them
    idx = list(range(m)) + [i if i in drop else m + i for i in range(m)]
    out_idx = keep + [m + i for i in keep]
    d = rho.truncation.dim
    mat = np.einsum(t, idx, out_idx).reshape(d ** len(keep), d ** len(keep))
    return DensityOperator(rho.truncation, len(keep), mat, rho.tail_mass)


def fock_project(rho: DensityOperator, mode: int, n: int) -> DensityOperator:
    """Project one mode onto |n><n| and drop it; the result is unnormalized
    with trace equal to the outcome probability."""
    m = rho.num_modes
    if not 0 <= mode < m:
        raise ValueError(f"mode index {mode} outside 0..{m - 1}")
    if not 0 <= n <= rho.truncation.n_max:
        raise ValueError(f"photon count {n} outside 0..{rho.truncation.n_max}")
    if m == 1:
        raise ValueError("projecting the only mode leaves no operator; read the matrix element directly")
    t = rho.tensor()
    t = np.take(t, n, axis=mode)
    t = np.take(t, n, axis=m - 1 + mode)  # bra axis, shifted by the first take
    d = rho.truncation.dim
    return DensityOperator(rho.truncation, m - 1, t.reshape(d ** (m - 1), d ** (m - 1)), rho.tail_mass)


def fidelity(psi: PureState, rho: DensityOperator) -> float:
    """<psi|rho|psi> for a normalized ket and a normalized density operator."""
    _check_same_space(psi, rho)
    if psi.num_modes != rho.num_modes:
        raise TruncationMismatchError("mode counts differ")
    if abs(psi.norm() - 1.0) > NORM_ATOL:
        raise ValueError(f"ket norm {psi.norm():.6g} is not 1")
    if abs(rho.trace() - 1.0) > NORM_ATOL:
        raise ValueError(f"operator trace {rho.trace():.6g} is not 1")
    v = psi.amplitudes.reshape(-1)
    val = complex(v.conj() @ (rho.matrix @ v))
    if abs(val.imag) > 1e-9:
        raise ValueError(f"fidelity has imaginary residue {val.imag:.3g}")
    return float(min(1.0, max(0.0, val.real)))


def purity(rho: DensityOperator) -> float:
    """Tr(rho^2) of a normalized density operator."""
    if abs(rho.trace() - 1.0) > NORM_ATOL:
        raise ValueError(f"operator trace {rho.trace():.6g} is not 1")
    p = float(np.vdot(rho.matrix, rho.matrix).real)  # == Tr(rho^dag rho) == Tr(rho^2)
    return min(1.0, max(0.0, p))


def normalize(rho: DensityOperator) -> tuple[DensityOperator, float]:
    """Split an unnormalized branch into (normalized operator, branch weight)."""
    tr = rho.trace()
    if tr <= ZERO_PROBABILITY_ATOL:
        raise ZeroProbabilityError(f"branch weight {tr:.3g} is numerically zero")
    return DensityOperator(rho.truncation, rho.num_modes, rho.matrix / tr, rho.tail_mass), tr


def embed(state: State, trunc: TruncationSpec) -> State:
    """Zero-pad a state into a space with a larger cutoff."""
    d_old = state.truncation.dim
    d_new = trunc.dim
    if d_new < d_old:
        raise ValueError("embed target must not shrink the cutoff; use restrict")
    m = state.num_modes
    if isinstance(state, PureState):
        out = np.zeros((d_new,) * m, dtype=np.complex128)
        out[(slice(0, d_old),) * m] = state.amplitudes
        return PureState(trunc, m, out, state.tail_mass)
    out = np.zeros((d_new,) * (2 * m), dtype=np.complex128)
    out[(slice(0, d_old),) * (2 * m)] = state.tensor()
    return DensityOperator(trunc, m, out.reshape(d_new**m, d_new**m), state.tail_mass)


def restrict(state: State, trunc: TruncationSpec, atol: float = 1e-10) -> State:
    """Drop components above a smaller cutoff, refusing to discard real weight.

    The discarded amplitudes (or matrix entries) must all be below ``atol``;
    use this to undo a headroom embed, not to truncate a physical tail.
    """
    d_old = state.truncation.dim
    d_new = trunc.dim
    if d_new > d_old:
        raise ValueError("restrict target must not grow the cutoff; use embed")
    m = state.num_modes
    if isinstance(state, PureState):
        kept = state.amplitudes[(slice(0, d_new),) * m]
        dropped = state.norm() ** 2 - float(np.linalg.norm(kept)) ** 2
        if dropped > atol:
            raise TruncationLeakageError(f"restrict would discard weight {dropped:.3g}")
        return PureState(trunc, m, kept, state.tail_mass)
    t = state.tensor()
    kept = t[(slice(0, d_new),) * (2 * m)]
    mask = np.ones(t.shape, dtype=bool)
    mask[(slice(0, d_new),) * (2 * m)] = False
    worst = np.abs(t[mask]).max() if mask.any() else 0.0
    if worst > atol:
        raise TruncationLeakageError(f"restrict would discard entries up to {worst:.3g}")
    return DensityOperator(trunc, m, kept.reshape(d_new**m, d_new**m), state.tail_mass)

"""Passive linear optics on truncated Fock spaces, plus photon loss.

Mode-space unitaries act on creation operators as a_i^dag -> sum_j U[j,i] a_j^dag
and are lifted to Fock space sector by sector: each populated input component
|n_1..n_m> is expanded through the multinomial action of U on the creation
operators.  Passive optics conserves total photon number, so components whose
total stays within the cutoff transform exactly; populated components that
would spill past the cutoff raise ``TruncationLeakageError`` instead of being
silently clipped.

The beam splitter convention used everywhere (couplers, loss ancillas, the
teleportation mixer) carries the i phase on the cross term:

    [[sqrt(t), i*sqrt(1-t)], [i*sqrt(1-t), sqrt(t)]]
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import comb

from .fock import (
    DensityOperator,
    PureState,
    State,
    TruncationLeakageError,
    TruncationSpec,
    partial_trace,
    tensor_product,
    vacuum_state,
)

UNITARITY_ATOL = 1e-12
LEAK_ATOL = 1e-14


@dataclass(frozen=True, eq=False)
class ModeUnitary:
    """A d x d unitary acting on the mode (waveguide) space."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        if arr.shape != (self.dim, self.dim):
            raise ValueError(f"matrix shape {arr.shape} does not match dim {self.dim}")
        dev = np.abs(arr @ arr.conj().T - np.eye(self.dim)).max()
        if dev > UNITARITY_ATOL:
            raise ValueError(f"matrix is not unitary: max |U U^dag - I| = {dev:.3g}")
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)


@dataclass(frozen=True)
class LossSpec:
    """Beam-splitter style transmission eta; eta = 1 is lossless."""

    eta: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")


@dataclass(frozen=True)
class TrimerConfig:
    """Planar three-waveguide coupler: coupling kappa, propagation length z."""

    kappa: float = 1.0
    z: float = 0.0

    def __post_init__(self) -> None:
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.z < 0:
            raise ValueError("z must be non-negative")

    @property
    def theta(self) -> float:
        """Accumulated coupling angle sqrt(2) * kappa * z."""
        return math.sqrt(2.0) * self.kappa * self.z


def beamsplitter_unitary(t: float) -> ModeUnitary:
    """Two-mode coupler of transmission t with the i cross phase."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"transmission must lie in [0, 1], got {t}")
    c = math.sqrt(t)
    s = 1j * math.sqrt(1.0 - t)
    return ModeUnitary(2, np.array([[c, s], [s, c]]))


def trimer_unitary(cfg: TrimerConfig) -> ModeUnitary:
    """Mode matrix of the symmetric waveguide trimer after propagation z.

    With Theta = sqrt(2) kappa z the nearest-neighbour coupled trimer gives

        [[(1+cos Theta)/2, -i sin(Theta)/sqrt(2), (cos Theta - 1)/2],
         [-i sin(Theta)/sqrt(2), cos Theta, -i sin(Theta)/sqrt(2)],
         [(cos Theta - 1)/2, -i sin(Theta)/sqrt(2), (1+cos Theta)/2]]
    """
    th = cfg.theta
    c, s = math.cos(th), math.sin(th)
    off = -1j * s / math.sqrt(2.0)
    u = np.array(
        [
            [(1.0 + c) / 2.0, off, (c - 1.0) / 2.0],
            [off, c, off],
            [(c - 1.0) / 2.0, off, (1.0 + c) / 2.0],
        ]
    )
    return ModeUnitary(3, u)


def _raise_op(tensor: np.ndarray, axis: int) -> np.ndarray:
    """Apply the creation operator along one tensor axis."""
    out = np.zeros_like(tensor)
    d = tensor.shape[axis]
    src = [slice(None)] * tensor.ndim
    dst = [slice(None)] * tensor.ndim
    src[axis] = slice(0, d - 1)
    dst[axis] = slice(1, d)
    factors = np.sqrt(np.arange(1, d, dtype=np.float64))
    shape = [1] * tensor.ndim
    shape[axis] = d - 1
    out[tuple(dst)] = tensor[tuple(src)] * factors.reshape(shape)
    return out


def apply_creation_combo(tensor: np.ndarray, coeffs: Sequence[complex]) -> np.ndarray:
    """Apply sum_j coeffs[j] a_j^dag to an amplitude tensor."""
    out = np.zeros_like(tensor)
    for j, c in enumerate(coeffs):
        if c != 0:
            out += c * _raise_op(tensor, j)
    return out


def _build_lift(u: np.ndarray, dims_in: tuple[int, ...], dims_out: tuple[int, ...]) -> np.ndarray:
    """Fock-space lift of a mode unitary as a matrix (prod(dims_out), prod(dims_in)).

    Column for input component |n_1..n_m> is prod_i (sum_j U[j,i] a_j^dag)^{n_i}
    / sqrt(prod n_i!) applied to vacuum, built incrementally from the column of
    a predecessor with one photon fewer.  Output components beyond ``dims_out``
    are dropped; callers must size ``dims_out`` (or pre-check populated input
    totals) so that nothing reachable is lost.
    """
    m = len(dims_in)
    di = int(np.prod(dims_in))
    do = int(np.prod(dims_out))
    cols = np.zeros((di,) + dims_out, dtype=np.complex128)
    vac = np.zeros(dims_out, dtype=np.complex128)
    vac[(0,) * m] = 1.0
    cols[0] = vac
    strides = [int(np.prod(dims_in[i + 1 :])) for i in range(m)]
    for flat, n_tuple in enumerate(np.ndindex(*dims_in)):
        if flat == 0:
            continue
        axis = max(i for i, n in enumerate(n_tuple) if n > 0)
        prev = flat - strides[axis]
        cols[flat] = apply_creation_combo(cols[prev], u[:, axis]) / math.sqrt(n_tuple[axis])
    return cols.reshape(di, do).T.copy()


@lru_cache(maxsize=64)
def _cached_lift(u_bytes: bytes, dim: int, dims_in: tuple[int, ...], dims_out: tuple[int, ...]) -> np.ndarray:
    u = np.frombuffer(u_bytes, dtype=np.complex128).reshape(dim, dim)
    lift = _build_lift(u, dims_in, dims_out)
    lift.setflags(write=False)
    return lift


def fock_lift(u: ModeUnitary, dims_in: tuple[int, ...], dims_out: tuple[int, ...]) -> np.ndarray:
    """Cached Fock lift; see ``_build_lift`` for the column construction."""
    if len(dims_in) != u.dim or len(dims_out) != u.dim:
        raise ValueError("one per-mode dimension required per unitary port")
    return _cached_lift(u.matrix.tobytes(), u.dim, tuple(dims_in), tuple(dims_out))


def _check_leakage(state: State, modes: Sequence[int]) -> None:
    """Refuse populated components whose total photons on the acted modes
    exceed the cutoff (they could not be transformed exactly)."""
    trunc = state.truncation
    d = trunc.dim
    m = state.num_modes
    totals = np.zeros((d,) * m, dtype=np.int64)
    grid = np.indices((d,) * m)
    for mode in modes:
        totals += grid[mode]
    bad = totals > trunc.n_max
    if not bad.any():
        return
    if isinstance(state, PureState):
        worst = np.abs(state.amplitudes[bad]).max()
    else:
        t = state.tensor()
        flat_bad = bad.reshape(-1)
        mat = np.abs(t.reshape(d**m, d**m))
        worst = max(mat[flat_bad, :].max(initial=0.0), mat[:, flat_bad].max(initial=0.0))
    if worst > LEAK_ATOL:
        raise TruncationLeakageError(
            f"components with more than n_max={trunc.n_max} photons on modes "
            f"{tuple(modes)} are populated (max weight {worst:.3g}); "
            "rebuild the state with more headroom"
        )


def apply_mode_unitary(state: State, u: ModeUnitary, modes: Sequence[int]) -> State:
    """Apply a mode unitary to the given modes of a pure state or density operator."""
    modes = list(modes)
    if len(modes) != u.dim:
        raise ValueError(f"unitary has {u.dim} ports but {len(modes)} modes were given")
    if len(set(modes)) != len(modes):
        raise ValueError("mode indices must be distinct")
    m = state.num_modes
    if any(i < 0 or i >= m for i in modes):
        raise ValueError(f"mode index outside 0..{m - 1}")
    _check_leakage(state, modes)
    d = state.truncation.dim
    dims = (d,) * u.dim
    lift = fock_lift(u, dims, dims)
    da = d ** u.dim
    rest = [i for i in range(m) if i not in modes]
    if isinstance(state, PureState):
        t = state.amplitudes.transpose(modes + rest).reshape(da, -1)
        out = (lift @ t).reshape(dims + (d,) * len(rest))
        inv = np.argsort(modes + rest)
        out = out.transpose(inv)
        return PureState(state.truncation, m, out, state.tail_mass)
    ket = modes + rest
    bra = [m + i for i in ket]
    t = state.tensor().transpose(ket + bra).reshape(da, d ** len(rest), da, d ** len(rest))
    out = np.einsum("xa,aibj,yb->xiyj", lift, t, lift.conj(), optimize=True)
    out = out.reshape(dims + (d,) * len(rest) + dims + (d,) * len(rest))
    inv = np.argsort(ket + bra)
    out = out.transpose(inv).reshape(d**m, d**m)
    return DensityOperator(state.truncation, m, out, state.tail_mass)


def apply_loss_kraus(rho: DensityOperator, mode: int, loss: LossSpec) -> DensityOperator:
    """Pure-loss channel of transmission eta on one mode, summed over Kraus rank.

    |n><n'| -> sum_k sqrt(C(n,k) C(n',k)) eta^((n+n'-2k)/2) (1-eta)^k |n-k><n'-k|

    Trace is preserved exactly and photon numbers only decrease, so no
    truncation headroom is needed.
    """
    m = rho.num_modes
    if not 0 <= mode < m:
        raise ValueError(f"mode index {mode} outside 0..{m - 1}")
    d = rho.truncation.dim
    eta = loss.eta
    t = np.moveaxis(rho.tensor(), (mode, m + mode), (0, 1))
    out = np.zeros_like(t)
    n = np.arange(d, dtype=np.float64)
    for k in range(d):
        # only n, n' >= k survive, so restrict before forming the powers
        nk = n[k:]
        coeff = np.sqrt(comb(nk, k)[:, None] * comb(nk, k)[None, :])
        coeff = coeff * eta ** ((nk[:, None] + nk[None, :] - 2.0 * k) / 2.0) * (1.0 - eta) ** k
        out[: d - k, : d - k] += t[k:, k:] * coeff.reshape((d - k, d - k) + (1,) * (t.ndim - 2))
    out = np.moveaxis(out, (0, 1), (mode, m + mode))
    return DensityOperator(rho.truncation, m, out.reshape(d**m, d**m), rho.tail_mass)


def apply_loss_ancilla(rho: DensityOperator, mode: int, loss: LossSpec) -> DensityOperator:
    """Same channel realized physically: couple to a vacuum ancilla on a
    beam splitter of transmission eta and trace the ancilla out."""
    m = rho.num_modes
    if not 0 <= mode < m:
        raise ValueError(f"mode index {mode} outside 0..{m - 1}")
    anc = vacuum_state(rho.truncation, 1).projector()
    joint = tensor_product(rho, anc)
    mixed = apply_mode_unitary(joint, beamsplitter_unitary(loss.eta), [mode, m])
    return partial_trace(mixed, [m])

"""Cross-check the two independent routes to the heralded state: term-by-term
propagation of the squeezed pairs through the trimer versus the summed
closed-form series, with and without loss.  The two implementations share no
code beyond the coupler matrix, so agreement at machine precision is a real
check, and the closed form is much cheaper at small cutoffs.

Run from the repo root:  python3 demos/04_closed_form_crosscheck.py
"""

import time

import numpy as np

from quasiecs.fock import TruncationSpec, normalize
from quasiecs.linear_optics import LossSpec, TrimerConfig
from quasiecs.protocol import (
    GenerationConfig,
    closed_form_rho_lossy,
    closed_form_rho_sub,
    distribute,
    generate_quasi_ecs,
)
from quasiecs.states import SqueezingSpec

trunc = TruncationSpec(10)

print("subtracted state, both routes:")
for r, z, n_sub in ((0.2, 1.25, 1), (0.4, 1.25, 1), (0.2, 0.7, 2), (0.5, 1.8, 1)):
    cfg = GenerationConfig(SqueezingSpec(r), TrimerConfig(1.0, z), n_sub)

    t0 = time.perf_counter()
    rho, p = generate_quasi_ecs(cfg, trunc)
    t_prop = time.perf_counter() - t0

    t0 = time.perf_counter()
    branch = closed_form_rho_sub(cfg, trunc)
    t_closed = time.perf_counter() - t0

    closed, p_closed = normalize(branch)
    dev = np.abs(closed.matrix - rho.matrix).max()
    print(
        f"  r={r:.1f} z={z:.2f} N={n_sub}: |rho difference| = {dev:.2e}, "
        f"|p difference| = {abs(p - p_closed):.2e} "
        f"({t_prop * 1e3:.1f} ms propagated, {t_closed * 1e3:.1f} ms closed)"
    )

print("\nlossy state, joint binomial sums vs channel-by-channel Kraus:")
cfg = GenerationConfig(SqueezingSpec(0.3), TrimerConfig(1.0, 1.25), 1)
base = closed_form_rho_sub(cfg, trunc)
for eta in (0.3, 0.6, 0.9):
    joint = closed_form_rho_lossy(cfg, LossSpec(eta), trunc)
    channelwise = distribute(base, LossSpec(eta), LossSpec(eta))
    dev = np.abs(joint.matrix - channelwise.matrix).max()
    print(f"  eta = {eta:.1f}: |difference| = {dev:.2e}")

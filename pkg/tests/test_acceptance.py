"""End-to-end acceptance checks for the pipeline: channel equivalence,
closed-form cross-validation, surface quality, teleportation benchmarks,
and artifact determinism.

Each test prints one summary line of the form ``CRITERION k: PASS/FAIL -
detail`` (run pytest with -s to see the lines for passing tests too).
Expensive surfaces are computed once per cutoff and shared between the
criteria that need them.
"""

import csv
import math
import time

import numpy as np
import pytest
import scipy.ndimage

from quasiecs.cli import main as cli_main
from quasiecs.fock import TruncationSpec, fidelity, normalize, purity
from quasiecs.linear_optics import (
    LossSpec,
    TrimerConfig,
    apply_loss_ancilla,
    apply_loss_kraus,
)
from quasiecs.protocol import (
    GenerationConfig,
    PurificationConfig,
    closed_form_rho_lossy,
    closed_form_rho_sub,
    distribute,
    generate_quasi_ecs,
    purify,
    teleport,
)
from quasiecs.states import ECSSpec, SqueezingSpec, make_cat, make_ecs, six_cat_states
from quasiecs.fock import DensityOperator
from quasiecs.sweep import SweepTable, run_preset

Z_SYM = math.pi / math.sqrt(2.0)  # coupler phase pi: the symmetric trimer point
CLASSICAL_LIMIT = 2.0 / 3.0


def report(num: int, ok: bool, detail: str) -> bool:
    print(f"CRITERION {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def gen_cfg(r: float, z: float, n_sub: int = 1) -> GenerationConfig:
    return GenerationConfig(SqueezingSpec(r), TrimerConfig(kappa=1.0, z=z), n_sub)


def table_max(table: SweepTable) -> float:
    values = [r.value for r in table.rows if r.value is not None]
    assert len(values) == len(table.rows), "grid has failed points"
    return max(values)


# surfaces shared between the quality criteria and the cutoff-robustness
# rerun, keyed by n_max
_ECS_SURFACE: dict[int, SweepTable] = {}
_TMSVS_MAX: dict[int, float] = {}
_CAT_TABLES: dict[int, tuple[SweepTable, SweepTable]] = {}


def ecs_surface(n_max: int) -> SweepTable:
    if n_max not in _ECS_SURFACE:
        _ECS_SURFACE[n_max] = run_preset(
            "ecs-fidelity",
            {"z": (Z_SYM - 2.0, Z_SYM + 2.0, 30), "r": (0.05, 0.9, 30), "n_max": n_max},
        )
    return _ECS_SURFACE[n_max]


def tmsvs_max(n_max: int) -> float:
    if n_max not in _TMSVS_MAX:
        _TMSVS_MAX[n_max] = table_max(run_preset("tmsvs-baseline", {"n_max": n_max}))
    return _TMSVS_MAX[n_max]


def cat_tables(n_max: int) -> tuple[SweepTable, SweepTable]:
    if n_max not in _CAT_TABLES:
        plain = run_preset("cat-teleport", {"n_max": n_max})
        boosted = run_preset("cat-teleport", {"purified": True, "n_max": n_max})
        _CAT_TABLES[n_max] = (plain, boosted)
    return _CAT_TABLES[n_max]


def test_criterion_01_loss_channel_equivalence():
    rng = np.random.default_rng(20260819)
    tr = TruncationSpec(6)
    d = tr.dim**2
    start = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        mat = a @ a.conj().T
        rho = DensityOperator(tr, 2, mat / np.trace(mat).real)
        eta = LossSpec(float(rng.uniform()))
        mode = int(rng.integers(2))
        via_kraus = apply_loss_kraus(rho, mode, eta)
        via_ancilla = apply_loss_ancilla(rho, mode, eta)
        worst = max(worst, float(np.abs(via_kraus.matrix - via_ancilla.matrix).max()))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 10.0
    report(1, ok, f"200 random operators, max deviation {worst:.3g}, {elapsed:.1f} s")
    assert worst <= 1e-10
    assert elapsed < 10.0


def test_criterion_02_closed_form_matches_generation():
    tr = TruncationSpec(10)
    start = time.perf_counter()
    worst_state, worst_prob = 0.0, 0.0
    for r, z, n_sub in ((0.2, 1.25, 1), (0.4, 1.25, 1), (0.2, 0.7, 2)):
        cfg = gen_cfg(r, z, n_sub)
        rho, p = generate_quasi_ecs(cfg, tr)
        branch = closed_form_rho_sub(cfg, tr)
        worst_prob = max(worst_prob, abs(branch.trace() - p))
        closed, _ = normalize(branch)
        worst_state = max(worst_state, float(np.abs(closed.matrix - rho.matrix).max()))
    elapsed = time.perf_counter() - start
    ok = worst_state <= 1e-10 and worst_prob <= 1e-10 and elapsed < 30.0
    report(
        2,
        ok,
        f"3 operating points, state deviation {worst_state:.3g}, "
        f"herald deviation {worst_prob:.3g}, {elapsed:.1f} s",
    )
    assert worst_state <= 1e-10
    assert worst_prob <= 1e-10
    assert elapsed < 30.0


def test_criterion_03_lossy_closed_form_matches_channels():
    tr = TruncationSpec(10)
    cfg = gen_cfg(0.3, 1.25)
    base = closed_form_rho_sub(cfg, tr)
    worst = 0.0
    for eta in (0.3, 0.6, 1.0):
        joint = closed_form_rho_lossy(cfg, LossSpec(eta), tr)
        channelwise = distribute(base, LossSpec(eta), LossSpec(eta))
        worst = max(worst, float(np.abs(joint.matrix - channelwise.matrix).max()))
    ok = worst <= 1e-10
    report(3, ok, f"eta in (0.3, 0.6, 1.0), max deviation {worst:.3g}")
    assert worst <= 1e-10


def test_criterion_04_generated_state_quality_and_symmetry():
    start = time.perf_counter()
    table = ecs_surface(10)
    elapsed = time.perf_counter() - start
    best = table_max(table)

    surface = {}
    for row in table.rows:
        surface[row.axis_values] = row.value
    zs = sorted({k[0] for k in surface})
    rs = sorted({k[1] for k in surface})
    asym = 0.0
    for i in range(len(zs) // 2):
        lo_z, hi_z = zs[i], zs[len(zs) - 1 - i]
        assert lo_z + hi_z == pytest.approx(2 * Z_SYM, abs=1e-9)
        for r in rs:
            asym = max(asym, abs(surface[(lo_z, r)] - surface[(hi_z, r)]))
    ok = best >= 0.98 and asym <= 1e-6 and elapsed < 300.0
    report(
        4,
        ok,
        f"30x30 grid: max fidelity {best:.6f}, mirror asymmetry {asym:.3g}, {elapsed:.1f} s",
    )
    assert best >= 0.98
    assert asym <= 1e-6
    assert elapsed < 300.0


def test_criterion_05_subtraction_probability_windows():
    tr = TruncationSpec(10)
    _, p1 = generate_quasi_ecs(gen_cfg(0.3, 1.25, 1), tr)
    _, p3 = generate_quasi_ecs(gen_cfg(0.3, 1.25, 3), tr)
    one_ok = 0.01 <= p1 < 1.0
    three_ok = 0.001 <= p3 < 0.1
    order_ok = p3 < p1
    ok = one_ok and three_ok and order_ok
    report(
        5,
        ok,
        f"p(1 photon) = {p1:.6g} (window [0.01, 1): {one_ok}), "
        f"p(3 photons) = {p3:.6g} (window [0.001, 0.1): {three_ok}), "
        f"ordering {order_ok}",
    )
    assert order_ok
    assert one_ok, (
        "single-photon herald probability sits below the stated window; the "
        "middle port keeps only sin(theta)cos(theta) of each pair amplitude "
        "at z = 1.25, which caps p near 3e-3 for r = 0.3"
    )
    assert three_ok


def test_criterion_06_gaussian_resource_stays_classical():
    start = time.perf_counter()
    best = tmsvs_max(10)
    elapsed = time.perf_counter() - start
    ok = best < CLASSICAL_LIMIT and elapsed < 600.0
    report(6, ok, f"20x20 grid: max average fidelity {best:.6f} < 2/3, {elapsed:.1f} s")
    assert best < CLASSICAL_LIMIT
    assert elapsed < 600.0


def column_above_limit(table: SweepTable, r_value: float) -> int:
    count = 0
    for row in table.rows:
        if row.axis_values[1] == r_value and row.value is not None:
            count += int(row.value > CLASSICAL_LIMIT)
    return count


def test_criterion_07_purification_extends_quantum_range():
    plain, boosted = cat_tables(10)
    above = [r for r in boosted.rows if r.value is not None and r.value > CLASSICAL_LIMIT]
    r_mid = float(np.linspace(0.05, 0.9, 20)[9])
    n_plain = column_above_limit(plain, r_mid)
    n_boosted = column_above_limit(boosted, r_mid)
    ok = bool(above) and n_boosted > n_plain
    report(
        7,
        ok,
        f"{len(above)} purified points above 2/3; at r = {r_mid:.3f} the eta "
        f"extent grows from {n_plain} to {n_boosted} grid points",
    )
    assert above
    assert n_boosted > n_plain


def test_criterion_08_purification_gains_pointwise():
    tr = TruncationSpec(10)
    target = make_ecs(ECSSpec(0.5, "odd"), tr)
    pur_cfg = PurificationConfig(0.1)
    fidelity_violations, purity_violations = [], []
    for eta in np.linspace(0.3, 0.8, 6):
        for r in np.linspace(0.1, 0.4, 4):
            rho, _ = generate_quasi_ecs(gen_cfg(float(r), 1.25), tr)
            lossy = distribute(rho, LossSpec(float(eta)), LossSpec(float(eta)))
            boosted, _ = purify(lossy, pur_cfg)
            df = fidelity(target, boosted) - fidelity(target, lossy)
            dp = purity(boosted) - purity(lossy)
            if df < -1e-6:
                fidelity_violations.append((float(eta), float(r), df))
            if dp < -1e-6:
                purity_violations.append((float(eta), float(r), dp))

    # vanishing-transmission limit read at eta = 0.001; both endpoints should
    # leave a nearly pure state
    endpoint_err = 0.0
    for eta in (0.001, 1.0):
        rho, _ = generate_quasi_ecs(gen_cfg(0.3, 1.25), tr)
        lossy = distribute(rho, LossSpec(eta), LossSpec(eta))
        boosted, _ = purify(lossy, pur_cfg)
        endpoint_err = max(endpoint_err, abs(1.0 - purity(lossy)), abs(1.0 - purity(boosted)))

    ok = not fidelity_violations and not purity_violations and endpoint_err <= 0.02
    report(
        8,
        ok,
        f"fidelity violations {fidelity_violations or 'none'}; purity violations "
        f"{[(e, r, round(d, 5)) for e, r, d in purity_violations] or 'none'}; "
        f"endpoint purity within {endpoint_err:.4f} of 1",
    )
    assert endpoint_err <= 0.02
    assert not fidelity_violations
    assert not purity_violations, (
        "catalysis lowers purity in the high-loss, stronger-squeezing corner "
        "of the sampled window while still raising fidelity there"
    )


def test_criterion_09_coherent_teleportation_benchmarks():
    table = run_preset("coherent-teleport", {"n_max": 10})
    best = table_max(table)

    gammas = sorted({r.axis_values[0] for r in table.rows})
    rs = sorted({r.axis_values[1] for r in table.rows})
    grid = np.array([row.value for row in table.rows]).reshape(len(gammas), len(rs))
    _, n_regions = scipy.ndimage.label(grid > CLASSICAL_LIMIT)

    tr = TruncationSpec(10)
    resource = make_ecs(ECSSpec(0.55, "odd"), tr).projector()
    herald_err = 0.0
    for spec in six_cat_states(0.55):
        result = teleport(resource, make_cat(spec, tr))
        for branch in result.branches:
            herald_err = max(herald_err, abs(branch.fidelity - 1.0))

    ok = best >= 0.95 and n_regions == 1 and herald_err <= 1e-8
    report(
        9,
        ok,
        f"max fidelity {best:.6f}, {n_regions} region(s) above 2/3, "
        f"ideal-resource herald error {herald_err:.3g}",
    )
    assert best >= 0.95
    assert n_regions == 1
    assert herald_err <= 1e-8


def test_criterion_10_reported_probability_composes(tmp_path):
    out = tmp_path / "teleport-prob.csv"
    code = cli_main(
        [
            "teleport-prob",
            "--set", "purified=true",
            "--set", "eta=0.5:1.0:3",
            "--set", "r=0.2:0.4:2",
            "--nmax", "8",
            "--out", str(out),
        ]
    )
    assert code == 0
    worst = 0.0
    with open(out, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 6
    for row in rows:
        got = float(row["value"])
        expected = float(row["p_purified"]) * float(row["p_tel"])
        worst = max(worst, abs(got - expected))
    ok = worst <= 1e-12
    report(10, ok, f"6 CLI rows, max |value - p_purified * p_tel| = {worst:.3g}")
    assert worst <= 1e-12


def test_criterion_11_cutoff_robustness():
    deltas = {
        "generation": abs(table_max(ecs_surface(12)) - table_max(ecs_surface(10))),
        "gaussian baseline": abs(tmsvs_max(12) - tmsvs_max(10)),
        "purified teleport": abs(
            table_max(cat_tables(12)[1]) - table_max(cat_tables(10)[1])
        ),
    }
    worst = max(deltas.values())
    ok = worst <= 1e-3
    report(
        11,
        ok,
        "max shift at n_max 10 -> 12: "
        + ", ".join(f"{k} {v:.3g}" for k, v in deltas.items()),
    )
    assert worst <= 1e-3


def test_criterion_12_reruns_are_byte_identical(tmp_path):
    specs = [
        ("purity", ["--set", "eta=0.4:0.9:3", "--set", "r=0.1:0.5:3"]),
        ("cat-teleport", ["--set", "purified=true", "--set", "eta=0.6:1.0:2",
                          "--set", "r=0.2:0.4:2"]),
    ]
    identical = True
    for preset, extra in specs:
        a, b = tmp_path / f"{preset}-a.csv", tmp_path / f"{preset}-b.csv"
        assert cli_main([preset, *extra, "--nmax", "8", "--out", str(a)]) == 0
        assert cli_main([preset, *extra, "--nmax", "8", "--out", str(b)]) == 0
        identical = identical and a.read_bytes() == b.read_bytes()
    report(12, identical, f"{len(specs)} presets re-run, byte-identical: {identical}")
    assert identical

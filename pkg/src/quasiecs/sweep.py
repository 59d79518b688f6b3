"""Grid sweeps over the pipeline with deterministic CSV output.

A sweep is a preset name, two axes, and a set of fixed parameters.  Each grid
point is evaluated independently (optionally in a process pool); rows are
sorted by axis values and metric name before emission, so serial and parallel
runs produce identical tables and reruns are byte-identical.

Failure policy: a zero-probability herald or truncation-leakage error at a
grid point is recorded as a row with an empty value and the message in the
``note`` column; the sweep itself keeps going.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .fock import (
    TruncationLeakageError,
    TruncationSpec,
    ZeroProbabilityError,
    fidelity,
    normalize,
    purity,
)
from .linear_optics import LossSpec, TrimerConfig
from .protocol import (
    GenerationConfig,
    PurificationConfig,
    average_cat_fidelity,
    coherent_teleportation,
    distribute,
    generate_quasi_ecs,
    purify,
    tmsvs_baseline,
)
from .states import ECSSpec, SqueezingSpec, make_ecs


@dataclass(frozen=True)
class AxisSpec:
    """One swept parameter: ``steps`` evenly spaced values over [lo, hi].
    A single-step axis pins the parameter at ``lo``."""

    name: str
    lo: float
    hi: float
    steps: int

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ValueError(f"axis {self.name}: steps must be >= 1, got {self.steps}")
        if self.hi < self.lo:
            raise ValueError(f"axis {self.name}: hi < lo")
        if self.steps == 1 and self.hi != self.lo:
            raise ValueError(f"axis {self.name}: a 1-step axis needs lo == hi")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass(frozen=True)
class SweepConfig:
    preset: str
    axes: tuple[AxisSpec, AxisSpec]
    fixed: dict[str, float | int | bool] = field(default_factory=dict)
    n_max: int = 10
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if self.axes[0].name == self.axes[1].name:
            raise ValueError("the two axes must sweep different parameters")


@dataclass(frozen=True)
class ResultRow:
    axis_values: tuple[float, float]
    metric: str
    value: float | None
    p_subtract: float | None = None
    p_purified: float | None = None
    p_tel: float | None = None
    tail_mass: float | None = None
    note: str = ""


@dataclass(frozen=True)
class SweepTable:
    axis_names: tuple[str, str]
    rows: tuple[ResultRow, ...]


# fixed-parameter defaults shared by the quasi-ECS presets
_COMMON_FIXED: dict[str, float | int | bool] = {
    "z": 1.25,
    "kappa": 1.0,
    "n_subtract": 1,
    "coupler_t": 0.1,
    "alpha": 0.5,
    "beta": 0.55,
}

_ETA_AXIS = AxisSpec("eta", 0.05, 1.0, 20)
_R_AXIS = AxisSpec("r", 0.05, 0.9, 20)


def _generation_config(p: dict) -> GenerationConfig:
    return GenerationConfig(
        squeezing=SqueezingSpec(p["r"]),
        trimer=TrimerConfig(kappa=p["kappa"], z=p["z"]),
        n_subtract=int(p["n_subtract"]),
    )


def _ideal_target(p: dict, trunc: TruncationSpec):
    parity = "odd" if int(p["n_subtract"]) % 2 else "even"
    return make_ecs(ECSSpec(p["alpha"], parity), trunc)


def _point_ecs_fidelity(p: dict) -> list[ResultRow]:
    trunc = TruncationSpec(int(p["n_max"]))
    rho, p_sub = generate_quasi_ecs(_generation_config(p), trunc)
    f = fidelity(_ideal_target(p, trunc), rho)
    return [
        ResultRow((p["z"], p["r"]), "fidelity", f, p_subtract=p_sub, tail_mass=rho.tail_mass)
    ]


def _lossy_resource(p: dict, trunc: TruncationSpec):
    rho, p_sub = generate_quasi_ecs(_generation_config(p), trunc)
    eta = LossSpec(p["eta"])
    return distribute(rho, eta, eta), p_sub


def _point_lossy_fidelity(p: dict) -> list[ResultRow]:
    trunc = TruncationSpec(int(p["n_max"]))
    lossy, p_sub = _lossy_resource(p, trunc)
    f = fidelity(_ideal_target(p, trunc), lossy)
    return [
        ResultRow((p["eta"], p["r"]), "fidelity", f, p_subtract=p_sub, tail_mass=lossy.tail_mass)
    ]


def _point_purified_fidelity(p: dict) -> list[ResultRow]:
    trunc = TruncationSpec(int(p["n_max"]))
    lossy, p_sub = _lossy_resource(p, trunc)
    pure_state, p_pur = purify(lossy, PurificationConfig(p["coupler_t"]))
    f = fidelity(_ideal_target(p, trunc), pure_state)
    return [
        ResultRow(
            (p["eta"], p["r"]),
            "fidelity",
            f,
            p_subtract=p_sub,
            p_purified=p_pur,
            tail_mass=pure_state.tail_mass,
        )
    ]


def _point_purity(p: dict) -> list[ResultRow]:
    trunc = TruncationSpec(int(p["n_max"]))
    lossy, p_sub = _lossy_resource(p, trunc)
    if p.get("purified"):
        state, p_pur = purify(lossy, PurificationConfig(p["coupler_t"]))
        return [
            ResultRow(
                (p["eta"], p["r"]),
                "purity",
                purity(state),
                p_subtract=p_sub,
                p_purified=p_pur,
                tail_mass=state.tail_mass,
            )
        ]
    return [
        ResultRow(
            (p["eta"], p["r"]), "purity", purity(lossy), p_subtract=p_sub, tail_mass=lossy.tail_mass
        )
    ]


def _point_purify_prob(p: dict) -> list[ResultRow]:
    trunc = TruncationSpec(int(p["n_max"]))
    lossy, p_sub = _lossy_resource(p, trunc)
    _, p_pur = purify(lossy, PurificationConfig(p["coupler_t"]))
    return [
        ResultRow(
            (p["eta"], p["r"]),
            "p_purified",
            p_pur,
            p_subtract=p_sub,
            p_purified=p_pur,
            tail_mass=lossy.tail_mass,
        )
    ]


def _cat_teleport_numbers(p: dict) -> tuple[float, float, float, float | None, float]:
    """Shared pipeline for the cat-teleport and teleport-prob presets:
    returns (f_avg, p_tel, p_subtract, p_purified, tail_mass)."""
    trunc = TruncationSpec(int(p["n_max"]))
    resource, p_sub = _lossy_resource(p, trunc)
    p_pur = None
    if p.get("purified"):
        resource, p_pur = purify(resource, PurificationConfig(p["coupler_t"]))
    f_avg, p_tel = average_cat_fidelity(resource, p["beta"])
    return f_avg, p_tel, p_sub, p_pur, resource.tail_mass


def _point_cat_teleport(p: dict) -> list[ResultRow]:
    f_avg, p_tel, p_sub, p_pur, tail = _cat_teleport_numbers(p)
    return [
        ResultRow(
            (p["eta"], p["r"]),
            "f_avg",
            f_avg,
            p_subtract=p_sub,
            p_purified=p_pur,
            p_tel=p_tel,
            tail_mass=tail,
        )
    ]


def _point_teleport_prob(p: dict) -> list[ResultRow]:
    _, p_tel, p_sub, p_pur, tail = _cat_teleport_numbers(p)
    total = p_pur * p_tel if p_pur is not None else p_tel
    return [
        ResultRow(
            (p["eta"], p["r"]),
            "p_tel",
            total,
            p_subtract=p_sub,
            p_purified=p_pur,
            p_tel=p_tel,
            tail_mass=tail,
        )
    ]


def _point_tmsvs_baseline(p: dict) -> list[ResultRow]:
    trunc = TruncationSpec(int(p["n_max"]))
    f_avg, p_tel = tmsvs_baseline(p["r"], LossSpec(p["eta"]), p["beta"], trunc)
    tail = abs(p["r"]) ** (2 * (trunc.n_max + 1))
    return [ResultRow((p["eta"], p["r"]), "f_avg", f_avg, p_tel=p_tel, tail_mass=tail)]


def _point_coherent_teleport(p: dict) -> list[ResultRow]:
    trunc = TruncationSpec(int(p["n_max"]))
    resource, p_sub = _lossy_resource(p, trunc)
    f, p_tel = coherent_teleportation(resource, p["gamma"])
    return [
        ResultRow(
            (p["gamma"], p["r"]),
            "fidelity",
            f,
            p_subtract=p_sub,
            p_tel=p_tel,
            tail_mass=resource.tail_mass,
        )
    ]


@dataclass(frozen=True)
class PresetSpec:
    name: str
    axes: tuple[AxisSpec, AxisSpec]
    fixed: dict[str, float | int | bool]
    evaluate: Callable[[dict], list[ResultRow]]
    metric: str
    doc: str


PRESETS: dict[str, PresetSpec] = {
    s.name: s
    for s in (
        PresetSpec(
            "ecs-fidelity",
            (AxisSpec("z", 0.2, 4.24, 20), _R_AXIS),
            dict(_COMMON_FIXED),
            _point_ecs_fidelity,
            "fidelity",
            "fidelity of the freshly generated state to the ideal ECS over (z, r)",
        ),
        PresetSpec(
            "lossy-fidelity",
            (_ETA_AXIS, _R_AXIS),
            dict(_COMMON_FIXED),
            _point_lossy_fidelity,
            "fidelity",
            "fidelity to the ideal ECS after loss on both arms over (eta, r)",
        ),
        PresetSpec(
            "purified-fidelity",
            (_ETA_AXIS, _R_AXIS),
            dict(_COMMON_FIXED),
            _point_purified_fidelity,
            "fidelity",
            "fidelity to the ideal ECS after loss and catalysis over (eta, r)",
        ),
        PresetSpec(
            "purity",
            (_ETA_AXIS, _R_AXIS),
            dict(_COMMON_FIXED, purified=False),
            _point_purity,
            "purity",
            "purity of the distributed state over (eta, r); set purified=true for the catalyzed state",
        ),
        PresetSpec(
            "purify-prob",
            (_ETA_AXIS, _R_AXIS),
            dict(_COMMON_FIXED),
            _point_purify_prob,
            "p_purified",
            "catalysis herald probability over (eta, r)",
        ),
        PresetSpec(
            "cat-teleport",
            (_ETA_AXIS, _R_AXIS),
            dict(_COMMON_FIXED, purified=False),
            _point_cat_teleport,
            "f_avg",
            "six-state average teleportation fidelity over (eta, r); set purified=true to catalyze first",
        ),
        PresetSpec(
            "teleport-prob",
            (_ETA_AXIS, _R_AXIS),
            dict(_COMMON_FIXED, purified=False),
            _point_teleport_prob,
            "p_tel",
            "accepted-herald probability over (eta, r); purified=true reports the composed probability",
        ),
        PresetSpec(
            "tmsvs-baseline",
            (_ETA_AXIS, _R_AXIS),
            dict(_COMMON_FIXED),
            _point_tmsvs_baseline,
            "f_avg",
            "six-state average fidelity with a lossy squeezed-vacuum resource over (eta, r)",
        ),
        PresetSpec(
            "coherent-teleport",
            (AxisSpec("gamma", 0.05, 1.5, 20), _R_AXIS),
            dict(_COMMON_FIXED, eta=1.0),
            _point_coherent_teleport,
            "fidelity",
            "coherent-input teleportation fidelity over (gamma, r), lossless by default",
        ),
    )
}


def _evaluate_point(task: tuple[str, dict]) -> list[ResultRow]:
    """Evaluate one grid point; library errors become empty-value rows."""
    name, params = task
    spec = PRESETS[name]
    axis_vals = tuple(params[a.name] for a in spec.axes)
    try:
        return spec.evaluate(params)
    except (ZeroProbabilityError, TruncationLeakageError) as exc:
        return [ResultRow(axis_vals, spec.metric, None, note=str(exc))]


def build_config(preset: str, overrides: dict | None = None) -> SweepConfig:
    """Resolve a preset plus override fragment into a full SweepConfig.

    Axis overrides are (lo, hi, steps) tuples or bare numbers (pinning a
    degenerate single-point axis); anything else must name a fixed parameter
    of the preset.  n_max and jobs ride along as plain keys.
    """
    if preset not in PRESETS:
        raise KeyError(f"unknown preset {preset!r}; known: {', '.join(sorted(PRESETS))}")
    spec = PRESETS[preset]
    overrides = dict(overrides or {})
    n_max = int(overrides.pop("n_max", 10))
    jobs = int(overrides.pop("jobs", 1))
    axes = []
    for axis in spec.axes:
        if axis.name in overrides:
            val = overrides.pop(axis.name)
            if isinstance(val, (tuple, list)):
                lo, hi, steps = val
                axes.append(AxisSpec(axis.name, float(lo), float(hi), int(steps)))
            else:
                axes.append(AxisSpec(axis.name, float(val), float(val), 1))
        else:
            axes.append(axis)
    fixed = dict(spec.fixed)
    for key, val in overrides.items():
        if key not in fixed:
            raise KeyError(f"preset {preset!r} has no parameter {key!r}")
        if isinstance(val, (tuple, list)):
            raise ValueError(f"{key!r} is a fixed parameter, not an axis")
        fixed[key] = type(fixed[key])(val) if not isinstance(fixed[key], bool) else _as_bool(val)
    return SweepConfig(preset, (axes[0], axes[1]), fixed, n_max=n_max, jobs=jobs)


def _as_bool(val) -> bool:
    if isinstance(val, bool):
        return val
    if isinstance(val, str):
        low = val.strip().lower()
        if low in ("true", "1", "yes"):
            return True
        if low in ("false", "0", "no"):
            return False
        raise ValueError(f"expected a boolean, got {val!r}")
    return bool(val)


def run_sweep(config: SweepConfig) -> SweepTable:
    spec = PRESETS[config.preset]
    tasks = []
    for x in config.axes[0].values():
        for y in config.axes[1].values():
            params = dict(config.fixed)
            params[config.axes[0].name] = float(x)
            params[config.axes[1].name] = float(y)
            params["n_max"] = config.n_max
            tasks.append((config.preset, params))
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            chunks = list(pool.map(_evaluate_point, tasks, chunksize=8))
    else:
        chunks = [_evaluate_point(t) for t in tasks]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r.axis_values, r.metric))
    return SweepTable((spec.axes[0].name, spec.axes[1].name), tuple(rows))


def run_preset(name: str, overrides: dict | None = None) -> SweepTable:
    """Run a named preset with an optional override fragment."""
    return run_sweep(build_config(name, overrides))


def _fmt(value: float | None) -> str:
    return "" if value is None else format(value, ".12g")


def emit_csv(table: SweepTable, path) -> None:
    """Write the table as UTF-8 CSV: header, one row per ResultRow, floats at
    12 significant digits.  Byte-identical across reruns of the same config."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            list(table.axis_names)
            + ["metric", "value", "p_subtract", "p_purified", "p_tel", "tail_mass", "note"]
        )
        for row in table.rows:
            writer.writerow(
                [_fmt(v) for v in row.axis_values]
                + [row.metric, _fmt(row.value), _fmt(row.p_subtract), _fmt(row.p_purified),
                   _fmt(row.p_tel), _fmt(row.tail_mass), row.note]
            )


def error_rows(table: SweepTable) -> list[ResultRow]:
    return [r for r in table.rows if r.note]

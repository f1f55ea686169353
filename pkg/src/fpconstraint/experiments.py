"""Frozen experiment presets and the artifacts they write.

Every preset uses n = 3, gamma = 1 and the source 1 on [0.3, 0.5]; they differ
in the potential, the constraint kernel and the mu schedule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .assembly import AssembledSystem, assemble, write_system_csv
from .csvio import format_block, write_csv
from .inversion import MonotonicityScan, scan_monotonicity
from .mesh import build_mesh
from .model import (
    DoubleWell,
    GaussianAtOrigin,
    Indicator,
    ModelSpec,
    QuarticTail,
    Quadratic,
    ShiftedGaussian,
    check_hypotheses,
    curvature_scale,
)
from .oracles import check_asymptote, nodes_in_core, predicted_slope, required_intervals
from .solver import solve_primal

DEFAULT_N = 2000

_SOURCE = Indicator(0.3, 0.5)
HEALTHY_MODEL = ModelSpec(Quadratic(2.0), GaussianAtOrigin(1e-3), _SOURCE, 1.0, 3)


@dataclass(frozen=True)
class ScanSpec:
    mu_lo: float
    mu_hi: float
    samples: int


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    model: ModelSpec
    profile_mus: tuple[float, ...]
    scan: ScanSpec
    default_n: int = DEFAULT_N
    asymptote_mus: tuple[float, ...] = ()
    outputs: tuple[str, ...] = ("profiles.csv", "fscan.csv", "summary.txt")


PRESETS: dict[str, ExperimentPreset] = {
    p.name: p
    for p in (
        ExperimentPreset(
            "fig_ok1",
            HEALTHY_MODEL,
            profile_mus=tuple(float(m) for m in range(1, 11)),
            scan=ScanSpec(0.0, 10.0, 41),
        ),
        ExperimentPreset(
            "fig_ok2",
            HEALTHY_MODEL,
            profile_mus=(1e1, 1e3, 1e5, 1e7),
            scan=ScanSpec(1e-2, 1e7, 60),
            # ten nodes inside the concentration length at mu = 1e7 (curvature 4)
            default_n=required_intervals(4.0, 1e7),
            asymptote_mus=(1e2, 1e3, 1e4),
        ),
        ExperimentPreset(
            "fig_delta4",
            ModelSpec(Quadratic(2.0), QuarticTail(1e-3), _SOURCE, 1.0, 3),
            profile_mus=(1.0, 10.0, 50.0, 100.0, 250.0, 500.0),
            scan=ScanSpec(0.0, 500.0, 101),
        ),
        ExperimentPreset(
            "fig_bad",
            ModelSpec(DoubleWell(2.0, 0.2), ShiftedGaussian(1e-3, 0.05), _SOURCE, 1.0, 3),
            profile_mus=(1e1, 1e2, 1e3, 5e3, 1e4),
            scan=ScanSpec(1e-2, 1.5e5, 80),
        ),
        ExperimentPreset(
            "fig_bad2",
            ModelSpec(Quadratic(2.0), ShiftedGaussian(1e-3, 0.1), _SOURCE, 1.0, 3),
            profile_mus=(1e1, 1e2, 5e2, 1e3, 2.5e3),
            scan=ScanSpec(0.0, 2500.0, 101),
        ),
    )
}


@dataclass
class PresetRun:
    preset: ExperimentPreset
    n_intervals: int
    out_dir: Path
    system: AssembledSystem
    profiles: dict[float, np.ndarray]
    scan: MonotonicityScan
    summary: dict[str, object] = field(default_factory=dict)

    @property
    def paths(self) -> dict[str, Path]:
        return {name: self.out_dir / name for name in self.preset.outputs}


def get_preset(name: str) -> ExperimentPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def run_preset(
    name: str,
    n_intervals: int | None = None,
    out_dir: str | Path = ".",
    load_style: str = "hat",
    drift: str = "galerkin",
    dump_system: str | Path | None = None,
    dump_mu: float = 1.0,
) -> PresetRun:
    preset = get_preset(name)
    model = preset.model
    n = n_intervals or preset.default_n
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    mesh = build_mesh(n, model.dim)
    sys = assemble(model, mesh, load_style=load_style, drift=drift)
    hyp = check_hypotheses(model, mesh)

    params = {"preset": name, "N": n, "n": model.dim, "gamma": model.gamma,
              "drift": drift, "load_style": load_style, **model.describe()}

    # profiles at the preset mu values
    profiles = {}
    mass_err = []
    for mu in preset.profile_mus:
        res = solve_primal(sys, model, mu)
        profiles[mu] = res.U
        expected = mu * float(np.sum(sys.load))
        got = model.gamma * float(np.sum(sys.A.matvec(res.U)))
        mass_err.append(abs(got - expected) / expected)
    cols = ["r"] + [f"u_mu={mu!r}" for mu in preset.profile_mus]
    data = np.column_stack(
        [mesh.nodes] + [np.append(profiles[mu], 0.0) for mu in preset.profile_mus]
    )
    write_csv(out / "profiles.csv", params, cols, data)

    spec = preset.scan
    scan = scan_monotonicity(sys, model, spec.mu_lo, spec.mu_hi, spec.samples)
    write_csv(out / "fscan.csv", {**params, "mu_lo": spec.mu_lo, "mu_hi": spec.mu_hi,
                                  "samples": spec.samples},
              ["mu", "F", "Fprime"], scan.rows())

    u0 = np.array([profiles[mu][0] for mu in preset.profile_mus])
    healthy = predicted_slope(HEALTHY_MODEL)
    slope_end = float(scan.f_values[-1] / scan.mu_grid[-1])
    summary: dict[str, object] = {"preset": name, "N": n, **{k: v for k, v in params.items() if k not in ("preset", "N")}}
    summary.update({f"hyp_{k}": v for k, v in hyp.as_dict().items()})
    summary.update(
        profile_mus=" ".join(repr(m) for m in preset.profile_mus),
        u_origin=" ".join(repr(float(v)) for v in u0),
        u_origin_increasing=bool(np.all(np.diff(u0) > 0)),
        profile_min_over_max=float(min(p.min() / p.max() for p in profiles.values())),
        mass_identity_max_rel_error=float(max(mass_err)),
        scan_mu_lo=spec.mu_lo,
        scan_mu_hi=spec.mu_hi,
        scan_samples=spec.samples,
        sign_changes=len(scan.sign_changes),
        sign_change_intervals=";".join(f"{a!r}:{b!r}" for a, b in scan.sign_changes) or "none",
        monotone=scan.monotone,
        non_monotone_warning=not scan.monotone,
        f_max=float(scan.f_values.max()),
        mu_at_f_max=float(scan.mu_grid[int(np.argmax(scan.f_values))]),
        f_at_mu_max=float(scan.f_values[-1]),
        slope_at_mu_max=slope_end,
        healthy_slope=healthy,
        bounded_vs_healthy=slope_end < 1e-2 * healthy,
    )
    curv = curvature_scale(model, mesh, hyp)
    if curv is not None:
        core = nodes_in_core(mesh, curv, spec.mu_hi)
        summary.update(
            resolution_curvature=curv,
            resolution_nodes_in_core_at_mu_max=core,
            resolution_ok_at_mu_max=core >= 10,
        )
    if preset.asymptote_mus:
        asym = check_asymptote(model, mesh, preset.asymptote_mus, sys=sys)
        summary.update({f"asymptote_{k}": v for k, v in asym.summary().items()})
        summary["asymptote_rel_deviation"] = " ".join(repr(float(v)) for v in asym.rel_deviation)
    (out / "summary.txt").write_text(format_block(summary))
    if dump_system is not None:
        write_system_csv(dump_system, sys, dump_mu, model.gamma, {"preset": name})
    return PresetRun(preset, n, out, sys, profiles, scan, summary)

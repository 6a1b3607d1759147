"""Scenario configuration, the analysis pipeline, and report verification.

A scenario is a JSON document selecting dimension, nonlinearity sign, grid,
time span, initial data, and analysis knobs.  ``run_scenario`` evolves the
data and assembles a DiagnosticsReport: conserved-quantity series, every
inequality ratio with the tolerance it is checked against, spacetime-norm
tables, the interval decomposition with its concentration diagnostics, and
a resolution-certification block.  ``verify`` re-evaluates every applicable
invariant and returns a machine-readable pass/fail list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import concentration as conc
from . import functionals as fn
from .dynamics import EvolutionConfig, Trajectory, blowup_monitor, duhamel_residual, evolve
from .grid import RadialField
from .persist import decode_snapshot, load_trajectory, read_json
from .transform import make_spectral_grid


class ScenarioError(ValueError):
    """Invalid scenario; ``violations`` lists every offending field."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid scenario: " + "; ".join(self.violations))


_FAMILIES = ("gaussian", "ring", "file")

DEFAULT_SCENARIO = {
    "scenario_id": "unnamed",
    "dimension": 3,
    "mu": 1,
    "grid": {"n_points": 1024, "r_max": 32.0},
    "time": {"t_minus": 0.0, "t_plus": 1.0, "dt": 1e-3, "snapshot_stride": 10},
    "initial_data": {"family": "gaussian", "amplitude": 1.0, "width": 1.0},
    "analysis": {
        "eta": None,                    # default: total critical mass / 10
        "c0": 2.0,
        "c1": 1.5,                      # exceptional threshold eta^c1, c1 > 1
        "c2": 4.0,
        "admissible_pairs": None,       # default standard set for n
        "morawetz_A": [1.0, 2.0, 4.0],
        "morawetz_eps": [1e-2, 1e-3],
        "identity_eps": 0.5,
        "mass_radii": [1.0, 2.0, 4.0],
        "bubble_fraction": 0.2,
        "kappa": 25.0,
        "nest_half_factor": 0.5,
        "certify_resolution": True,
        "tolerances": {
            "mass_drift": 1e-10,
            "energy_drift_rel": 1e-5,
            "flux_ratio": 1.05,
            "duhamel_rel": 1e-2,
            "identity_defect": 1e-2,
        },
    },
    "evolution": {
        "energy_drift_alarm": 1e-3,
        "blowup_grad_factor": 10.0,
    },
}


def _merge(base: dict, overlay: dict) -> dict:
    out = dict(base)
    for key, val in overlay.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def normalize_scenario(raw: dict) -> dict:
    """Fill defaults and validate; raises ScenarioError listing every
    violated field."""
    s = _merge(DEFAULT_SCENARIO, raw or {})
    bad = []
    if not isinstance(s["dimension"], int) or s["dimension"] < 3:
        bad.append(f"dimension must be an integer >= 3, got {s['dimension']!r}")
    if s["mu"] not in (-1, 0, 1):
        bad.append(f"mu must be -1, 0, or +1, got {s['mu']!r}")
    g = s["grid"]
    if not isinstance(g.get("n_points"), int) or g["n_points"] < 16:
        bad.append(f"grid.n_points must be an integer >= 16, got {g.get('n_points')!r}")
    if not (isinstance(g.get("r_max"), (int, float)) and g["r_max"] > 0):
        bad.append(f"grid.r_max must be positive, got {g.get('r_max')!r}")
    t = s["time"]
    if not (
        isinstance(t.get("t_minus"), (int, float))
        and isinstance(t.get("t_plus"), (int, float))
        and t["t_plus"] > t["t_minus"]
    ):
        bad.append("time span must be nonempty (t_plus > t_minus)")
    if not (isinstance(t.get("dt"), (int, float)) and t["dt"] > 0):
        bad.append(f"time.dt must be positive, got {t.get('dt')!r}")
    if not isinstance(t.get("snapshot_stride"), int) or t["snapshot_stride"] < 1:
        bad.append(f"time.snapshot_stride must be a positive integer, got {t.get('snapshot_stride')!r}")
    init = s["initial_data"]
    fam = init.get("family")
    if fam not in _FAMILIES:
        bad.append(f"initial_data.family must be one of {_FAMILIES}, got {fam!r}")
    elif fam in ("gaussian", "ring"):
        for key in ("amplitude", "width") + (("center",) if fam == "ring" else ()):
            if not (isinstance(init.get(key), (int, float)) and (key == "amplitude" or init[key] > 0)):
                bad.append(f"initial_data.{key} must be positive, got {init.get(key)!r}")
    elif fam == "file" and not init.get("path"):
        bad.append("initial_data.path required for the file family")
    a = s["analysis"]
    if a["eta"] is not None and not (isinstance(a["eta"], (int, float)) and a["eta"] > 0):
        bad.append(f"analysis.eta must be positive or null, got {a['eta']!r}")
    if not a["c1"] > 1:
        bad.append(f"analysis.c1 must exceed 1 (threshold below eta), got {a['c1']!r}")
    if not (0 < a["bubble_fraction"] < 1):
        bad.append(f"analysis.bubble_fraction must lie in (0,1), got {a['bubble_fraction']!r}")
    if not a["kappa"] > 0:
        bad.append(f"analysis.kappa must be positive, got {a['kappa']!r}")
    for key in ("morawetz_A", "morawetz_eps", "mass_radii"):
        vals = a[key]
        if not vals or any(not (isinstance(v, (int, float)) and v > 0) for v in vals):
            bad.append(f"analysis.{key} must be a list of positive numbers")
    if bad:
        raise ScenarioError(bad)
    return s


def build_initial_data(scenario: dict) -> RadialField:
    grid = make_spectral_grid(
        scenario["dimension"],
        scenario["grid"]["n_points"],
        float(scenario["grid"]["r_max"]),
    )
    init = scenario["initial_data"]
    r = grid.nodes
    fam = init["family"]
    if fam == "gaussian":
        vals = init["amplitude"] * np.exp(-((r / init["width"]) ** 2))
    elif fam == "ring":
        vals = init["amplitude"] * np.exp(-(((r - init["center"]) / init["width"]) ** 2))
    else:
        blob = Path(init["path"]).read_bytes()
        vals = decode_snapshot(blob)
        if vals.size != grid.n_points:
            raise ScenarioError(
                [f"initial_data.path holds {vals.size} samples, grid needs {grid.n_points}"]
            )
    return grid.field(vals)


def _finite(x):
    """JSON-safe number: non-finite floats become strings."""
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return x


def _pairs_for(scenario: dict) -> tuple[fn.AdmissiblePair, ...]:
    n = scenario["dimension"]
    listed = scenario["analysis"]["admissible_pairs"]
    if listed is None:
        return fn.default_admissible_pairs(n)
    out = []
    for q, r in listed:
        # "inf" strings are the JSON spelling of the q = infinity endpoint
        out.append(fn.AdmissiblePair(float(q), float(r), n))  # raises if not admissible
    return tuple(out)


@dataclass(frozen=True)
class RunResult:
    report: dict
    trajectory: Trajectory


def run_scenario(scenario: dict, seed: int = 0) -> RunResult:
    """Evolve one scenario and assemble its diagnostics report.

    Deterministic: identical scenarios (and seed) produce byte-identical
    reports.  A truncated evolution (blowup or energy alarm) still yields
    a report, marked with the truncation reason, containing every
    diagnostic that remains meaningful.
    """
    s = normalize_scenario(scenario)
    u0 = build_initial_data(s)
    cfg = EvolutionConfig(
        dimension=s["dimension"],
        mu=s["mu"],
        dt=float(s["time"]["dt"]),
        snapshot_stride=s["time"]["snapshot_stride"],
        energy_drift_tol=float(s["evolution"]["energy_drift_alarm"]),
        blowup_grad_factor=float(s["evolution"]["blowup_grad_factor"]),
    )
    traj = evolve(
        u0,
        float(s["time"]["t_minus"]),
        float(s["time"]["t_plus"]),
        cfg,
        provenance={"scenario_id": s["scenario_id"], "initial_data": dict(s["initial_data"])},
    )
    report = build_report(s, traj, seed=seed)
    return RunResult(report, traj)


def build_report(s: dict, traj: Trajectory, seed: int = 0) -> dict:
    tol = s["analysis"]["tolerances"]
    complete = traj.status == "complete"
    mass_drift = float(np.abs(traj.mass_series - traj.mass_series[0]).max())
    e_scale = max(abs(float(traj.energy_series[0])), 1e-30)
    energy_drift = float(np.abs(traj.energy_series - traj.energy_series[0]).max() / e_scale)

    report: dict = {
        "scenario": s,
        "seed": seed,
        "status": traj.status,
        "abort_reason": traj.abort_reason,
        "conserved": {
            "times": list(traj.times),
            "mass": list(traj.mass_series),
            "energy": list(traj.energy_series),
            "kinetic": list(traj.kinetic_series),
            "potential": list(traj.potential_series),
            "mass_drift": mass_drift,
            "mass_drift_tolerance": tol["mass_drift"],
            "energy_drift_rel": energy_drift,
            "energy_drift_tolerance": tol["energy_drift_rel"],
        },
        "blowup": _blowup_entry(traj),
    }

    # inequality tables (meaningful only while the run is trusted)
    if complete:
        report["mass_flux"] = _flux_table(s, traj, tol)
        report["hardy"] = _hardy_table(s, traj)
        report["morawetz"] = _morawetz_table(s, traj)
        report["momentum_flux_identity"] = _identity_entry(s, traj, tol)
        report["strichartz"] = _strichartz_table(s, traj)
        report["duhamel"] = _duhamel_table(traj, tol)
        report["concentration"] = _concentration_block(s, traj)
        if s["analysis"]["certify_resolution"]:
            report["resolution_certification"] = _certify_resolution(s, traj)
    return report


def _blowup_entry(traj: Trajectory) -> dict:
    b = blowup_monitor(traj)
    return {
        "flagged": b.flagged,
        "first_alarm_time": b.first_alarm_time,
        "initial_gradient": b.initial_gradient,
        "factor": b.factor,
        "potential_exceeds_kinetic": b.potential_exceeds_kinetic,
        "blowup_expected": b.blowup_expected,
        "gradient_history": list(b.gradient_history),
    }


def _flux_table(s, traj, tol):
    if traj.config.mu < 0:
        return {"skipped": "flux bound requires the free or defocusing sign"}
    rows = []
    for radius in s["analysis"]["mass_radii"]:
        rep = fn.mass_flux_check(traj, float(radius))
        rows.append(
            {
                "radius": rep.radius,
                "max_rate": rep.max_rate,
                "bound": rep.bound,
                "ratio": rep.ratio,
                "tolerance": tol["flux_ratio"],
            }
        )
    return {"constant": fn.MASS_FLUX_CONSTANT, "rows": rows}


def _hardy_table(s, traj):
    u0 = traj.snapshots[0]
    mu = traj.config.mu
    if fn.energy(u0, mu).total <= 0 and np.any(u0.values != 0):
        return {"skipped": "growth bound requires positive energy"}
    rows = [
        {"radius": float(r), "ratio": fn.hardy_bound_check(u0, float(r), mu),
         "bound": fn.HARDY_RATIO_BOUND}
        for r in s["analysis"]["mass_radii"]
    ]
    sweep = [
        fn.hardy_bound_check(u0, float(r), mu)
        for r in np.geomspace(0.25, min(8.0, traj.grid.r_max / 2), 17)
    ]
    return {"rows": rows, "sweep_sup": float(max(sweep)), "bound": fn.HARDY_RATIO_BOUND}


def _morawetz_table(s, traj):
    rows = []
    for A in s["analysis"]["morawetz_A"]:
        rep = fn.morawetz_check(traj, None, float(A))
        reg = fn.morawetz_check_regularized(
            traj, tuple(s["analysis"]["morawetz_eps"]), None, float(A)
        )
        rows.append(
            {
                "A": rep.A,
                "lhs": rep.lhs,
                "rhs_without_constant": rep.rhs_without_constant,
                "ratio": rep.ratio,
                "bound": fn.MORAWETZ_RATIO_BOUND,
                "regularized": {str(k): v for k, v in reg.items()},
            }
        )
    return {"rows": rows, "bound": fn.MORAWETZ_RATIO_BOUND}


def _identity_entry(s, traj, tol):
    eps = float(s["analysis"]["identity_eps"])
    spacing = float(np.median(np.diff(traj.grid.nodes)))
    eps = max(eps, 3.5 * spacing)
    rep = fn.momentum_flux_identity_check(traj, eps)
    return {
        "epsilon": rep.epsilon,
        "max_defect": rep.max_defect,
        "tolerance": tol["identity_defect"],
    }


def _strichartz_table(s, traj):
    pairs = _pairs_for(s)
    rows = []
    for k in (0, 1):
        for pr in pairs:
            val = fn.strichartz_norm(traj, None, k, (pr,))
            rows.append({"k": k, "q": _finite(pr.q), "r": _finite(pr.r), "value": val})
        rows.append(
            {"k": k, "q": "sup", "r": "sup",
             "value": fn.strichartz_norm(traj, None, k, pairs)}
        )
    return {"pairs": [[_finite(p.q), _finite(p.r)] for p in pairs], "rows": rows}


def _duhamel_table(traj, tol):
    rows = []
    u_norm = math.sqrt(float(traj.mass_series[-1]))
    mid = traj.nearest_time(0.5 * (traj.t_minus + traj.t_plus))
    for t0, t1 in ((traj.t_minus, traj.t_plus), (traj.t_minus, mid)):
        if t0 == t1:
            continue
        resid = duhamel_residual(traj, t0, t1)
        rows.append(
            {
                "t0": t0,
                "t": t1,
                "residual": resid,
                "relative": resid / u_norm if u_norm > 0 else 0.0,
                "tolerance": tol["duhamel_rel"],
            }
        )
    return rows


def _concentration_block(s, traj):
    a = s["analysis"]
    dens = fn.critical_density(traj)
    total = float(np.trapezoid(dens, traj.times))
    eta = a["eta"] if a["eta"] is not None else (total / 10.0 if total > 0 else 1.0)
    eta = float(eta)
    block: dict = {"total_critical_mass": total, "eta": eta,
                   "total_exceeds_4eta": total > 4 * eta}
    try:
        decomp = conc.greedy_subdivide(traj, eta)
    except conc.ResolutionError as exc:
        block["error"] = str(exc)
        return block
    threshold = eta ** float(a["c1"])
    exc_rep = conc.classify_exceptional(decomp, traj, threshold)
    decomp = decomp.with_flags(exc_rep.flags)
    block["decomposition"] = {
        "boundaries": list(decomp.boundaries),
        "masses": list(decomp.masses),
        "tail_flag": decomp.tail_flag,
        "exceptional": list(decomp.exceptional),
    }
    block["exceptional"] = {
        "threshold": threshold,
        "count": exc_rep.count,
        "count_bound": exc_rep.count_bound,
        "total_linear_mass": exc_rep.total_linear_mass,
        "minus_masses": list(exc_rep.minus_masses),
        "plus_masses": list(exc_rep.plus_masses),
    }
    block["window_statistics"] = {
        k: (list(v) if isinstance(v, tuple) else v)
        for k, v in conc.window_statistics(decomp).items()
    }
    comparisons = []
    for j in decomp.non_tail_indices():
        try:
            cmp_rep = conc.linear_flow_check(traj, decomp.interval(j), eta)
            comparisons.append(
                {
                    "interval": j,
                    "nonlinear_mass": cmp_rep.nonlinear_mass,
                    "linear_masses": list(cmp_rep.linear_masses),
                    "ratios": list(cmp_rep.ratios),
                }
            )
        except ValueError as exc:
            comparisons.append({"interval": j, "error": str(exc)})
    block["flow_comparisons"] = comparisons
    bubbles = []
    for j in decomp.non_tail_indices():
        rep = conc.find_bubble(traj, decomp, j, float(a["bubble_fraction"]))
        if rep is not None:
            bubbles.append(
                {
                    "interval": rep.interval_index,
                    "witness_time": rep.witness_time,
                    "radius": rep.radius,
                    "inverse_scale": rep.inverse_scale,
                    "attained_mass": rep.attained_mass,
                    "threshold": rep.threshold,
                }
            )
    block["bubbles"] = bubbles
    nest = conc.bourgain_nest(decomp, float(a["kappa"]), float(a["nest_half_factor"]))
    if nest is None:
        block["nest"] = {"empty": True, "reason": "all intervals exceptional"}
    else:
        problems = conc.check_nest(decomp, nest, float(a["kappa"]))
        block["nest"] = {
            "t_star": nest.t_star,
            "chain": list(nest.chain),
            "depth": nest.depth,
            "achieved_kappa": nest.achieved_kappa,
            "kappa_tolerance": float(a["kappa"]),
            "half_factor": nest.half_factor,
            "violations": problems,
        }
    return block


def _certify_resolution(s, traj):
    """Coarsened-twin self-convergence: order estimate from dt, 2dt, 4dt."""
    u0 = build_initial_data(s)
    base_cfg = traj.config
    finals = [traj.snapshots[-1].values]
    for factor in (2, 4):
        cfg = EvolutionConfig(
            dimension=base_cfg.dimension,
            mu=base_cfg.mu,
            dt=base_cfg.dt * factor,
            snapshot_stride=max(1, base_cfg.snapshot_stride // factor),
            energy_drift_tol=base_cfg.energy_drift_tol,
            blowup_grad_factor=base_cfg.blowup_grad_factor,
        )
        tw = evolve(u0, traj.t_minus, traj.t_plus, cfg)
        if tw.status != "complete":
            return {"skipped": f"coarse twin at {factor}x dt aborted: {tw.abort_reason}"}
        finals.append(tw.snapshots[-1].values)
    w = traj.grid.weights
    d1 = math.sqrt(float(np.sum(w * np.abs(finals[1] - finals[0]) ** 2)))
    d2 = math.sqrt(float(np.sum(w * np.abs(finals[2] - finals[1]) ** 2)))
    order = math.log2(d2 / d1) if d1 > 0 and d2 > 0 else math.inf
    return {
        "dt_levels": [base_cfg.dt, base_cfg.dt * 2, base_cfg.dt * 4],
        "self_difference_fine": d1,
        "self_difference_coarse": d2,
        "measured_order": order,
    }


# ---------------------------------------------------------------------------
# verification


def _check(name, passed, measured, bound, note="") -> dict:
    return {
        "check": name,
        "passed": bool(passed),
        "measured": _finite(measured),
        "bound": _finite(bound),
        "note": note,
    }


def verify_report(report: dict, store_dir=None) -> list[dict]:
    """Evaluate every applicable invariant; returns a pass/fail list.

    When a trajectory store is given, conserved quantities are recomputed
    from the stored snapshots, so tampered or corrupted snapshot files
    fail the conservation checks with the injected magnitude.
    """
    checks: list[dict] = []
    s = report["scenario"]
    tol = s["analysis"]["tolerances"]
    cons = report["conserved"]

    if store_dir is not None:
        traj = load_trajectory(store_dir)
        masses = np.array(
            [float(np.sum(traj.grid.weights * np.abs(f.values) ** 2)) for f in traj.snapshots]
        )
        mass_drift = float(np.abs(masses - masses[0]).max())
        energies = np.array(
            [fn.energy(f, traj.config.mu).total for f in traj.snapshots]
        )
        e_scale = max(abs(energies[0]), 1e-30)
        energy_drift = float(np.abs(energies - energies[0]).max() / e_scale)
    else:
        mass_drift = cons["mass_drift"]
        energy_drift = cons["energy_drift_rel"]

    trusted = report["status"] == "complete"
    checks.append(
        _check("mass_conservation", not trusted or mass_drift <= cons["mass_drift_tolerance"],
               mass_drift, cons["mass_drift_tolerance"],
               "recomputed from store" if store_dir else "from report series")
    )
    checks.append(
        _check("energy_conservation", not trusted or energy_drift <= cons["energy_drift_tolerance"],
               energy_drift, cons["energy_drift_tolerance"])
    )

    n = s["dimension"]
    for q, r in (report.get("strichartz") or {}).get("pairs", []):
        qv = float(q) if not isinstance(q, str) else math.inf
        rv = float(r) if not isinstance(r, str) else math.inf
        checks.append(
            _check(f"admissible({q},{r})", fn.is_admissible(qv, rv, n), [q, r], "identity")
        )

    flux = report.get("mass_flux")
    if flux and "rows" in flux:
        for row in flux["rows"]:
            checks.append(
                _check(f"mass_flux_ratio(R={row['radius']:g})",
                       row["ratio"] <= row["tolerance"], row["ratio"], row["tolerance"])
            )
    hardy = report.get("hardy")
    if hardy and "rows" in hardy:
        checks.append(
            _check("hardy_ratio_sup", hardy["sweep_sup"] <= hardy["bound"],
                   hardy["sweep_sup"], hardy["bound"])
        )
    mor = report.get("morawetz")
    if mor:
        for row in mor["rows"]:
            checks.append(
                _check(f"morawetz_ratio(A={row['A']:g})", row["ratio"] <= row["bound"],
                       row["ratio"], row["bound"])
            )
    ident = report.get("momentum_flux_identity")
    if ident:
        checks.append(
            _check("momentum_flux_identity", ident["max_defect"] <= ident["tolerance"],
                   ident["max_defect"], ident["tolerance"])
        )
    for row in report.get("duhamel", []):
        checks.append(
            _check(f"duhamel(t0={row['t0']:g},t={row['t']:g})",
                   row["relative"] <= row["tolerance"], row["relative"], row["tolerance"])
        )

    # weight positivity at the scenario's dimension over the unit ball
    radii = np.linspace(0.0, 1.0, 257)
    pos_ok = True
    worst = math.inf
    for eps in s["analysis"]["morawetz_eps"]:
        _, lap_a, neg_bilap = fn.MorawetzWeight(float(eps), n).evaluate(radii)
        worst = min(worst, float(lap_a.min()), float(neg_bilap.min()))
        pos_ok = pos_ok and np.all(lap_a > 0) and np.all(neg_bilap > 0)
    checks.append(_check("weight_positivity", pos_ok, worst, 0.0, "min over |x|<=1"))

    conc_block = report.get("concentration")
    if conc_block and "decomposition" in conc_block:
        d = conc_block["decomposition"]
        eta = conc_block["eta"]
        masses = d["masses"]
        non_tail = masses[:-1] if d["tail_flag"] else masses
        window_ok = all(
            eta * (1 - 1e-9) <= m <= 2 * eta * (1 + 1e-9) for m in non_tail
        )
        checks.append(
            _check("interval_mass_window", window_ok,
                   [min(non_tail, default=eta), max(non_tail, default=eta)],
                   [eta, 2 * eta])
        )
        bdry = d["boundaries"]
        times = cons["times"]
        cover_ok = (
            abs(bdry[0] - times[0]) < 1e-9
            and abs(bdry[-1] - times[-1]) < 1e-9
            and all(b2 > b1 for b1, b2 in zip(bdry, bdry[1:]))
        )
        checks.append(_check("interval_coverage", cover_ok, [bdry[0], bdry[-1]],
                             [times[0], times[-1]]))
        exc = conc_block["exceptional"]
        checks.append(
            _check("exceptional_count_bound", exc["count"] <= exc["count_bound"],
                   exc["count"], exc["count_bound"])
        )
        stats = conc_block.get("window_statistics", {})
        if "largest_fraction_at_sup" in stats and stats["sup_half_norm_ratio"] > 0:
            product = stats["largest_fraction_at_sup"] * stats["sup_half_norm_ratio"] ** 2
            checks.append(
                _check("window_cauchy_schwarz", product >= 1.0 - 1e-9, product, 1.0,
                       "largest_fraction * half_norm_ratio^2 >= 1")
            )
        nest = conc_block.get("nest", {})
        if nest and not nest.get("empty"):
            checks.append(
                _check("nest_invariants", not nest["violations"],
                       nest["violations"], [], "dyadic decay and closeness")
            )
        for b in conc_block.get("bubbles", []):
            checks.append(
                _check(f"bubble(interval={b['interval']})",
                       b["radius"] > 0 and b["attained_mass"] >= b["threshold"],
                       b["attained_mass"], b["threshold"])
            )
    cert = report.get("resolution_certification")
    if cert and "measured_order" in cert:
        checks.append(
            _check("resolution_order", cert["measured_order"] >= 1.5,
                   cert["measured_order"], 1.5, "self-convergence of the splitting")
        )
    return checks


def verify_run(run_dir) -> list[dict]:
    """Verify a run directory holding report.json and optionally a
    trajectory store."""
    run_dir = Path(run_dir)
    report = read_json(run_dir / "report.json")
    store = run_dir / "trajectory"
    return verify_report(report, store if store.is_dir() else None)

"""Command-line pipeline: solve, simulate, analyze, report."""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import SimConfig, ensemble, stack
from .game import N_STRATEGIES, load_treatment
from .measures.collapse import (
    accumulated_curves,
    pulse_crossover_consistency,
    scan_crossovers,
    scan_pulses,
)
from .measures.cycles import cycle_loops, eigencycle_spectrum, loop_strength
from .measures.distribution import distance_evolution, time_average
from .session_io import (
    FormatError,
    Table,
    distribution_table,
    read_plays,
    read_trajectories,
    strategy_label,
    write_report,
    write_trajectories,
)
from .statics import SolverError, classify_domination, ieds, maximin_solve

OUT_ENV = "GAMEDYN_OUT_DIR"
INCOMPLETE = "INCOMPLETE"
MANIFEST = "manifest.json"
TREATMENTS = ("A", "B", "C")
LOOP_THRESHOLD = 0.05


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _out_dir(arg) -> Path:
    d = Path(arg or os.environ.get(OUT_ENV) or "gamedyn-out")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _cfg(args) -> SimConfig:
    return SimConfig(
        lam=args.lam,
        dt=args.dt,
        rounds=args.rounds,
        sessions=args.sessions,
        payoff_scale=args.payoff_scale,
        master_seed=args.seed,
    )


def _write_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _fmt_set(s) -> str:
    return ",".join(str(k) for k in sorted(s)) or "-"


# solve

def solve_treatment(treatment: str, mode: str = "weak-pure") -> dict:
    game = load_treatment(treatment)
    res = ieds(game, mode)
    sol = maximin_solve(game)
    return {
        "treatment": game.treatment,
        "ieds_mode": mode,
        "rounds": [{"round": k, "x": list(xs), "y": list(ys)} for k, xs, ys in res.round_table()],
        "survivors_x": sorted(res.survivors_x),
        "survivors_y": sorted(res.survivors_y),
        "equilibrium": {
            "rho_x": [round(float(v), 12) for v in sol.profile.rho_x],
            "rho_y": [round(float(v), 12) for v in sol.profile.rho_y],
            "value_x": round(sol.value_x, 12),
            "residual": sol.residual,
            "support_x": sorted(sol.support_x),
            "support_y": sorted(sol.support_y),
        },
    }


def solve_text(result: dict) -> str:
    lines = [f"Treatment {result['treatment']}  (IEDS mode {result['ieds_mode']})", ""]
    lines.append(f"{'round':>5}  {'X eliminated':<16}{'Y eliminated':<16}")
    for r in result["rounds"]:
        lines.append(f"{r['round']:>5}  {_fmt_set(r['x']):<16}{_fmt_set(r['y']):<16}")
    lines.append(f"{'surv.':>5}  {_fmt_set(result['survivors_x']):<16}{_fmt_set(result['survivors_y']):<16}")
    eq = result["equilibrium"]
    lines += ["", f"{'s':>3}  {'rho_QP(X)':>10}  {'rho_QP(Y)':>10}"]
    for k in range(N_STRATEGIES):
        lines.append(f"{k + 1:>3}  {eq['rho_x'][k]:>10.3f}  {eq['rho_y'][k]:>10.3f}")
    lines.append(f"value(X) = {eq['value_x']:.6g}   residual = {eq['residual']:.2e}")
    return "\n".join(lines) + "\n"


def cmd_solve(args) -> int:
    out = _out_dir(args.out) if args.out else None
    treatments = TREATMENTS if args.treatment.lower() == "all" else (args.treatment,)
    results = [solve_treatment(t, args.ieds_mode) for t in treatments]
    text = "".join(solve_text(r) + "\n" for r in results)
    sys.stdout.write(text)
    if out:
        _write_json(results if len(results) > 1 else results[0], out / "solve.json")
        (out / "solve.txt").write_text(text)
    return 0


# simulate

def cmd_simulate(args) -> int:
    cfg = _cfg(args)
    out = _out_dir(args.out)
    started = _now()
    game = load_treatment(args.treatment)
    ens = ensemble(game, cfg, workers=args.workers)
    path = out / f"trajectories_{game.treatment}.csv"
    write_trajectories(ens, path)
    _write_json(
        {
            "tool": "gamedyn",
            "version": __version__,
            "command": "simulate",
            "treatment": game.treatment,
            "cfg": cfg.as_dict(),
            "outputs": [path.name],
            "started_at": started,
            "finished_at": _now(),
        },
        out / MANIFEST,
    )
    print(path)
    return 0


# analyze

def _load_input(path: Path, kind: str):
    if kind == "auto":
        head = path.read_text().split("\n", 1)[0].strip()
        kind = "plays" if head.startswith("session,round,x_strategy") else "trajectories"
    if kind == "plays":
        return read_plays(path)
    return read_trajectories(path)


def accumulated_panel(ens, role: str) -> Table:
    acc = accumulated_curves(ens)
    off = 0 if role == "X" else N_STRATEGIES
    cols = ("round", *(f"{role}_{k}" for k in range(1, N_STRATEGIES + 1)))
    rows = tuple((t + 1, *acc[t, off : off + N_STRATEGIES]) for t in range(acc.shape[0]))
    return Table(cols, rows, ",")


def analyze_ensemble(
    ens,
    treatment: str,
    measures: str,
    out: Path,
    scale_windows: bool = False,
    dyn_cfg: SimConfig | None = None,
    dyn_prediction=None,
) -> dict:
    """Run the selected measures on ``ens`` and write their tables into ``out``."""
    game = load_treatment(treatment)
    tag = game.treatment
    selected = {"distribution", "cycle", "collapse"} if measures == "all" else {measures}
    summary: dict = {"treatment": tag}
    T = stack(ens).shape[1]

    if "distribution" in selected:
        qp = maximin_solve(game).profile.as_vector()
        if dyn_prediction is None:
            dyn_prediction = time_average(ensemble(game, dyn_cfg or SimConfig()), 1, (dyn_cfg or SimConfig()).rounds)
        d_qp = distance_evolution(ens, qp, scale_windows=scale_windows)
        d_dyn = distance_evolution(ens, dyn_prediction, scale_windows=scale_windows)
        early = time_average(ens, *d_qp.early_window)
        late = time_average(ens, *d_qp.late_window)
        write_report(
            distribution_table(tag, {"qp": qp, "dyn": dyn_prediction, "early": early, "late": late, "all": time_average(ens, 1, T)}),
            out / f"distribution_{tag}.tsv",
        )
        write_report(
            Table(
                ("treatment", "prediction", "window_early", "window_late", "delta_early", "delta_late", "delta_delta"),
                tuple(
                    (tag, name, "{}-{}".format(*d.early_window), "{}-{}".format(*d.late_window), *d.as_tuple())
                    for name, d in (("QP", d_qp), ("Dyn", d_dyn))
                ),
            ),
            out / f"distance_{tag}.tsv",
        )
        summary["dd_qp"] = d_qp.delta
        summary["dd_dyn"] = d_dyn.delta

    if "cycle" in selected:
        spec = eigencycle_spectrum(ens)
        write_report(spec, out / f"spectrum_{tag}.csv")
        loops = cycle_loops(spec, LOOP_THRESHOLD)
        write_report(
            Table(("treatment", "loop", "strength"), tuple((tag, str(lp), lp.strength) for lp in loops)),
            out / f"loops_{tag}.tsv",
        )
        summary["loop_strength"] = loop_strength(spec, LOOP_THRESHOLD)
        summary["spectrum_top4"] = [list(e[:3]) + [round(e[3], 4)] for e in spec.top(4)]

    if "collapse" in selected:
        dom = classify_domination(ieds(game))
        pulses = scan_pulses(ens, dom, treatment=tag)
        cross = scan_crossovers(ens, dom, treatment=tag)
        write_report(pulses, out / f"pulses_{tag}.tsv")
        write_report(cross, out / f"crossovers_{tag}.tsv")
        viol = pulse_crossover_consistency(ens, dom)
        write_report(
            Table(
                ("treatment", "dominated", "domination", "positive_until", "reason"),
                tuple((tag, strategy_label(v.dominated), strategy_label(v.domination), v.positive_until, v.reason) for v in viol),
            ),
            out / f"consistency_{tag}.tsv",
        )
        for role in ("X", "Y"):
            write_report(accumulated_panel(ens, role), out / f"accumulated_{tag}_{role}.csv")
        summary["n_pulses"] = len(pulses.rows)
        summary["top_pulse"] = (
            f"{strategy_label(pulses.rows[0].dominated)}>{strategy_label(pulses.rows[0].domination)}"
            f"@{pulses.rows[0].block[0]}-{pulses.rows[0].block[1]}"
            if pulses.rows
            else "-"
        )
        summary["red_arrows"] = len(cross.red_arrows())
        summary["consistency_violations"] = len(viol)
    return summary


def cmd_analyze(args) -> int:
    out = _out_dir(args.out_dir)
    try:
        ens = _load_input(Path(args.input), args.input_kind)
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    dyn_cfg = SimConfig(payoff_scale=args.payoff_scale, master_seed=args.seed)
    summary = analyze_ensemble(ens, args.treatment, args.measures, out, args.scale_windows, dyn_cfg)
    _write_json(summary, out / f"summary_{summary['treatment']}.json")
    print(json.dumps(summary, sort_keys=True))
    return 0


# report

def summary_table(summaries: list[dict]) -> Table:
    cols = ("treatment", "dd_qp", "dd_dyn", "loop_strength", "n_pulses", "top_pulse", "red_arrows", "consistency_violations")
    return Table(cols, tuple(tuple(s.get(c, "") for c in cols) for s in summaries))


def run_report(cfg: SimConfig, out: Path, treatments=TREATMENTS, workers: int = 1, ieds_mode: str = "weak-pure") -> list[dict]:
    summaries = []
    for t in treatments:
        sub = out / t
        sub.mkdir(parents=True, exist_ok=True)
        solved = solve_treatment(t, ieds_mode)
        _write_json(solved, sub / "solve.json")
        (sub / "solve.txt").write_text(solve_text(solved))
        game = load_treatment(t)
        ens = ensemble(game, cfg, workers=workers)
        write_trajectories(ens, sub / f"trajectories_{t}.csv")
        s = analyze_ensemble(ens, t, "all", sub, scale_windows=cfg.rounds < 1000, dyn_prediction=time_average(ens, 1, cfg.rounds))
        s["survivors_x"] = solved["survivors_x"]
        s["survivors_y"] = solved["survivors_y"]
        summaries.append(s)
    write_report(summary_table(summaries), out / "summary.tsv")
    strengths = {s["treatment"]: s["loop_strength"] for s in summaries}
    order = sorted(strengths, key=lambda k: -strengths[k])
    _write_json({"treatments": summaries, "loop_strength_order": order}, out / "summary.json")
    return summaries


def cmd_report(args) -> int:
    if args.manifest:
        man = json.loads(Path(args.manifest).read_text())
        c = man["cfg"]
        cfg = SimConfig(c["lambda"], c["dt"], c["rounds"], c["sessions"], c["payoff_scale"], c["master_seed"])
        treatments = tuple(man.get("treatments", TREATMENTS))
        ieds_mode = man.get("ieds_mode", "weak-pure")
    else:
        cfg = _cfg(args)
        treatments = TREATMENTS if args.treatment.lower() == "all" else (args.treatment.upper(),)
        ieds_mode = args.ieds_mode
    out = _out_dir(args.out_dir)
    marker = out / INCOMPLETE
    marker.write_text("report in progress\n")
    started = _now()
    try:
        summaries = run_report(cfg, out, treatments, args.workers, ieds_mode)
    except Exception as exc:  # leave the marker and fail loudly
        marker.write_text(f"report failed: {type(exc).__name__}: {exc}\n")
        print(f"error: {exc}", file=sys.stderr)
        return 1
    outputs = sorted(str(p.relative_to(out)) for p in out.rglob("*") if p.is_file() and p.name not in (MANIFEST, INCOMPLETE))
    _write_json(
        {
            "tool": "gamedyn",
            "version": __version__,
            "command": "report",
            "treatments": list(treatments),
            "ieds_mode": ieds_mode,
            "cfg": cfg.as_dict(),
            "outputs": outputs,
            "started_at": started,
            "finished_at": _now(),
        },
        out / MANIFEST,
    )
    marker.unlink()
    for s in summaries:
        print(
            f"{s['treatment']}: dd_qp={s['dd_qp']:+.4f} dd_dyn={s['dd_dyn']:+.4f} "
            f"loop={s['loop_strength']:.4f} pulses={s['n_pulses']} red={s['red_arrows']}"
        )
    return 0


def _add_sim_flags(p) -> None:
    d = SimConfig()
    p.add_argument("--lambda", dest="lam", type=float, default=d.lam, help="logit precision")
    p.add_argument("--dt", type=float, default=d.dt)
    p.add_argument("--rounds", type=int, default=d.rounds)
    p.add_argument("--sessions", type=int, default=d.sessions)
    p.add_argument("--seed", type=int, default=d.master_seed, help="master seed")
    p.add_argument("--payoff-scale", type=float, default=d.payoff_scale)
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gamedyn", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="IEDS rounds and maximin equilibrium")
    p.add_argument("--treatment", default="all")
    p.add_argument("--ieds-mode", choices=("weak-pure", "weak-mixed"), default="weak-pure")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", help="logit-dynamics ensemble to trajectory CSV")
    p.add_argument("--treatment", required=True)
    _add_sim_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="measures on a trajectory or play-record file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--input-kind", choices=("auto", "plays", "trajectories"), default="auto")
    p.add_argument("--treatment", required=True)
    p.add_argument("--measures", choices=("distribution", "cycle", "collapse", "all"), default="all")
    p.add_argument("--scale-windows", action="store_true", help="rescale distance windows to short runs")
    p.add_argument("--payoff-scale", type=float, default=1.0, help="for the Dyn prediction")
    p.add_argument("--seed", type=int, default=0, help="for the Dyn prediction")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("report", help="solve, simulate and analyze A, B, C")
    p.add_argument("--treatment", default="all")
    p.add_argument("--ieds-mode", choices=("weak-pure", "weak-mixed"), default="weak-pure")
    _add_sim_flags(p)
    p.add_argument("--manifest", help="replay the configuration of an earlier report")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

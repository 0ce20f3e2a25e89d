"""On-disk formats: play records, trajectories and report tables."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import SessionSeries
from .game import N_STRATEGIES, N_UNIFIED, role_of
from .measures.collapse import CrossoverReport, PulseReport, block_label
from .measures.cycles import Spectrum

PLAY_HEADER = ["session", "round", "x_strategy", "y_strategy"]
TRAJ_HEADER = (
    ["session", "round"]
    + [f"rx{k}" for k in range(1, N_STRATEGIES + 1)]
    + [f"ry{k}" for k in range(1, N_STRATEGIES + 1)]
)
TRAJ_SUM_TOL = 1e-6


class FormatError(ValueError):
    """Malformed input file; the message names the offending line or record."""


@dataclass(frozen=True)
class PlayRecord:
    session: int
    round: int
    x_strategy: int
    y_strategy: int


def _check_header(header, expected, path):
    if header is None or [h.strip() for h in header] != expected:
        raise FormatError(f"{path}: expected header {','.join(expected)}, got {header}")


def _contiguous(rounds_by_session: dict, path) -> None:
    for sid, rounds in rounds_by_session.items():
        rounds = sorted(rounds)
        if rounds[0] != 1:
            raise FormatError(f"{path}: session {sid} starts at round {rounds[0]}; rounds must be contiguous from 1")
        gaps = [b for a, b in zip(rounds, rounds[1:]) if b != a + 1]
        if gaps:
            raise FormatError(f"{path}: session {sid} has a gap in rounds before round {gaps[0]}")


def read_play_records(path) -> list[PlayRecord]:
    path = Path(path)
    out = []
    seen = set()
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        _check_header(next(reader, None), PLAY_HEADER, path)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise FormatError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
            try:
                sid, rnd, xs, ys = (int(c) for c in row)
            except ValueError:
                raise FormatError(f"{path}:{lineno}: non-integer field in {row}") from None
            for name, s in (("x_strategy", xs), ("y_strategy", ys)):
                if not 1 <= s <= N_STRATEGIES:
                    raise FormatError(f"{path}:{lineno}: {name} {s} outside 1..{N_STRATEGIES}")
            if (sid, rnd) in seen:
                raise FormatError(f"{path}:{lineno}: duplicate record for session {sid} round {rnd}")
            seen.add((sid, rnd))
            out.append(PlayRecord(sid, rnd, xs, ys))
    if not out:
        raise FormatError(f"{path}: no play records")
    by_session: dict[int, list[int]] = {}
    for r in out:
        by_session.setdefault(r.session, []).append(r.round)
    _contiguous(by_session, path)
    return out


def plays_to_ensemble(records) -> list[SessionSeries]:
    """Indicator profiles, one series per session in ascending session order."""
    by_session: dict[int, list[PlayRecord]] = {}
    for r in records:
        by_session.setdefault(r.session, []).append(r)
    out = []
    for sid in sorted(by_session):
        recs = sorted(by_session[sid], key=lambda r: r.round)
        prof = np.zeros((len(recs), N_UNIFIED))
        for k, r in enumerate(recs):
            prof[k, r.x_strategy - 1] = 1.0
            prof[k, N_STRATEGIES + r.y_strategy - 1] = 1.0
        out.append(SessionSeries(sid, "experimental", prof))
    return out


def read_plays(path) -> list[SessionSeries]:
    """Read a ``session,round,x_strategy,y_strategy`` file as an experimental ensemble."""
    return plays_to_ensemble(read_play_records(path))


def write_plays(records, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PLAY_HEADER)
        for r in sorted(records, key=lambda r: (r.session, r.round)):
            w.writerow([r.session, r.round, r.x_strategy, r.y_strategy])


def write_trajectories(ensemble, path) -> None:
    """Trajectory CSV with 9 significant digits per probability."""
    with Path(path).open("w", newline="") as fh:
        fh.write(",".join(TRAJ_HEADER) + "\n")
        for s in ensemble:
            for t, row in enumerate(s.profiles, start=1):
                fh.write(f"{s.session_id},{t}," + ",".join(f"{v:.9g}" for v in row) + "\n")


def read_trajectories(path, origin: str = "simulated") -> list[SessionSeries]:
    path = Path(path)
    data: dict[int, dict[int, np.ndarray]] = {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        _check_header(next(reader, None), TRAJ_HEADER, path)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(TRAJ_HEADER):
                raise FormatError(f"{path}:{lineno}: expected {len(TRAJ_HEADER)} fields, got {len(row)}")
            try:
                sid, rnd = int(row[0]), int(row[1])
                vals = np.array([float(c) for c in row[2:]])
            except ValueError:
                raise FormatError(f"{path}:{lineno}: malformed number in row") from None
            where = f"{path}:{lineno}: session {sid} round {rnd}"
            if not np.all(np.isfinite(vals)) or vals.min() < 0:
                raise FormatError(f"{where}: negative or non-finite probability")
            for role, part in (("X", vals[:N_STRATEGIES]), ("Y", vals[N_STRATEGIES:])):
                if abs(part.sum() - 1.0) > TRAJ_SUM_TOL:
                    raise FormatError(f"{where}: {role} probabilities sum to {part.sum():.9g}")
            rounds = data.setdefault(sid, {})
            if rnd in rounds:
                raise FormatError(f"{where}: duplicate row")
            rounds[rnd] = vals
    if not data:
        raise FormatError(f"{path}: no trajectory rows")
    _contiguous({k: list(v) for k, v in data.items()}, path)
    return [
        SessionSeries(sid, origin, np.array([data[sid][t] for t in range(1, len(data[sid]) + 1)]))
        for sid in sorted(data)
    ]


# Reports

@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    delimiter: str = "\t"


def format_number(v) -> str:
    """Round to 4 decimals and drop trailing zeros (``17.0 -> '17'``)."""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    s = f"{float(v):.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def strategy_label(u: int) -> str:
    role, s = role_of(u)
    return f"{role}_{s}"


def pulse_table(report: PulseReport) -> Table:
    rows = tuple(
        (
            report.treatment,
            strategy_label(r.dominated),
            strategy_label(r.domination),
            block_label(r.block),
            r.p_value,
            r.psi,
            r.n,
        )
        for r in report.rows
    )
    return Table(("treatment", "dominated", "domination", "block", "p", "psi", "n"), rows)


def crossover_table(report: CrossoverReport) -> Table:
    rows = tuple(
        (report.treatment, strategy_label(c.domination), strategy_label(c.other), c.tau, c.kind)
        for c in report.rows
    )
    return Table(("treatment", "domination", "dominated", "tau", "kind"), rows)


def spectrum_table(spectrum: Spectrum) -> Table:
    return Table(("x", "m", "n", "value"), tuple(spectrum.entries), ",")


def distribution_table(treatment: str, columns: dict) -> Table:
    """One row per unified strategy, one column per named 16-vector."""
    names = tuple(columns)
    rows = []
    for u in range(1, N_UNIFIED + 1):
        rows.append((treatment, strategy_label(u), *(float(columns[k][u - 1]) for k in names)))
    return Table(("treatment", "strategy", *names), tuple(rows))


def as_table(report) -> Table:
    if isinstance(report, Table):
        return report
    if isinstance(report, PulseReport):
        return pulse_table(report)
    if isinstance(report, CrossoverReport):
        return crossover_table(report)
    if isinstance(report, Spectrum):
        return spectrum_table(report)
    raise TypeError(f"cannot render {type(report).__name__} as a report table")


def render_report(report, fmt: str = "tsv") -> str:
    table = as_table(report)
    if fmt == "tsv":
        lines = [table.delimiter.join(table.columns)]
        lines += [table.delimiter.join(format_number(v) for v in row) for row in table.rows]
        return "\n".join(lines) + "\n"
    if fmt == "json":
        rows = [{c: format_number(v) for c, v in zip(table.columns, row)} for row in table.rows]
        return json.dumps({"columns": list(table.columns), "rows": rows}, indent=2) + "\n"
    raise ValueError(f"unknown report format {fmt!r}; use 'tsv' or 'json'")


def write_report(report, path, fmt: str = "tsv") -> None:
    text = render_report(report, fmt)
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def read_report(path, fmt: str = "tsv", delimiter: str | None = None) -> Table:
    """Read a report back as a table of strings."""
    text = Path(path).read_text()
    if fmt == "json":
        obj = json.loads(text)
        cols = tuple(obj["columns"])
        return Table(cols, tuple(tuple(r[c] for c in cols) for r in obj["rows"]))
    lines = text.splitlines()
    if delimiter is None:
        delimiter = "\t" if "\t" in lines[0] else ","
    cols = tuple(lines[0].split(delimiter))
    return Table(cols, tuple(tuple(ln.split(delimiter)) for ln in lines[1:]), delimiter)

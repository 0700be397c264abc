"""Experiment grid runner, CSV/JSON reports and verdicts."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .counters import ALGORITHMS, RUNNERS
from .errors import DomainError
from .predictors import predict
from .stats import Z99, StatsSummary, summarize
from .streams import derive_trial_seed, generate_colours

CSV_COLUMNS = (
    "algorithm", "m", "n", "trials", "seed", "mean", "std",
    "ci99_low", "ci99_high", "expected", "rel_err_pct", "within_ci",
)

DEFAULT_LENGTHS = (250, 10_000, 250)
DESK_LENGTHS = (250, 5_000, 250)
DEFAULT_COLOURS = (2, 3, 5, 10)
VERIFY_MODES = ("always", "pseudocode")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    algorithms: tuple[str, ...] = ALGORITHMS
    colour_counts: tuple[int, ...] = DEFAULT_COLOURS
    lengths: tuple[int, int, int] = DESK_LENGTHS
    trials: int = 100
    master_seed: int = 0
    output_path: str | None = None
    workers: int = 1
    z: float = Z99
    # "always": verification runs even when phase 1 already ruled out a
    # majority, matching the cost model of the predictors; "pseudocode" skips it
    verify: str = "always"

    def __post_init__(self) -> None:
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown or not self.algorithms:
            raise ConfigError(f"algorithms must be a non-empty subset of {ALGORITHMS}, got {self.algorithms}")
        start, stop, step = self.lengths
        if start < 1 or step < 1 or stop < start:
            raise ConfigError(f"lengths need 1 <= start <= stop and step >= 1, got {self.lengths}")
        if stop >= 1 << 24:
            raise ConfigError("lengths must stay below 2**24")
        if not self.colour_counts or any(not 2 <= m < 256 for m in self.colour_counts):
            raise ConfigError(f"colour counts must lie in [2, 256), got {self.colour_counts}")
        if self.trials < 2:
            raise ConfigError("trials must be >= 2 to form a confidence interval")
        if not 0 <= self.master_seed < 1 << 64:
            raise ConfigError("master seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.verify not in VERIFY_MODES:
            raise ConfigError(f"verify must be one of {VERIFY_MODES}, got {self.verify!r}")

    def length_values(self) -> list[int]:
        start, stop, step = self.lengths
        return list(range(start, stop + 1, step))

    def cells(self) -> list[tuple[str, int, int]]:
        return [
            (a, m, n)
            for a in sorted(self.algorithms)
            for m in sorted(set(self.colour_counts))
            for n in self.length_values()
        ]


@dataclass(frozen=True)
class ReportRow:
    algorithm: str
    m: int
    n: int
    trials: int
    seed: int
    stats: StatsSummary

    @property
    def key(self) -> tuple[str, int, int]:
        return (self.algorithm, self.m, self.n)


@dataclass
class ExperimentReport:
    rows: list[ReportRow]
    config: ExperimentConfig | None = None
    provenance: dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.rows.sort(key=lambda r: r.key)

    def row(self, algorithm: str, m: int, n: int) -> ReportRow:
        for r in self.rows:
            if r.key == (algorithm, m, n):
                return r
        raise KeyError((algorithm, m, n))


def cell_id(m: int, n: int) -> int:
    """Stream-cell identifier shared by every algorithm run on (m, n)."""
    return (m << 24) | n


def _simulate_cell(args: tuple[tuple[str, ...], int, int, int, int, bool]) -> dict[str, list[int]]:
    algorithms, m, n, trials, master_seed, always_verify = args
    runners = [(a, RUNNERS[a]) for a in algorithms]
    totals: dict[str, list[int]] = {a: [] for a in algorithms}
    cid = cell_id(m, n)
    for t in range(trials):
        balls = generate_colours(n, m, derive_trial_seed(master_seed, cid, t)).tolist()
        for a, runner in runners:
            totals[a].append(runner(balls, always_verify=always_verify).tally.total)
    return totals


def expected_for(algorithm: str, n: int, m: int) -> float | None:
    try:
        return predict(algorithm, n, m).expected_total
    except DomainError:
        return None


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Simulate every (algorithm, m, n) cell and compare with its predictor.

    All algorithms in a cell see the same ``trials`` streams.  Cells may run
    in worker processes; results are keyed by cell so the report does not
    depend on the worker count.  Writes the report when ``output_path`` is set.
    """
    if config.output_path is not None:
        _check_writable(Path(config.output_path))
    algorithms = tuple(sorted(config.algorithms))
    jobs = [
        (algorithms, m, n, config.trials, config.master_seed, config.verify == "always")
        for m in sorted(set(config.colour_counts))
        for n in config.length_values()
    ]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outputs = list(pool.map(_simulate_cell, jobs))
    else:
        outputs = [_simulate_cell(job) for job in jobs]

    rows = []
    for (_, m, n, trials, seed, _), totals in zip(jobs, outputs):
        for a in algorithms:
            stats = summarize(totals[a], expected_for(a, n, m), z=config.z)
            rows.append(ReportRow(a, m, n, trials, seed, stats))
    report = ExperimentReport(
        rows, config, {"master_seed": config.master_seed, "version": __version__}
    )
    if config.output_path is not None:
        write_report(report, config.output_path)
    return report


def _check_writable(path: Path) -> None:
    parent = path.parent if str(path.parent) else Path(".")
    if path.is_dir():
        raise OSError(f"cannot write report to {path}: is a directory")
    if not parent.is_dir():
        raise OSError(f"cannot write report to {path}: directory {parent} does not exist")
    if not os.access(parent, os.W_OK):
        raise OSError(f"cannot write report to {path}: directory {parent} is not writable")


# --- rendering ---------------------------------------------------------------

def _fmt(x: float | None) -> str:
    if x is None:
        return ""
    return f"{x:.6g}"


def _row_values(row: ReportRow) -> dict[str, str]:
    s = row.stats
    return {
        "algorithm": row.algorithm,
        "m": str(row.m),
        "n": str(row.n),
        "trials": str(row.trials),
        "seed": str(row.seed),
        "mean": _fmt(s.mean),
        "std": _fmt(s.sample_std),
        "ci99_low": _fmt(s.ci99_low),
        "ci99_high": _fmt(s.ci99_high),
        "expected": _fmt(s.expected),
        "rel_err_pct": _fmt(s.rel_err_pct),
        "within_ci": "" if s.within_ci is None else str(s.within_ci).lower(),
    }


def render_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in sorted(report.rows, key=lambda r: r.key):
        writer.writerow(_row_values(row))
    return buf.getvalue()


def _json_value(column: str, text: str):
    if text == "":
        return None
    if column == "algorithm":
        return text
    if column == "within_ci":
        return text == "true"
    if column in ("m", "n", "trials", "seed"):
        return int(text)
    return float(text)


def render_json(report: ExperimentReport) -> str:
    rows = []
    for row in sorted(report.rows, key=lambda r: r.key):
        rows.append({k: _json_value(k, v) for k, v in _row_values(row).items()})
    return json.dumps(rows, indent=2) + "\n"


def write_report(report: ExperimentReport, path: str | os.PathLike, fmt: str | None = None) -> Path:
    path = Path(path)
    if fmt is None:
        fmt = "json" if path.suffix.lower() == ".json" else "csv"
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown report format {fmt!r}")
    text = render_csv(report) if fmt == "csv" else render_json(report)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
    return path


def _parse_row(record: dict[str, object]) -> ReportRow:
    def num(key):
        v = record.get(key)
        return None if v in (None, "") else float(v)

    within = record.get("within_ci")
    if isinstance(within, str):
        within = None if within == "" else within == "true"
    stats = StatsSummary(
        count=int(record["trials"]),
        mean=num("mean"),
        sample_std=num("std"),
        ci99_low=num("ci99_low"),
        ci99_high=num("ci99_high"),
        expected=num("expected"),
        rel_err_pct=num("rel_err_pct"),
        within_ci=within,
    )
    return ReportRow(
        str(record["algorithm"]), int(record["m"]), int(record["n"]),
        int(record["trials"]), int(record["seed"]), stats,
    )


def read_report(path: str | os.PathLike) -> ExperimentReport:
    path = Path(path)
    with open(path, newline="") as fh:
        text = fh.read()
    if path.suffix.lower() == ".json":
        records = json.loads(text)
    else:
        reader = csv.DictReader(io.StringIO(text))
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected CSV header {reader.fieldnames}")
        records = list(reader)
    return ExperimentReport([_parse_row(r) for r in records])


# --- verdicts ----------------------------------------------------------------

@dataclass(frozen=True)
class GroupVerdict:
    algorithm: str
    m: int
    cells: int
    ci_fraction: float
    mean_rel_err_pct: float
    passed: bool


@dataclass(frozen=True)
class Verdict:
    groups: list[GroupVerdict]
    excluded: list[tuple[str, int, int]]
    max_rel_err_pct: float
    min_ci_fraction: float

    @property
    def passed(self) -> bool:
        return bool(self.groups) and all(g.passed for g in self.groups)

    def lines(self) -> list[str]:
        out = [
            f"{g.algorithm:<17} m={g.m:<3} cells={g.cells:<4} "
            f"within_ci={g.ci_fraction:.3f} mean_rel_err={g.mean_rel_err_pct:.4f}% "
            f"{'PASS' if g.passed else 'FAIL'}"
            for g in self.groups
        ]
        for a, m, n in self.excluded:
            out.append(f"excluded {a} m={m} n={n}: no usable prediction")
        out.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return out


def validate_report(
    report: ExperimentReport,
    max_rel_err_pct: float = 0.5,
    min_ci_fraction: float = 0.95,
    min_length: int = 0,
) -> Verdict:
    """Per (algorithm, m): share of cells whose prediction lies in the CI and
    the mean relative error over cells with n >= ``min_length``.

    Cells without a positive prediction are excluded and listed.
    """
    excluded = []
    grouped: dict[tuple[str, int], list[ReportRow]] = {}
    for row in report.rows:
        s = row.stats
        if s.expected is None or s.expected <= 0 or s.rel_err_pct is None:
            excluded.append(row.key)
            continue
        grouped.setdefault((row.algorithm, row.m), []).append(row)

    groups = []
    for (a, m), rows in sorted(grouped.items()):
        ci_frac = sum(bool(r.stats.within_ci) for r in rows) / len(rows)
        errs = [r.stats.rel_err_pct for r in rows if r.n >= min_length]
        mean_err = math.fsum(errs) / len(errs) if errs else math.nan
        passed = ci_frac >= min_ci_fraction and bool(errs) and mean_err <= max_rel_err_pct
        groups.append(GroupVerdict(a, m, len(rows), ci_frac, mean_err, passed))
    return Verdict(groups, excluded, max_rel_err_pct, min_ci_fraction)


# --- config files ------------------------------------------------------------

CONFIG_KEYS = ("algorithms", "colours", "lengths", "trials", "seed", "out", "workers", "z", "verify")


def parse_lengths(text: str) -> tuple[int, int, int]:
    parts = text.split(":")
    if len(parts) == 1:
        n = int(parts[0])
        return (n, n, 1)
    if len(parts) != 3:
        raise ConfigError(f"lengths must be start:stop:step, got {text!r}")
    return tuple(int(p) for p in parts)  # type: ignore[return-value]


def parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.replace(",", " ").split())


def parse_name_list(text: str) -> tuple[str, ...]:
    return tuple(t for t in text.replace(",", " ").split())


def config_from_mapping(values: dict[str, str], base: ExperimentConfig | None = None) -> ExperimentConfig:
    unknown = set(values) - set(CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    cfg = base or ExperimentConfig()
    changes: dict[str, object] = {}
    try:
        if "algorithms" in values:
            changes["algorithms"] = parse_name_list(values["algorithms"])
        if "colours" in values:
            changes["colour_counts"] = parse_int_list(values["colours"])
        if "lengths" in values:
            changes["lengths"] = parse_lengths(values["lengths"])
        if "trials" in values:
            changes["trials"] = int(values["trials"])
        if "seed" in values:
            changes["master_seed"] = int(values["seed"])
        if "out" in values:
            changes["output_path"] = values["out"]
        if "workers" in values:
            changes["workers"] = int(values["workers"])
        if "z" in values:
            changes["z"] = float(values["z"])
        if "verify" in values:
            changes["verify"] = values["verify"]
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    return replace(cfg, **changes)


def load_config(path: str | os.PathLike) -> dict[str, str]:
    """Read ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    values: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
    return values


def sorted_rows(rows: Iterable[ReportRow]) -> Sequence[ReportRow]:
    return sorted(rows, key=lambda r: r.key)

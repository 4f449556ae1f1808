"""Monte-Carlo simulation study: configuration, replicate runner and result files."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import LinAlgError
from threadpoolctl import threadpool_limits

from .errors import ConfigError, SNSSError
from .estimators import fit, parse_method
from .fields import SettingSpec, sample_setting
from .geometry import NearestCenters, Rect, draw_centers, gen_skewed_coords, gen_uniform_coords, make_partition
from .io import write_csv
from .metrics import mdi

log = logging.getLogger(__name__)

PATTERNS = ("uniform", "skewed")
DEFAULT_METHODS = (
    "sd@halve-x",
    "sd@halve-y",
    "jd@grid:2x2",
    "sjd@grid:2x2/f0+ball:2",
    "sjd@grid:2x2/f0+ring:0:2",
    "sbss/ball:2",
    "sbss/ring:0:2",
    "fobi",
)
RESULT_COLUMNS = ("setting", "pattern", "n_side", "method", "partition", "kernels", "rep", "seed", "mdi", "converged")
SUMMARY_COLUMNS = ("setting", "pattern", "n_side", "method", "partition", "kernels", "reps", "n_ok", "mean_mdi")
N_CLUSTERS = 3


@dataclass
class StudyConfig:
    settings: tuple = (1, 2, 3, 4, 5, 6)
    patterns: tuple = PATTERNS
    n_sides: tuple = (20, 30, 40)
    reps: int = 100
    methods: tuple = field(default_factory=lambda: tuple(parse_method(m) for m in DEFAULT_METHODS))
    seed: int = 20210101

    def __post_init__(self):
        for s in self.settings:
            if s not in range(1, 7):
                raise ConfigError(f"setting {s} is not in 1..6")
        for p in self.patterns:
            if p not in PATTERNS:
                raise ConfigError(f"unknown pattern {p!r}; expected uniform or skewed")
        for n in self.n_sides:
            if n < 1:
                raise ConfigError(f"n_side must be >= 1, got {n}")
        if self.reps < 1:
            raise ConfigError("reps must be >= 1")
        if not self.methods:
            raise ConfigError("at least one method is required")

    def resolved(self) -> dict:
        return {
            "settings": ",".join(map(str, self.settings)),
            "patterns": ",".join(self.patterns),
            "n_sides": ",".join(map(str, self.n_sides)),
            "reps": str(self.reps),
            "methods": ",".join(m.label for m in self.methods),
            "seed": str(self.seed),
        }


def _int_list(key, text):
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise ConfigError(f"{key}: expected comma-separated integers, got {text!r}") from None


def _int(key, text):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {line_no}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lower().replace("-", "_")] = value
    return out


def study_config(values: dict) -> StudyConfig:
    known = {"settings", "patterns", "n_sides", "reps", "methods", "seed"}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    kw = {}
    if "settings" in values:
        kw["settings"] = _int_list("settings", values["settings"])
    if "patterns" in values:
        kw["patterns"] = tuple(p.strip().lower() for p in values["patterns"].split(",") if p.strip())
    if "n_sides" in values:
        kw["n_sides"] = _int_list("n_sides", values["n_sides"])
    if "reps" in values:
        kw["reps"] = _int("reps", values["reps"])
    if "seed" in values:
        kw["seed"] = _int("seed", values["seed"])
    if "methods" in values:
        kw["methods"] = tuple(parse_method(m) for m in values["methods"].split(",") if m.strip())
    return StudyConfig(**kw)


def load_config(path) -> StudyConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return study_config(parse_config_text(text))


def replicate_seed(base: int, setting: int, pattern: str, n_side: int, rep: int) -> int:
    """Counter-based seed of one replicate; independent of run order."""
    ss = np.random.SeedSequence([base, setting, PATTERNS.index(pattern), n_side, rep])
    return int(ss.generate_state(1, np.uint64)[0])


def simulate_replicate(setting: int, pattern: str, n_side: int, seed: int):
    """Coordinates, clusters and observed data of one replicate."""
    coord_ss, center_ss, field_ss = np.random.SeedSequence(seed).spawn(3)
    gen = gen_uniform_coords if pattern == "uniform" else gen_skewed_coords
    coords = gen(n_side, coord_ss)
    domain = Rect.square(n_side)
    centers = draw_centers(domain, center_ss, N_CLUSTERS)
    clusters = make_partition(coords, NearestCenters(tuple(map(tuple, centers))), domain, require_nonempty=False)
    spec = SettingSpec(setting)
    return sample_setting(coords, clusters, spec, field_ss), spec, domain


def run_replicate(task):
    """Evaluate every method on one replicate; returns result rows."""
    setting, pattern, n_side, rep, seed, methods = task
    with threadpool_limits(limits=1):
        try:
            data, spec, domain = simulate_replicate(setting, pattern, n_side, seed)
        except (SNSSError, LinAlgError) as exc:
            log.warning("setting %d %s n=%d rep %d: simulation failed: %s", setting, pattern, n_side, rep, exc)
            data = None
        rows = []
        for order, m in enumerate(methods):
            value, converged = None, None
            if data is not None:
                try:
                    model = fit(m, data, domain)
                    value = mdi(model.W @ spec.A)
                    converged = model.converged
                except (SNSSError, LinAlgError, ValueError) as exc:
                    log.warning("setting %d %s n=%d rep %d %s: %s", setting, pattern, n_side, rep, m.label, exc)
            rows.append((order, (setting, pattern, n_side, m.name, m.partition_label, m.kernels_label, rep, seed, value, converged)))
        return rows


def run_study(config: StudyConfig, threads: int = 1) -> list:
    """Run the whole study. Rows are sorted by (setting, pattern, n_side, method, rep)."""
    tasks = [
        (s, p, n, r, replicate_seed(config.seed, s, p, n, r), config.methods)
        for s in config.settings
        for p in config.patterns
        for n in config.n_sides
        for r in range(config.reps)
    ]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(run_replicate, tasks, chunksize=1))
    else:
        chunks = [run_replicate(t) for t in tasks]
    keyed = [item for chunk in chunks for item in chunk]
    pattern_rank = {p: i for i, p in enumerate(PATTERNS)}
    keyed.sort(key=lambda it: (it[1][0], pattern_rank[it[1][1]], it[1][2], it[0], it[1][6]))
    return [row for _, row in keyed]


def summarize(rows) -> list:
    """Mean MDI per (setting, pattern, n_side, method, partition, kernels), in row order."""
    groups: dict = {}
    for row in rows:
        groups.setdefault(row[:6], []).append(row[8])
    out = []
    for key, vals in groups.items():
        ok = [v for v in vals if v is not None]
        mean = math.fsum(ok) / len(ok) if ok else None
        out.append((*key, len(vals), len(ok), mean))
    return out


def write_study(out_dir, config: StudyConfig, rows) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "results.csv", RESULT_COLUMNS, rows)
    write_csv(out / "summary.csv", SUMMARY_COLUMNS, summarize(rows))
    echo = "".join(f"{k} = {v}\n" for k, v in config.resolved().items())
    (out / "config.resolved.txt").write_text(echo, encoding="utf-8")

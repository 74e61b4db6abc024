"""Monte-Carlo frame error rates of punctured codes over channel sweeps."""
from __future__ import annotations

import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Optional, Sequence

import numpy as np

from .channels import CLAMP, SNR_MODES, ChannelModel, parse_channel, parse_sweep
from .decoder import EdgeLayout, decode_batch
from .graph import TannerGraph, read_alist
from .puncturing import (
    PuncturePattern,
    RunStats,
    make_rng,
    pattern_run_stats,
    random_puncture,
    read_pattern,
    untainted_puncture,
)

PATTERN_SOURCES = ("none", "untainted", "untainted-lowest", "random")
RESULT_HEADER = "seed,channel,param,frames,frame_errors,fer,bit_errors,stderr,seconds"


class ConfigError(ValueError):
    pass


class UnreachablePuncturing(ValueError):
    """The untainted loop ran out of candidates before the target p."""


@dataclass
class ExperimentConfig:
    graph: str = ""
    pattern: str = "untainted"
    pi: Optional[float] = 0.05
    channels: list = field(default_factory=list)
    seeds: list = field(default_factory=lambda: [1, 2, 3])
    max_iter: int = 200
    early_stop: bool = True
    clamp: float = CLAMP
    min_errors: int = 100
    max_frames: int = 1_000_000
    block: int = 128
    snr_mode: str = "ebn0"
    timing: bool = False

    def validate(self) -> None:
        src = self.pattern
        if not (src in PATTERN_SOURCES or src.startswith("file:")):
            raise ConfigError(f"unknown pattern source {src!r}")
        if self.pi is not None and not 0.0 <= self.pi < 1.0:
            raise ConfigError("pi must be in [0,1)")
        if self.pi is None and not src.startswith("file:") and src != "none":
            raise ConfigError(f"pattern source {src!r} needs pi")
        if not self.channels:
            raise ConfigError("channel sweep is empty")
        if not self.seeds:
            raise ConfigError("no seeds given")
        if self.snr_mode not in SNR_MODES:
            raise ConfigError(f"snr_mode must be one of {SNR_MODES}")
        if self.min_errors < 1 or self.max_frames < 1 or self.block < 1 or self.max_iter < 1:
            raise ConfigError("min_errors, max_frames, block and max_iter must be >= 1")


_BOOL = {"1": True, "true": True, "yes": True, "on": True, "0": False, "false": False, "no": False, "off": False}


def _coerce(key: str, value: str):
    if key in ("channels",):
        return parse_sweep(value)
    if key == "seeds":
        return [int(x) for x in value.replace(",", " ").split()]
    if key in ("max_iter", "min_errors", "max_frames", "block"):
        return int(float(value))
    if key == "clamp":
        return float(value)
    if key == "pi":
        return None if value.strip().lower() in ("", "none", "-") else float(value)
    if key in ("early_stop", "timing"):
        try:
            return _BOOL[value.strip().lower()]
        except KeyError:
            raise ConfigError(f"{key} expects a boolean, got {value!r}") from None
    return value.strip()


def parse_config(text: str, base: Optional[ExperimentConfig] = None) -> ExperimentConfig:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    cfg = base or ExperimentConfig()
    names = {f.name for f in fields(ExperimentConfig)}
    for ln, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {ln}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in names:
            raise ConfigError(f"line {ln}: unknown key {key!r}")
        setattr(cfg, key, _coerce(key, value))
    return cfg


def apply_overrides(cfg: ExperimentConfig, overrides: dict) -> ExperimentConfig:
    for key, value in overrides.items():
        if value is None:
            continue
        setattr(cfg, key, _coerce(key, value) if isinstance(value, str) else value)
    return cfg


@dataclass
class FerPoint:
    seed: int
    channel: str
    param: str
    frames: int
    frame_errors: int
    bit_errors: int
    seconds: float = 0.0
    channel_index: int = 0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0

    @property
    def stderr(self) -> float:
        p = self.fer
        return math.sqrt(p * (1 - p) / self.frames) if self.frames else 0.0


@dataclass
class FerRun:
    points: list
    patterns: dict
    median_seed: dict  # point index -> seed
    config: ExperimentConfig

    def by_point(self) -> list:
        """Rows grouped per channel point: list of lists of FerPoint."""
        npts = len(self.config.channels)
        return [[p for p in self.points if p.channel_index == i] for i in range(npts)]

    def summary(self) -> list:
        """Intermediate performer per channel point."""
        out = []
        for i, _ in enumerate(self.config.channels):
            seed = self.median_seed[i]
            out.append(next(p for p in self.points if p.channel_index == i and p.seed == seed))
        return out


def target_p(n: int, pi: float) -> int:
    return int(round(pi * n))


def make_pattern(g: TannerGraph, cfg: ExperimentConfig, seed: int) -> PuncturePattern:
    src = cfg.pattern
    if src.startswith("file:"):
        pat = read_pattern(src[5:])
        if pat.n != g.n:
            raise ConfigError(f"pattern is for n={pat.n}, graph has n={g.n}")
        if cfg.pi is None:
            return pat
        p = target_p(g.n, cfg.pi)
        if p > pat.p:
            raise UnreachablePuncturing(f"pattern file has p={pat.p}, target p={p}")
        return pat.prefix(p)
    p = 0 if src == "none" or cfg.pi is None else target_p(g.n, cfg.pi)
    if p == 0:
        return PuncturePattern((), g.n, seed, "random" if src == "random" else "full-N2")
    if src == "random":
        return random_puncture(g, p, seed)
    crit = "lowest-degree" if src == "untainted-lowest" else "full-N2"
    pat = untainted_puncture(g, seed, p, crit)
    if pat.p < p:
        raise UnreachablePuncturing(
            f"untainted pattern exhausted at p={pat.p} (seed {seed}), target p={p}; achieved p_max={pat.p}"
        )
    return pat


def point_rate(g: TannerGraph, p: int, mode: str) -> float:
    """Code rate used to convert an SNR in dB to a noise level."""
    if mode == "ebn0-mother":
        return g.design_rate
    return (g.n - g.m) / (g.n - p)


def simulate_point(
    layout: EdgeLayout,
    mask: np.ndarray,
    ch: ChannelModel,
    key: tuple,
    cfg: ExperimentConfig,
) -> tuple[int, int, int]:
    """Frames, frame errors and bit errors for one channel point.

    Frames are drawn in blocks of ``cfg.block``; block ``b`` uses stream
    ``key + (b,)``. The stop rule is checked after every block.
    """
    frames = ferr = berr = 0
    b = 0
    while frames < cfg.max_frames and ferr < cfg.min_errors:
        B = min(cfg.block, cfg.max_frames - frames)
        rng = make_rng(*key, b)
        llr = ch.sample_zero((B, layout.n), rng, cfg.clamp)
        llr[:, mask] = 0.0
        hard, _, _, _ = decode_batch(layout, llr, cfg.max_iter, cfg.early_stop, cfg.clamp)
        wrong = hard.sum(axis=1)
        frames += B
        ferr += int(np.count_nonzero(wrong))
        berr += int(wrong.sum())
        b += 1
    return frames, ferr, berr


def _run_task(args):
    g, cfg, seed, pidx = args
    pat = make_pattern(g, cfg, seed)
    rate = point_rate(g, pat.p, cfg.snr_mode)
    ch = parse_channel(cfg.channels[pidx], rate, cfg.snr_mode)
    layout = EdgeLayout(g)
    t0 = time.perf_counter()
    frames, ferr, berr = simulate_point(layout, pat.mask, ch, (seed, pidx), cfg)
    dt = time.perf_counter() - t0
    return FerPoint(seed, ch.kind, ch.label, frames, ferr, berr, dt, pidx)


def run_fer(cfg: ExperimentConfig, g: Optional[TannerGraph] = None, threads: int = 1) -> FerRun:
    """Sweep every (seed, channel point) pair and pick the median-FER seed.

    Each pair is self-contained, so results do not depend on ``threads``.
    """
    cfg.validate()
    if g is None:
        g = read_alist(cfg.graph)
    patterns = {s: make_pattern(g, cfg, s) for s in cfg.seeds}
    tasks = [(g, cfg, s, i) for s in cfg.seeds for i in range(len(cfg.channels))]
    if threads <= 1:
        points = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(threads) as ex:
            points = list(ex.map(_run_task, tasks))
    median = {}
    for i in range(len(cfg.channels)):
        row = [(p.fer, k, p.seed) for k, p in enumerate(points) if p.channel_index == i]
        row.sort()
        median[i] = row[(len(row) - 1) // 2][2]
    return FerRun(points, patterns, median, cfg)


def _fmt(x: float) -> str:
    return f"{x:.6e}"


def fer_csv(run: FerRun, summary: bool = False) -> str:
    """Result rows; ``summary`` appends a ``median`` flag column."""
    buf = io.StringIO()
    buf.write(RESULT_HEADER + (",median" if summary else "") + "\n")
    for pt in run.points:
        secs = _fmt(pt.seconds) if run.config.timing else ""
        row = [str(pt.seed), pt.channel, pt.param, str(pt.frames), str(pt.frame_errors),
               _fmt(pt.fer), str(pt.bit_errors), _fmt(pt.stderr), secs]
        if summary:
            row.append("1" if run.median_seed[pt.channel_index] == pt.seed else "0")
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


@dataclass
class Table1Row:
    code: str
    p_min: int
    p_max: int
    stats: RunStats


def table1_stats(
    graphs: Sequence[tuple[str, TannerGraph]],
    runs: int = 5000,
    base_seed: int = 0,
    criterion: str = "full-N2",
    threads: int = 1,
) -> list:
    rows = []
    for name, g in graphs:
        st = pattern_run_stats(g, runs, base_seed, criterion, threads)
        rows.append(Table1Row(name, st.p_min, st.p_max, st))
    return rows


def config_dict(cfg: ExperimentConfig) -> dict:
    return asdict(cfg)

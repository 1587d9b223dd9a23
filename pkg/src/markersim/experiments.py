"""Config-driven experiment sweeps with deterministic seeding and CSV output.

An experiment is a TOML file describing a grid of (code, period, channel,
...) points.  Grid points are enumerated in a fixed nested order, and point
i draws randomness from stream (i << 32) + trial of the master seed, so
results do not depend on how work is scheduled across processes.
"""

from __future__ import annotations

import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, List, Optional, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - python < 3.11
    import tomli as tomllib

from .alphabet import parse_symbols
from .channel import ChannelParams, RngSeed
from .ldpc import LdpcCode, gallager_construct, load_code
from .marker import HALF, STANDARD, MarkerSpec
from .metrics import DEFAULT_FRAME_BITS, HistogramSpec, mi_campaign
from .pipeline import Schedule, parse_schedule, run_ber_point, run_ser_point

KINDS = ("rate-sweep", "ber", "ser", "mi-dump")

#: named marker codes used throughout: pattern bit string and mode
CODE_PRESETS = {
    "SMC1": ("10", STANDARD),
    "HMC1": ("10", HALF),
    "SMC2": ("0110", STANDARD),
    "HMC2": ("0110", HALF),
}

CSV_COLUMNS = {
    "rate-sweep": (
        "code,mode,Np,pd,ps,rM,mi_per_bit,Ra,stderr,pi,n,iterations,failures,seed"
    ),
    "ber": "code,schedule,pd,ps,Np,trials,ber,ci_lo,ci_hi,pi,n,failures,seed",
    "ser": "code,Np,pr,pi,pd,ps,trials,ser,ci_lo,ci_hi,n,failures,seed",
    "mi-dump": "label,llr",
}


@dataclass(frozen=True)
class CodeDef:
    name: str
    pattern: str  # marker pattern as a bit string, e.g. "10"
    mode: str

    def spec(self, period: int) -> MarkerSpec:
        return MarkerSpec(tuple(parse_symbols(self.pattern)), period, self.mode)


@dataclass
class ExperimentConfig:
    kind: str
    seed: int
    out: str
    codes: List[CodeDef]
    periods: List[int]
    channel: dict  # raw channel section, interpreted per kind
    campaign: dict = field(default_factory=dict)  # rate-sweep / mi-dump
    ldpc: dict = field(default_factory=dict)  # ber
    decode: dict = field(default_factory=dict)  # ber / ser
    timestamp: bool = True
    threads: int = 1
    plot: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.codes or not self.periods:
            raise ValueError("codes and periods must be nonempty")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if self.threads < 1:
            raise ValueError("threads must be positive")


def _parse_codes(section: dict) -> List[CodeDef]:
    codes = []
    for name in section.get("names", []):
        if name not in CODE_PRESETS:
            raise ValueError(
                f"unknown code preset {name!r}; known: {sorted(CODE_PRESETS)}"
            )
        pattern, mode = CODE_PRESETS[name]
        codes.append(CodeDef(name, pattern, mode))
    for item in section.get("custom", []):
        codes.append(CodeDef(item["name"], item["pattern"], item["mode"]))
    return codes


def load_config(path: str, **overrides) -> ExperimentConfig:
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    exp = raw.get("experiment", {})
    cfg = ExperimentConfig(
        kind=overrides.get("kind") or exp.get("kind", ""),
        seed=overrides.get("seed") if overrides.get("seed") is not None else exp.get("seed", 0),
        out=overrides.get("out") or exp.get("out", "out.csv"),
        codes=_parse_codes(raw.get("codes", {})),
        periods=list(raw.get("codes", {}).get("periods", [])),
        channel=raw.get("channel", {}),
        campaign=raw.get("campaign", {}),
        ldpc=raw.get("ldpc", {}),
        decode=raw.get("decode", {}),
        timestamp=overrides.get("timestamp", True),
        threads=overrides.get("threads", 1),
        plot=overrides.get("plot", True),
    )
    if "kind" in raw.get("experiment", {}) and overrides.get("kind"):
        if raw["experiment"]["kind"] != overrides["kind"]:
            raise ValueError(
                f"config is for {raw['experiment']['kind']!r}, "
                f"requested {overrides['kind']!r}"
            )
    return cfg


def _as_list(v) -> list:
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".10g")
    return str(v)


def write_csv(path: str, header: str, rows: Sequence[Sequence], timestamp: bool) -> None:
    with open(path, "w") as fh:
        if timestamp:
            fh.write(f"# generated {datetime.now(timezone.utc).isoformat()}\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _run_points(points: list, worker: Callable, threads: int) -> list:
    """Evaluate grid points, in order, optionally across processes."""
    if threads <= 1:
        return [worker(p) for p in points]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, points))


# ---------------------------------------------------------------- rate-sweep


@dataclass(frozen=True)
class _RatePoint:
    index: int
    code: CodeDef
    period: int
    params: ChannelParams
    n_bits: int
    iterations: int
    frame_bits: Optional[int]
    bins: int
    seed: int


def _rate_worker(pt: _RatePoint):
    est = mi_campaign(
        pt.code.spec(pt.period),
        pt.params,
        pt.n_bits,
        pt.iterations,
        RngSeed(pt.seed, pt.index << 32),
        hist=HistogramSpec(bins=pt.bins),
        frame_bits=pt.frame_bits,
    )
    return est


def _rate_points(cfg: ExperimentConfig) -> list:
    ch = cfg.channel
    params = ChannelParams(
        ch.get("p_ins", 0.0), ch.get("p_del", 0.0), ch.get("p_sub", 0.0)
    )
    camp = cfg.campaign
    pts = []
    for code in cfg.codes:
        for period in cfg.periods:
            pts.append(
                _RatePoint(
                    index=len(pts),
                    code=code,
                    period=period,
                    params=params,
                    n_bits=camp.get("n_bits", 10_000),
                    iterations=camp.get("iterations", 1000),
                    frame_bits=camp.get("frame_bits", DEFAULT_FRAME_BITS),
                    bins=camp.get("bins", 200),
                    seed=cfg.seed,
                )
            )
    return pts


def run_rate_sweep(cfg: ExperimentConfig) -> list:
    points = _rate_points(cfg)
    ests = _run_points(points, _rate_worker, cfg.threads)
    rows = []
    for pt, est in zip(points, ests):
        rows.append(
            (
                pt.code.name,
                pt.code.mode,
                pt.period,
                pt.params.p_del,
                pt.params.p_sub,
                est.marker_rate,
                est.mi_per_bit,
                est.achievable,
                est.stderr,
                pt.params.p_ins,
                pt.n_bits,
                pt.iterations,
                est.decode_failures,
                pt.seed,
            )
        )
    return rows


# ----------------------------------------------------------------------- ber


def _load_ldpc(section: dict, master_seed: int) -> LdpcCode:
    if "file" in section:
        return load_code(section["file"])
    return gallager_construct(
        section.get("n", 300),
        section.get("k", 150),
        section.get("w_c", 3),
        section.get("w_r", 6),
        rng=section.get("seed", master_seed),
    )


@dataclass(frozen=True)
class _BerPoint:
    index: int
    code: CodeDef
    period: int
    schedule: str
    params: ChannelParams
    trials: int
    seed: int
    ldpc: LdpcCode


def _ber_worker(pt: _BerPoint):
    return run_ber_point(
        pt.code.spec(pt.period),
        pt.ldpc,
        pt.params,
        parse_schedule(pt.schedule),
        pt.trials,
        RngSeed(pt.seed, pt.index << 32),
    )


def _ber_points(cfg: ExperimentConfig, ldpc: LdpcCode) -> list:
    ch = cfg.channel
    sched = cfg.decode.get("schedules", ["5x4"])
    trials = cfg.decode.get("trials", 1000)
    pts = []
    for code in cfg.codes:
        for period in cfg.periods:
            for schedule in sched:
                for p_ins in _as_list(ch.get("p_ins", 0.0)):
                    for p_del in _as_list(ch.get("p_del", 0.0)):
                        for p_sub in _as_list(ch.get("p_sub", 0.0)):
                            pts.append(
                                _BerPoint(
                                    index=len(pts),
                                    code=code,
                                    period=period,
                                    schedule=schedule,
                                    params=ChannelParams(p_ins, p_del, p_sub),
                                    trials=trials,
                                    seed=cfg.seed,
                                    ldpc=ldpc,
                                )
                            )
    return pts


def run_ber(cfg: ExperimentConfig) -> list:
    # one code instance shared by every grid point
    ldpc = _load_ldpc(cfg.ldpc, cfg.seed)
    n = ldpc.n
    points = _ber_points(cfg, ldpc)
    rates = _run_points(points, _ber_worker, cfg.threads)
    rows = []
    for pt, r in zip(points, rates):
        rows.append(
            (
                pt.code.name,
                pt.schedule,
                pt.params.p_del,
                pt.params.p_sub,
                pt.period,
                pt.trials,
                r.ber,
                r.ber_lo,
                r.ber_hi,
                pt.params.p_ins,
                n,
                r.failures,
                pt.seed,
            )
        )
    return rows


# ----------------------------------------------------------------------- ser


@dataclass(frozen=True)
class _SerPoint:
    index: int
    code: CodeDef
    period: int
    p_total: float
    params: ChannelParams
    n_bits: int
    trials: int
    seed: int


def _ser_worker(pt: _SerPoint):
    return run_ser_point(
        pt.code.spec(pt.period),
        pt.n_bits,
        pt.params,
        pt.trials,
        RngSeed(pt.seed, pt.index << 32),
    )


def _split_p_total(p_total: float, ratios: Sequence[float]) -> ChannelParams:
    """Split a total mutation rate into (p_ins, p_del, p_sub) by ratio."""
    ri, rd, rs = (float(r) for r in ratios)
    tot = ri + rd + rs
    if tot <= 0:
        raise ValueError("ratios must have a positive sum")
    return ChannelParams(p_total * ri / tot, p_total * rd / tot, p_total * rs / tot)


def _ser_points(cfg: ExperimentConfig) -> list:
    ch = cfg.channel
    ratios = ch.get("ratios", [1, 1, 2])  # p_s = 2 p_i = 2 p_d by default
    n_bits = cfg.decode.get("n_bits", 360)
    trials = cfg.decode.get("trials", 1000)
    pts = []
    for code in cfg.codes:
        for period in cfg.periods:
            for p_total in _as_list(ch.get("p_total", [])):
                pts.append(
                    _SerPoint(
                        index=len(pts),
                        code=code,
                        period=period,
                        p_total=float(p_total),
                        params=_split_p_total(float(p_total), ratios),
                        n_bits=n_bits,
                        trials=trials,
                        seed=cfg.seed,
                    )
                )
    if not pts:
        raise ValueError("ser experiment needs a channel.p_total grid")
    return pts


def run_ser(cfg: ExperimentConfig) -> list:
    points = _ser_points(cfg)
    rates = _run_points(points, _ser_worker, cfg.threads)
    rows = []
    for pt, r in zip(points, rates):
        rows.append(
            (
                pt.code.name,
                pt.period,
                pt.p_total,
                pt.params.p_ins,
                pt.params.p_del,
                pt.params.p_sub,
                pt.trials,
                r.ser,
                r.ser_lo,
                r.ser_hi,
                pt.n_bits,
                r.failures,
                pt.seed,
            )
        )
    return rows


# ------------------------------------------------------------------- mi-dump


def run_mi_dump(cfg: ExperimentConfig) -> list:
    if len(cfg.codes) != 1 or len(cfg.periods) != 1:
        raise ValueError("mi-dump wants exactly one code and one period")
    ch = cfg.channel
    camp = cfg.campaign
    est = mi_campaign(
        cfg.codes[0].spec(cfg.periods[0]),
        ChannelParams(ch.get("p_ins", 0.0), ch.get("p_del", 0.0), ch.get("p_sub", 0.0)),
        camp.get("n_bits", 10_000),
        camp.get("iterations", 10),
        RngSeed(cfg.seed, 0),
        hist=HistogramSpec(bins=camp.get("bins", 200)),
        frame_bits=camp.get("frame_bits", DEFAULT_FRAME_BITS),
        collect_samples=True,
    )
    rows = [(0, float(v)) for v in est.samples.a0]
    rows += [(1, float(v)) for v in est.samples.a1]
    return rows


RUNNERS = {
    "rate-sweep": run_rate_sweep,
    "ber": run_ber,
    "ser": run_ser,
    "mi-dump": run_mi_dump,
}


def run(cfg: ExperimentConfig, log=None) -> str:
    """Execute an experiment; writes the CSV (and figure), returns the CSV path."""
    if log is None:
        log = sys.stdout
    rows = RUNNERS[cfg.kind](cfg)
    write_csv(cfg.out, CSV_COLUMNS[cfg.kind], rows, cfg.timestamp)
    print(f"{cfg.kind}: wrote {len(rows)} rows to {cfg.out}", file=log)
    if cfg.plot:
        from .plots import plot_rows

        png = plot_rows(cfg.kind, rows, CSV_COLUMNS[cfg.kind], cfg.out)
        print(f"{cfg.kind}: rendered {png}", file=log)
    return cfg.out

"""Seeded experiment sweeps with CSV output.

Three experiments are provided:

* ``fig1``   -- secrecy outage vs antenna count, passive vs active pilot
               replay, independent channels.
* ``fig2``   -- secrecy outage vs the channel correlation factor, passive
               vs baseline replay vs the correlated steering attack.
* ``detect`` -- detection rates (key confirmation, trace checks, pairing)
               for each attack mode over a gamma x delta grid.

Every output CSV starts with a ``#``-prefixed JSON line echoing the fully
resolved configuration, so a run can be reproduced from its own output.
Trial-level randomness comes from per-trial counter-based streams and all
aggregation is integer counting, which makes the files byte-identical for
any worker count.
"""

import dataclasses
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import __version__
from .adversary import (
    MODE_BASELINE_BOTH,
    MODE_BASELINE_PHASE2,
    MODE_CORRELATED_ML,
    MODE_FULL_KNOWLEDGE,
    MODE_PASSIVE,
    MODE_RANDOM_Q,
    correlated_ml_moments,
    plan_baseline,
    plan_correlated_ml,
    plan_full_knowledge,
    plan_passive,
    plan_random_q,
)
from .channel import (
    INDEPENDENT,
    SCALAR_DIAGONAL,
    ChannelStatistics,
    build_joint_covariance,
    observe_estimates,
    rho_no_attack,
    sample_channel_set,
    sk_capacity,
)
from .detector import pairing_decision, trace_check
from .errors import ConfigError, NotPSDError, ParameterError
from .keyconf import extract_key, extract_key_at, key_confirmation_round
from .rng import SLOT_CHANNEL, SLOT_KEYCONF, SLOT_NOISE, SLOT_PLAN, trial_stream
from .secrecy import SopConfig, estimate_R0, outage_flags

__all__ = [
    "EXPERIMENTS",
    "DETECT_MODES",
    "ExperimentConfig",
    "ExperimentResult",
    "validate_config",
    "run_experiment",
    "run_fig1",
    "run_fig2",
    "run_detect",
    "write_csv",
    "read_csv",
    "config_from_csv",
]

EXPERIMENTS = ("fig1", "fig2", "detect")
DETECT_MODES = (MODE_PASSIVE, MODE_BASELINE_PHASE2, MODE_BASELINE_BOTH,
                MODE_RANDOM_Q, MODE_CORRELATED_ML, MODE_FULL_KNOWLEDGE)

_CHUNK = 512  # fixed trial chunk size; independent of the worker count


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved settings for one experiment run.

    Fields not applicable to the selected experiment are ignored by the
    runner but still echoed, so the metadata header always describes the
    whole configuration.
    """

    experiment: str
    seed: int = 12345
    trials: int = 10_000
    trials_r0: int = 4_000
    workers: int = 1
    out: Optional[str] = None
    # channel statistics template
    sigma_h2: float = 1.0
    sigma_g2: float = 0.5
    gamma: float = 0.0
    n: int = 6
    rate_fraction: float = 0.2
    baseline_both_phases: bool = False
    # fig1 sweep
    n_list: Tuple[int, ...] = (2, 4, 6)
    # fig2 sweep
    zeta_list: Tuple[float, ...] = (0.2, 0.4, 0.6)
    # detect settings
    modes: Tuple[str, ...] = (MODE_PASSIVE, MODE_BASELINE_PHASE2,
                              MODE_RANDOM_Q, MODE_FULL_KNOWLEDGE)
    gamma_list: Tuple[float, ...] = (0.01,)
    delta_list: Tuple[float, ...] = (1.0,)
    epsilon: float = 0.2
    m: int = 64
    sigma_q2: float = 0.5


_FIG_DEFAULTS = {
    "fig1": {"sigma_h2": 1.0, "sigma_g2": 0.5, "trials": 10_000},
    "fig2": {"sigma_h2": 0.5, "sigma_g2": 0.5, "n": 6, "trials": 10_000},
    "detect": {"sigma_h2": 0.5, "sigma_g2": 0.5, "n": 8, "trials": 1_000},
}


def make_config(experiment: str, **overrides) -> ExperimentConfig:
    """Build a config from per-experiment defaults plus overrides."""
    if experiment not in EXPERIMENTS:
        raise ConfigError("experiment",
                          f"must be one of {EXPERIMENTS}, got {experiment!r}")
    values = dict(_FIG_DEFAULTS[experiment])
    values.update(overrides)
    for key in ("n_list", "zeta_list", "gamma_list", "delta_list", "modes"):
        if key in values and values[key] is not None:
            values[key] = tuple(values[key])
    cfg = ExperimentConfig(experiment=experiment, **values)
    validate_config(cfg)
    return cfg


def _require(condition, field_name, message):
    if not condition:
        raise ConfigError(field_name, message)


def _strictly_increasing(xs):
    return all(a < b for a, b in zip(xs, xs[1:]))


def validate_config(cfg: ExperimentConfig) -> None:
    """Check every field, reporting the offending field by name."""
    _require(cfg.experiment in EXPERIMENTS, "experiment",
             f"must be one of {EXPERIMENTS}")
    _require(cfg.trials >= 1, "trials", "must be >= 1")
    _require(cfg.trials_r0 >= 100, "trials_r0", "must be >= 100")
    _require(cfg.workers >= 1, "workers", "must be >= 1")
    _require(cfg.sigma_h2 > 0, "sigma_h2", "must be > 0")
    _require(cfg.sigma_g2 > 0, "sigma_g2", "must be > 0")
    _require(cfg.gamma >= 0, "gamma", "must be >= 0")
    _require(0 < cfg.rate_fraction < 1, "rate_fraction", "must be in (0, 1)")
    _require(cfg.n >= 1, "n", "must be >= 1")
    _require(cfg.m >= 1, "m", "must be >= 1")
    _require(cfg.sigma_q2 >= 0, "sigma_q2", "must be >= 0")
    _require(cfg.epsilon > 0, "epsilon", "must be > 0")
    if cfg.experiment == "fig1":
        _require(len(cfg.n_list) > 0, "n_list", "must be non-empty")
        _require(all(n >= 1 for n in cfg.n_list), "n_list",
                 "entries must be >= 1")
        _require(_strictly_increasing(cfg.n_list), "n_list",
                 "must be strictly increasing")
    if cfg.experiment == "fig2":
        _require(len(cfg.zeta_list) > 0, "zeta_list", "must be non-empty")
        _require(all(z >= 0 for z in cfg.zeta_list), "zeta_list",
                 "entries must be >= 0")
        _require(_strictly_increasing(cfg.zeta_list), "zeta_list",
                 "must be strictly increasing")
        boundary = psd_boundary_zeta(cfg.sigma_h2, cfg.sigma_g2)
        worst = max(cfg.zeta_list)
        try:
            build_joint_covariance(ChannelStatistics(
                n=cfg.n, sigma_h2=cfg.sigma_h2, sigma_g2=cfg.sigma_g2,
                zeta=worst, gamma=cfg.gamma, correlation=SCALAR_DIAGONAL))
        except NotPSDError as exc:
            raise NotPSDError(
                f"zeta={worst} exceeds the PSD boundary "
                f"zeta*={boundary:.6f} for sigma_h2={cfg.sigma_h2}, "
                f"sigma_g2={cfg.sigma_g2}",
                pivot_index=exc.pivot_index) from exc
    if cfg.experiment == "detect":
        for name, grid in (("gamma_list", cfg.gamma_list),
                           ("delta_list", cfg.delta_list)):
            _require(len(grid) > 0, name, "must be non-empty")
            _require(all(v >= 0 for v in grid), name, "entries must be >= 0")
            _require(_strictly_increasing(grid), name,
                     "must be strictly increasing")
        _require(len(cfg.modes) > 0, "modes", "must be non-empty")
        for mode in cfg.modes:
            _require(mode in DETECT_MODES, "modes",
                     f"unknown mode {mode!r}; valid: {DETECT_MODES}")


def psd_boundary_zeta(sigma_h2: float, sigma_g2: float) -> float:
    """Largest correlation factor keeping the joint covariance PSD.

    Located by bisection on the Cholesky test of the per-entry block.
    """
    def is_psd(zeta):
        try:
            build_joint_covariance(ChannelStatistics(
                n=1, sigma_h2=sigma_h2, sigma_g2=sigma_g2, zeta=zeta,
                correlation=SCALAR_DIAGONAL))
            return True
        except NotPSDError:
            return False

    lo, hi = 0.0, 1.0
    if is_psd(hi):
        return hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if is_psd(mid):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class ExperimentResult:
    metadata: dict
    columns: Tuple[str, ...]
    rows: Tuple[tuple, ...]


# ---------------------------------------------------------------------------
# Worker-pool plumbing (counts only, so aggregation is order independent)


def _sop_chunk_count(args) -> int:
    cfg, threshold, lo, hi = args
    return int(np.count_nonzero(outage_flags(cfg, threshold, range(lo, hi))))


def _count_outages(cfg: SopConfig, threshold: float, workers: int) -> int:
    tasks = [(cfg, threshold, lo, min(lo + _CHUNK, cfg.trials))
             for lo in range(0, cfg.trials, _CHUNK)]
    if workers <= 1 or len(tasks) == 1:
        return sum(_sop_chunk_count(t) for t in tasks)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(_sop_chunk_count, tasks))


def _sop_point(stats: ChannelStatistics, mode: str, cfg: ExperimentConfig,
               r0: float) -> Tuple[float, float]:
    arm = SopConfig(stats=stats, attack_mode=mode, sigma_q2=cfg.sigma_q2,
                    trials=cfg.trials, trials_r0=cfg.trials_r0,
                    rate_fraction=cfg.rate_fraction, seed=cfg.seed)
    threshold = r0 * (1.0 - cfg.rate_fraction)
    count = _count_outages(arm, threshold, cfg.workers)
    p = count / cfg.trials
    ci = 1.96 * math.sqrt(p * (1.0 - p) / cfg.trials)
    return p, ci


# ---------------------------------------------------------------------------
# fig1 / fig2


def run_fig1(cfg: ExperimentConfig, progress=None) -> ExperimentResult:
    """Outage vs antenna count for a passive and an active adversary."""
    validate_config(cfg)
    active_mode = (MODE_BASELINE_BOTH if cfg.baseline_both_phases
                   else MODE_BASELINE_PHASE2)
    rows = []
    for n in cfg.n_list:
        stats = ChannelStatistics(n=n, sigma_h2=cfg.sigma_h2,
                                  sigma_g2=cfg.sigma_g2, gamma=cfg.gamma,
                                  correlation=INDEPENDENT)
        r0, _ = estimate_R0(stats, cfg.trials_r0, cfg.seed)
        sop_p, ci_p = _sop_point(stats, MODE_PASSIVE, cfg, r0)
        sop_a, ci_a = _sop_point(stats, active_mode, cfg, r0)
        rows.append((n, sop_p, ci_p, sop_a, ci_a, r0))
        if progress:
            progress(f"fig1 n={n}: passive={sop_p:.4g} active={sop_a:.4g}")
    return ExperimentResult(
        metadata=_metadata(cfg),
        columns=("n", "sop_passive", "ci_passive", "sop_active", "ci_active",
                 "r0"),
        rows=tuple(rows),
    )


def run_fig2(cfg: ExperimentConfig, progress=None) -> ExperimentResult:
    """Outage vs correlation factor for passive, baseline and correlated
    steering arms. All arms share channel draws (same per-trial streams),
    so comparisons between arms are paired."""
    validate_config(cfg)
    rows = []
    for zeta in cfg.zeta_list:
        stats = ChannelStatistics(n=cfg.n, sigma_h2=cfg.sigma_h2,
                                  sigma_g2=cfg.sigma_g2, zeta=zeta,
                                  gamma=cfg.gamma,
                                  correlation=SCALAR_DIAGONAL)
        r0, _ = estimate_R0(stats, cfg.trials_r0, cfg.seed)
        alpha = correlated_ml_moments(stats).alpha
        sop_p, ci_p = _sop_point(stats, MODE_PASSIVE, cfg, r0)
        sop_b, ci_b = _sop_point(stats, MODE_BASELINE_PHASE2, cfg, r0)
        sop_c, ci_c = _sop_point(stats, MODE_CORRELATED_ML, cfg, r0)
        rows.append((zeta, sop_p, ci_p, sop_b, ci_b, sop_c, ci_c,
                     alpha, 0, r0))
        if progress:
            progress(f"fig2 zeta={zeta}: passive={sop_p:.4g} "
                     f"baseline={sop_b:.4g} corr_ml={sop_c:.4g}")
    return ExperimentResult(
        metadata=_metadata(cfg),
        columns=("zeta", "sop_passive", "ci_passive", "sop_baseline",
                 "ci_baseline", "sop_corr_ml", "ci_corr_ml", "alpha_mean",
                 "infeasible_count", "r0"),
        rows=tuple(rows),
    )


# ---------------------------------------------------------------------------
# detect


def _detect_trial(stats: ChannelStatistics, mode: str, delta: float,
                  epsilon: float, m: int, sigma_q2: float, seed: int,
                  trial: int):
    """One detection trial; returns (keyconf_fail, ta_fail, tb_fail)."""
    cset = sample_channel_set(stats, trial_stream(seed, trial, SLOT_CHANNEL))
    if mode == MODE_PASSIVE:
        plan = plan_passive()
    elif mode in (MODE_BASELINE_PHASE2, MODE_BASELINE_BOTH):
        plan = plan_baseline(stats.n, both_phases=mode == MODE_BASELINE_BOTH)
    elif mode == MODE_RANDOM_Q:
        plan = plan_random_q(cset.g1, cset.g2, sigma_q2,
                             trial_stream(seed, trial, SLOT_PLAN))
    elif mode == MODE_CORRELATED_ML:
        plan = plan_correlated_ml(stats, cset.g1, cset.g2)
    elif mode == MODE_FULL_KNOWLEDGE:
        plan = plan_full_knowledge(cset.h, cset.g1, cset.g2)
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    pair = observe_estimates(cset, plan, stats.gamma,
                             trial_stream(seed, trial, SLOT_NOISE))
    key_a, kept = extract_key(pair.h_a, stats, delta, m)
    key_b = extract_key_at(pair.h_b, stats, kept, m)
    transcript = key_confirmation_round(
        key_a, key_b, trial_stream(seed, trial, SLOT_KEYCONF))
    ta = trace_check(pair.h_a, stats, epsilon)
    tb = trace_check(pair.h_b, stats, epsilon)
    report = pairing_decision(transcript.verdict, ta, tb)
    return (not transcript.verdict, not ta.passed, not tb.passed,
            not report.pairing_succeeds)


def _detect_chunk_counts(args):
    stats, mode, delta, epsilon, m, sigma_q2, seed, lo, hi = args
    counts = np.zeros(4, dtype=int)
    for trial in range(lo, hi):
        fails = _detect_trial(stats, mode, delta, epsilon, m, sigma_q2,
                              seed, trial)
        counts += np.asarray(fails, dtype=int)
    return counts


def run_detect(cfg: ExperimentConfig, progress=None) -> ExperimentResult:
    """Detection-rate matrix over attack mode x gamma x delta."""
    validate_config(cfg)
    rows = []
    for gamma in cfg.gamma_list:
        stats = ChannelStatistics(n=cfg.n, sigma_h2=cfg.sigma_h2,
                                  sigma_g2=cfg.sigma_g2, gamma=gamma,
                                  correlation=INDEPENDENT)
        # noiseless estimates have unbounded extractable rate; the length
        # warning only applies when gamma > 0
        capacity_bits = (math.inf if gamma == 0 else
                         sk_capacity(rho_no_attack(cfg.sigma_h2, gamma)))
        if capacity_bits * 2 * cfg.n * cfg.n < cfg.m:
            warnings.warn(
                f"target key length m={cfg.m} exceeds the extractable rate "
                f"{capacity_bits:.3f} x {2 * cfg.n * cfg.n} samples at "
                f"gamma={gamma}; keys will be shorter or unreliable",
                stacklevel=2)
        for delta in cfg.delta_list:
            for mode in cfg.modes:
                tasks = [(stats, mode, delta, cfg.epsilon, cfg.m,
                          cfg.sigma_q2, cfg.seed, lo,
                          min(lo + _CHUNK, cfg.trials))
                         for lo in range(0, cfg.trials, _CHUNK)]
                if cfg.workers <= 1 or len(tasks) == 1:
                    totals = sum((_detect_chunk_counts(t) for t in tasks),
                                 np.zeros(4, dtype=int))
                else:
                    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                        totals = sum(pool.map(_detect_chunk_counts, tasks),
                                     np.zeros(4, dtype=int))
                kc, ta, tb, pairing = (int(v) for v in totals)
                rows.append((mode, gamma, delta, kc / cfg.trials,
                             ta / cfg.trials, tb / cfg.trials,
                             pairing / cfg.trials, cfg.trials))
                if progress:
                    progress(f"detect mode={mode} gamma={gamma} "
                             f"delta={delta}: pairing_fail="
                             f"{pairing / cfg.trials:.4g}")
    return ExperimentResult(
        metadata=_metadata(cfg),
        columns=("mode", "gamma", "delta", "keyconf_fail_rate",
                 "traceA_fail_rate", "traceB_fail_rate", "pairing_fail_rate",
                 "trials"),
        rows=tuple(rows),
    )


def run_experiment(cfg: ExperimentConfig, progress=None) -> ExperimentResult:
    runner = {"fig1": run_fig1, "fig2": run_fig2, "detect": run_detect}
    return runner[cfg.experiment](cfg, progress=progress)


# ---------------------------------------------------------------------------
# CSV round trip


def _metadata(cfg: ExperimentConfig) -> dict:
    meta = dataclasses.asdict(cfg)
    # Scheduling and destination are not part of the result-defining
    # configuration: the same seed must produce the same bytes at any
    # worker count and under any output filename.
    meta.pop("workers")
    meta.pop("out")
    meta["version"] = __version__
    return meta


def _format_value(v) -> str:
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(result: ExperimentResult, path: str) -> None:
    lines = ["# " + json.dumps(result.metadata, sort_keys=True,
                               separators=(", ", ": "))]
    lines.append(",".join(result.columns))
    for row in result.rows:
        lines.append(",".join(_format_value(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path: str):
    """Parse a result file back into (metadata, columns, rows of strings)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or not lines[0].startswith("# "):
        raise ParameterError(f"{path}: missing metadata header line")
    metadata = json.loads(lines[0][2:])
    if len(lines) < 2:
        raise ParameterError(f"{path}: missing column header")
    columns = tuple(lines[1].split(","))
    rows = tuple(tuple(ln.split(",")) for ln in lines[2:] if ln)
    return metadata, columns, rows


def config_from_csv(path: str) -> ExperimentConfig:
    """Rebuild the configuration a result file was produced with."""
    metadata, _, _ = read_csv(path)
    metadata = dict(metadata)
    metadata.pop("version", None)
    experiment = metadata.pop("experiment")
    return make_config(experiment, **metadata)

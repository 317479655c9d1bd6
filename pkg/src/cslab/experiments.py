"""Monte Carlo harness: noise-folding and quantization sweeps plus the
closed-form bracket containment campaign.

Determinism contract: given an identical config (including master_seed) the
emitted rows are identical bit for bit, regardless of worker count or
scheduling.  Every trial derives its own seed from
(master_seed, point_index, trial_index) through a splitmix64 finalizer, work
is split into fixed-size blocks that do not depend on the worker count, and
blocks are reassembled in sorted key order.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import metrics, quantization, recovery, sensing, signal_model, theory

__all__ = [
    "METHODS",
    "QuantizerSweepSpec",
    "SweepConfig",
    "ContainmentConfig",
    "ContainmentReport",
    "TrialRow",
    "PointSummary",
    "ExperimentResult",
    "derive_trial_seed",
    "run_noise_folding_sweep",
    "run_quantization_sweep",
    "run_bound_containment",
    "aggregate",
]

METHODS = ("oracle", "cosamp", "bandpass")
ENSEMBLES = ("subsampled_dct", "gaussian", "rademacher")

_TRIAL_BLOCK = 32  # fixed work-block size; independent of worker count

_MASK64 = (1 << 64) - 1


def _mix64(z: int) -> int:
    """splitmix64 finalizer (a bijection on 64-bit integers)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_trial_seed(master_seed: int, point_index: int, trial_index: int) -> int:
    """Collision-free per-trial seed.

    The point and trial indices are packed into disjoint 32-bit lanes and
    xor-folded into a hash of the master seed; because the splitmix64
    finalizer is a bijection, distinct (point, trial) pairs under one master
    seed always map to distinct seeds.  Pure integer arithmetic, so the value
    is identical on every platform.
    """
    if not 0 <= point_index < 2**32:
        raise ValueError("point_index out of range")
    if not 0 <= trial_index < 2**32:
        raise ValueError("trial_index out of range")
    h = _mix64((master_seed ^ 0x9E3779B97F4A7C15) & _MASK64)
    return _mix64(h ^ (point_index << 32) ^ trial_index)


@dataclass(frozen=True)
class QuantizerSweepSpec:
    """Quantizer policy for the quantization sweep.

    ``base_bits`` anchors the bit-depth trend at rho = 1; measurements are
    scaled to the full quantizer range before quantization.
    """

    base_bits: int
    saturation: float = 1.0

    def __post_init__(self):
        if self.base_bits < 1:
            raise ValueError("base_bits must be >= 1")
        if self.saturation <= 0:
            raise ValueError("saturation must be positive")


@dataclass(frozen=True)
class SweepConfig:
    """Geometry, schedule, and seeding of a Monte Carlo sweep."""

    ambient_dim: int = 8192
    band_width: int = 4
    rho_list: tuple = (2, 4, 8, 16, 32)
    isnr_targets_db: tuple = (60.0,)
    trials_per_point: int = 200
    methods: tuple = ("oracle", "cosamp", "bandpass")
    master_seed: int = 0
    ensemble: str = "subsampled_dct"
    measurement_noise_var: float = 0.0
    quantizer: QuantizerSweepSpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "rho_list", tuple(int(r) for r in self.rho_list))
        object.__setattr__(self, "isnr_targets_db", tuple(float(v) for v in self.isnr_targets_db))
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.ambient_dim < 1 or self.band_width < 1:
            raise ValueError("ambient_dim and band_width must be positive")
        if self.band_width > self.ambient_dim:
            raise ValueError("band_width cannot exceed ambient_dim")
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be >= 1")
        if not self.rho_list:
            raise ValueError("rho_list must be nonempty")
        for r in self.rho_list:
            if r < 1 or self.ambient_dim % r != 0:
                raise ValueError(f"every rho must divide ambient_dim; got {r}")
        if not self.methods or any(m not in METHODS for m in self.methods):
            raise ValueError(f"methods must be a nonempty subset of {METHODS}")
        if self.ensemble not in ENSEMBLES:
            raise ValueError(f"ensemble must be one of {ENSEMBLES}")
        if self.measurement_noise_var < 0:
            raise ValueError("measurement_noise_var must be nonnegative")


@dataclass
class TrialRow:
    """One (point, method, trial) record of a sweep."""

    rho: int
    isnr_target_db: float | None
    method: str
    trial: int
    seed: int
    isnr_db: float | None
    msnr_db: float | None
    rsnr_db: float | None
    support_exact: bool
    bits: int | None


@dataclass
class ExperimentResult:
    """All rows of a sweep plus the config that produced them."""

    kind: str  # "noise_folding" or "quantization"
    config: SweepConfig
    rows: list = field(default_factory=list)


@dataclass(frozen=True)
class PointSummary:
    """Per-(rho, ISNR, method) aggregate.  SNR means are linear averages
    converted to dB; failed trials (no recovery value) are excluded from the
    means but counted."""

    rho: int
    isnr_target_db: float | None
    method: str
    n_trials: int
    n_failed: int
    mean_isnr_db: float | None
    mean_msnr_db: float | None
    mean_rsnr_db: float | None
    support_exact_rate: float
    bits: int | None


def _sweep_points(cfg: SweepConfig, kind: str):
    if kind == "quantization":
        return [(rho, None) for rho in cfg.rho_list]
    return [(rho, isnr) for rho in cfg.rho_list for isnr in cfg.isnr_targets_db]


def _fresh_ensemble(cfg: SweepConfig, n_measurements: int, seed) -> sensing.MeasurementEnsemble:
    if cfg.ensemble == "subsampled_dct":
        return sensing.generate_subsampled_dct_ensemble(n_measurements, cfg.ambient_dim, seed)
    raw = sensing.generate_ensemble(n_measurements, cfg.ambient_dim, cfg.ensemble, seed)
    return sensing.orthogonalize_rows(raw)


def _db_or_none(value: float | None) -> float | None:
    return None if value is None else float(metrics.to_db(value))


def _noise_folding_trial(cfg: SweepConfig, point_index: int, rho: int,
                         isnr_target: float, trial: int) -> list[TrialRow]:
    seed = derive_trial_seed(cfg.master_seed, point_index, trial)
    c_signal, c_noise, c_ens, c_meas = np.random.SeedSequence(seed).spawn(4)
    B, W = cfg.ambient_dim, cfg.band_width
    M = B // rho

    spectrum = signal_model.generate_bandlimited(B, W, "random", c_signal)
    noise_var = signal_model.signal_noise_var_for_isnr(spectrum, isnr_target)
    noisy = signal_model.add_signal_noise(spectrum, noise_var, c_noise)
    realized_isnr = metrics.isnr(spectrum, noisy)

    rows = []
    needs_ensemble = any(m in cfg.methods for m in ("oracle", "cosamp"))
    if needs_ensemble:
        ens = _fresh_ensemble(cfg, M, c_ens)
        y = sensing.measure(ens, noisy, cfg.measurement_noise_var, c_meas)
        msnr_db = _db_or_none(metrics.msnr(ens, spectrum.coeffs, y))
    for method in METHODS:
        if method not in cfg.methods:
            continue
        if method == "bandpass":
            x_noisy = signal_model.synthesize_vector(noisy)
            sample_vec = signal_model.SampleVector(x_noisy, float(B))
            try:
                out = recovery.bandpass_baseline(sample_vec, rho, spectrum.support)
            except ValueError:
                rows.append(TrialRow(rho, isnr_target, method, trial, seed,
                                     _db_or_none(realized_isnr), None, None, False, None))
                continue
            rows.append(TrialRow(rho, isnr_target, method, trial, seed,
                                 _db_or_none(realized_isnr), None,
                                 _db_or_none(metrics.rsnr(spectrum.coeffs, out.coeffs_hat)),
                                 True, None))
            continue
        if method == "oracle":
            out = recovery.oracle_recover(ens, y, spectrum.support)
            hit = True
        else:
            out = recovery.cosamp(ens, y, W)
            hit = (out.support_hat.size == spectrum.support.size
                   and bool(np.array_equal(out.support_hat, spectrum.support)))
        rows.append(TrialRow(rho, isnr_target, method, trial, seed,
                             _db_or_none(realized_isnr), msnr_db,
                             _db_or_none(metrics.rsnr(spectrum.coeffs, out.coeffs_hat)),
                             hit, None))
    return rows


def _quantization_trial(cfg: SweepConfig, point_index: int, rho: int, trial: int) -> list[TrialRow]:
    seed = derive_trial_seed(cfg.master_seed, point_index, trial)
    c_signal, _c_noise, c_ens, _c_meas = np.random.SeedSequence(seed).spawn(4)
    B, W = cfg.ambient_dim, cfg.band_width
    M = B // rho
    qspec = cfg.quantizer

    lam = qspec.base_bits + 10.0 * np.log10(B) / 2.3
    bits = max(1, int(np.floor(theory.bit_depth_trend(lam, B, rho) + 0.5)))
    quantizer = quantization.QuantizerSpec(bits=bits, saturation=qspec.saturation)

    spectrum = signal_model.generate_bandlimited(B, W, "random", c_signal)
    ens = _fresh_ensemble(cfg, M, c_ens)
    y = ens.apply(spectrum.coeffs)
    peak = float(np.max(np.abs(y)))
    beta = quantizer.saturation / peak
    y_quant = quantization.quantize(quantizer, beta * y) / beta
    msnr_db = _db_or_none(metrics.msnr(ens, spectrum.coeffs, y_quant))

    rows = []
    for method in METHODS:
        if method not in cfg.methods:
            continue
        if method == "oracle":
            out = recovery.oracle_recover(ens, y_quant, spectrum.support)
            hit = True
        else:
            out = recovery.cosamp(ens, y_quant, W)
            hit = (out.support_hat.size == spectrum.support.size
                   and bool(np.array_equal(out.support_hat, spectrum.support)))
        rows.append(TrialRow(rho, None, method, trial, seed, None, msnr_db,
                             _db_or_none(metrics.rsnr(spectrum.coeffs, out.coeffs_hat)),
                             hit, bits))
    return rows


def _run_block(args) -> tuple:
    cfg, kind, point_index, rho, isnr_target, trial_lo, trial_hi = args
    rows = []
    for trial in range(trial_lo, trial_hi):
        if kind == "noise_folding":
            rows.extend(_noise_folding_trial(cfg, point_index, rho, isnr_target, trial))
        else:
            rows.extend(_quantization_trial(cfg, point_index, rho, trial))
    return (point_index, trial_lo), rows


def _resolve_workers(n_workers: int | None) -> int:
    if n_workers is None:
        n_workers = 1
    n_workers = int(n_workers)
    if n_workers == 0:
        n_workers = os.cpu_count() or 1
    return max(1, n_workers)


def _run_sweep(cfg: SweepConfig, kind: str, n_workers: int | None) -> ExperimentResult:
    points = _sweep_points(cfg, kind)
    blocks = []
    for point_index, (rho, isnr_target) in enumerate(points):
        for lo in range(0, cfg.trials_per_point, _TRIAL_BLOCK):
            hi = min(lo + _TRIAL_BLOCK, cfg.trials_per_point)
            blocks.append((cfg, kind, point_index, rho, isnr_target, lo, hi))
    workers = _resolve_workers(n_workers)
    if workers == 1:
        keyed = dict(_run_block(b) for b in blocks)
    else:
        keyed = {}
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for key, rows in pool.map(_run_block, blocks):
                keyed[key] = rows
    rows = []
    for key in sorted(keyed):
        rows.extend(keyed[key])
    return ExperimentResult(kind=kind, config=cfg, rows=rows)


def run_noise_folding_sweep(cfg: SweepConfig, n_workers: int | None = 1) -> ExperimentResult:
    """Sweep recovery SNR against subsampling under white signal noise.

    Per trial: draw a band-limited signal, add signal noise hitting the ISNR
    target, acquire with a fresh orthogonal-row ensemble (oracle / cosamp) or
    decimate the synthesized samples (bandpass), recover, and record the
    realized SNRs.  A bandpass alias collision marks the trial failed rather
    than aborting the sweep.
    """
    if cfg.quantizer is not None:
        raise ValueError("noise-folding sweep is a noise-only study; remove the quantizer")
    if not cfg.isnr_targets_db:
        raise ValueError("noise-folding sweep needs at least one ISNR target")
    return _run_sweep(cfg, "noise_folding", n_workers)


def run_quantization_sweep(cfg: SweepConfig, n_workers: int | None = 1) -> ExperimentResult:
    """Sweep recovery SNR against subsampling for noise-free quantized
    acquisition.

    The bit depth per point follows the rate/resolution trend anchored at
    ``base_bits`` for rho = 1 (rounded to the nearest integer, floor 1); each
    trial's measurements are scaled to the full quantizer range before
    quantization.
    """
    if cfg.quantizer is None:
        raise ValueError("quantization sweep requires a quantizer spec")
    if "bandpass" in cfg.methods:
        raise ValueError("the quantization sweep supports oracle and cosamp only")
    return _run_sweep(cfg, "quantization", n_workers)


def aggregate(result: ExperimentResult) -> list[PointSummary]:
    """Per-point summaries (linear means converted to dB, failures counted)."""
    groups: dict = {}
    for row in result.rows:
        groups.setdefault((row.rho, row.isnr_target_db, row.method), []).append(row)

    def _mean_db(values):
        vals = [metrics.from_db(v) for v in values if v is not None]
        if not vals:
            return None
        return float(metrics.to_db(float(np.mean(vals))))

    summaries = []
    for key in sorted(groups, key=lambda k: (k[0], -1.0 if k[1] is None else k[1], k[2])):
        rows = groups[key]
        rho, isnr_target, method = key
        failed = sum(1 for r in rows if r.rsnr_db is None)
        bits_values = {r.bits for r in rows}
        summaries.append(PointSummary(
            rho=rho,
            isnr_target_db=isnr_target,
            method=method,
            n_trials=len(rows),
            n_failed=failed,
            mean_isnr_db=_mean_db([r.isnr_db for r in rows]),
            mean_msnr_db=_mean_db([r.msnr_db for r in rows]),
            mean_rsnr_db=_mean_db([r.rsnr_db for r in rows]),
            support_exact_rate=float(np.mean([r.support_exact for r in rows])),
            bits=bits_values.pop() if len(bits_values) == 1 else None,
        ))
    return summaries


@dataclass(frozen=True)
class ContainmentConfig:
    """Small-instance campaign checking Monte Carlo estimates against the
    closed-form brackets evaluated at the exhaustive isometry constant."""

    ambient_dim: int = 32
    n_measurements: int = 16
    band_width: int = 2
    trials: int = 10_000
    measurement_noise_var: float = 1.0
    signal_noise_var: float = 1.0
    master_seed: int = 0

    def __post_init__(self):
        if self.band_width > self.n_measurements:
            raise ValueError("band_width cannot exceed n_measurements")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass
class ContainmentReport:
    delta_hat_raw: float
    delta_hat: float
    oracle_error_mean: float
    oracle_error_bounds: tuple
    oracle_error_ok: bool
    msnr_over_isnr: float
    msnr_over_isnr_bounds: tuple
    msnr_over_isnr_ok: bool
    isnr_over_rsnr: float
    isnr_over_rsnr_bounds: tuple
    isnr_over_rsnr_ok: bool
    folded_var_rel_err: float
    folded_offdiag_max_rel: float
    whiteness_ok: bool

    @property
    def all_ok(self) -> bool:
        return (self.oracle_error_ok and self.msnr_over_isnr_ok
                and self.isnr_over_rsnr_ok and self.whiteness_ok)


def _bracket(base: float, delta: float) -> tuple:
    upper = base / (1.0 - delta) if delta < 1.0 else float("inf")
    return (base / (1.0 + delta), upper)


def run_bound_containment(cfg: ContainmentConfig) -> ContainmentReport:
    """Verify the oracle-error, MSNR/ISNR, and ISNR/RSNR brackets plus the
    folded-noise whiteness statistics on a small exhaustive-delta instance.

    The campaign draws one gaussian ensemble, orthogonalizes its rows (that is
    the operator the sweeps use), and evaluates every bracket at the
    orthogonalized ensemble's exhaustive isometry constant.
    Expectation-bearing quantities are estimated as ratios of trial-averaged
    energies (the closed forms put the expectation on the noise energies).
    """
    B, M, W = cfg.ambient_dim, cfg.n_measurements, cfg.band_width
    ss = np.random.SeedSequence(cfg.master_seed)
    c_ens, c_trials = ss.spawn(2)
    rng = np.random.default_rng(c_trials)

    raw = sensing.generate_ensemble(M, B, "gaussian", c_ens)
    delta_raw = sensing.estimate_rip_constant(raw, W, mode="exhaustive")
    ens = sensing.orthogonalize_rows(raw)
    delta_hat = sensing.estimate_rip_constant(ens, W, mode="exhaustive")
    rho = B / M

    sq_err_sum = 0.0
    meas_energy_sum = 0.0
    folded_noise_energy_sum = 0.0
    alpha_energy_sum = 0.0
    inband_noise_sum = 0.0
    folded_err_sum = 0.0
    T = cfg.trials

    sigma_e = np.sqrt(cfg.measurement_noise_var)
    sigma_n = np.sqrt(cfg.signal_noise_var)
    folded = np.empty((M, T))
    for t in range(T):
        start = int(rng.integers(0, B - W + 1))
        support = np.arange(start, start + W)
        coeffs = np.zeros(B)
        coeffs[support] = rng.standard_normal(W)

        # white measurement-noise path
        e = sigma_e * rng.standard_normal(M)
        y = ens.apply(coeffs) + e
        out = recovery.oracle_recover(ens, y, support)
        sq_err_sum += float(np.sum((out.coeffs_hat - coeffs) ** 2))

        # white signal-noise path
        n = sigma_n * rng.standard_normal(B)
        zn = ens.apply(n)
        folded[:, t] = zn
        y2 = ens.apply(coeffs + n)
        out2 = recovery.oracle_recover(ens, y2, support)
        folded_err_sum += float(np.sum((out2.coeffs_hat - coeffs) ** 2))
        meas_energy_sum += float(np.sum(ens.apply(coeffs) ** 2))
        folded_noise_energy_sum += float(np.sum(zn**2))
        alpha_energy_sum += float(np.sum(coeffs**2))
        inband_noise_sum += float(np.sum(n[support] ** 2))

    oracle_err_mean = sq_err_sum / T
    oracle_bounds = _bracket(W * cfg.measurement_noise_var, delta_hat)

    msnr_isnr = (meas_energy_sum / folded_noise_energy_sum) / (alpha_energy_sum / inband_noise_sum)
    msnr_isnr_bounds = ((1.0 - delta_hat) * W / B, (1.0 + delta_hat) * W / B)

    isnr_rsnr = (folded_err_sum / T) / (inband_noise_sum / T)
    isnr_rsnr_bounds = _bracket(rho, delta_hat)

    target_var = rho * cfg.signal_noise_var
    cov = folded @ folded.T / T
    diag = np.diag(cov)
    var_rel_err = float(np.max(np.abs(diag - target_var)) / target_var)
    off = cov - np.diag(diag)
    offdiag_rel = float(np.max(np.abs(off)) / target_var)

    return ContainmentReport(
        delta_hat_raw=float(delta_raw),
        delta_hat=float(delta_hat),
        oracle_error_mean=float(oracle_err_mean),
        oracle_error_bounds=oracle_bounds,
        oracle_error_ok=oracle_bounds[0] <= oracle_err_mean <= oracle_bounds[1],
        msnr_over_isnr=float(msnr_isnr),
        msnr_over_isnr_bounds=msnr_isnr_bounds,
        msnr_over_isnr_ok=msnr_isnr_bounds[0] <= msnr_isnr <= msnr_isnr_bounds[1],
        isnr_over_rsnr=float(isnr_rsnr),
        isnr_over_rsnr_bounds=isnr_rsnr_bounds,
        isnr_over_rsnr_ok=isnr_rsnr_bounds[0] <= isnr_rsnr <= isnr_rsnr_bounds[1],
        folded_var_rel_err=var_rel_err,
        folded_offdiag_max_rel=offdiag_rel,
        whiteness_ok=bool(var_rel_err <= 0.10 and offdiag_rel <= 0.05),
    )

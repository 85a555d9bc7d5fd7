"""Stochastic store-rotate-retrieve protocol and photon-correlation analysis.

Pipeline per trial: sample excitation candidates in the trapped cloud, write
polaritons under hard-sphere blockade, evolve the stored register through the
microwave pulse, then draw per-polariton retrieval, detection thinning, and
Poisson background.  Click-level utilities place retrieved photons on two
detectors and build the pulsed Hanbury Brown-Twiss correlation g2(k*T).

Randomness follows the stream contract in ``rydpol.rng``: every stage of
every trial draws from its own counter-based stream, so results are
bit-identical for a fixed master seed regardless of batching or thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .config import ExperimentConfig, PairCoefficients, optical_blockade_radius
from .interactions import build_pi_sector_hamiltonian, time_evolve
from .rng import philox_stream

#: Probability that an input photon produces a Rydberg excitation candidate
#: during the write pulse.  Calibrated so the blockaded write at the default
#: geometry stores about three polaritons on average, matching the observed
#: photon statistics; the candidate count is Poisson(mean_input_photons *
#: WRITE_EFFICIENCY).
WRITE_EFFICIENCY = 0.35

#: Probability that a surviving polariton emits into the retrieval mode
#: within the gate window.
BASE_RETRIEVAL_EFFICIENCY = 0.04

#: FWHM of the retrieved photon pulse (us); photons are placed on a Gaussian
#: of this width centered in the retrieval window.
RETRIEVAL_PULSE_FWHM = 0.120

#: Default per-emitter detection probability for correlation runs.  The
#: normalized g2 of independently thinned number states does not depend on
#: this value, so it is chosen for counting statistics rather than to match
#: the end-to-end efficiency chain.
EMITTER_DETECTION_PROB = 0.35

_STAGE_CANDIDATES = 1
_STAGE_CLOUD = 2
_STAGE_DETECT = 3
_STAGE_CLICKS = 4
_STAGE_DRIFT = 5
_STAGE_EMITTER = 6
_STAGE_SCAN = 7


# --------------------------------------------------------------------------
# Cloud sampling and blockaded writing

@dataclass(frozen=True)
class CloudSample:
    """Candidate excitation positions drawn from the trapped-cloud density."""

    positions: np.ndarray  # (count, 3) um
    rng_seed: int

    def __post_init__(self):
        positions = np.atleast_2d(np.asarray(self.positions, dtype=float))
        if positions.ndim != 2 or positions.shape[1] != 3 or positions.shape[0] < 1:
            raise ValueError(f"positions must have shape (count, 3), got {positions.shape}")
        if not np.all(np.isfinite(positions)):
            raise ValueError("positions must be finite")
        object.__setattr__(self, "positions", positions)

    @property
    def count(self):
        return self.positions.shape[0]


def sample_positions(config, count, seed, index=0):
    """Draw i.i.d. positions from the anisotropic Gaussian cloud (w_r, w_r, w_z)."""
    if not isinstance(count, (int, np.integer)) or count < 1:
        raise ValueError(f"count must be a positive integer, got {count!r}")
    rng = philox_stream(seed, _STAGE_CLOUD, index)
    scale = np.array([config.cloud_wr, config.cloud_wr, config.cloud_wz])
    positions = rng.normal(0.0, 1.0, size=(int(count), 3)) * scale
    return CloudSample(positions=positions, rng_seed=int(seed))


@dataclass(frozen=True)
class WriteResult:
    """Accepted polaritons after hard-sphere blockade."""

    polariton_positions: np.ndarray  # (n, 3) um
    n_polaritons: int
    n_candidates: int

    def __post_init__(self):
        positions = np.asarray(self.polariton_positions, dtype=float).reshape(-1, 3)
        object.__setattr__(self, "polariton_positions", positions)
        if self.n_polaritons != positions.shape[0]:
            raise ValueError("n_polaritons does not match the position count")
        if self.n_polaritons > self.n_candidates:
            raise ValueError("cannot accept more polaritons than candidates")


def write_polaritons(cloud, r_o, max_attempts=None):
    """Sequential hard-sphere acceptance of excitation candidates.

    Candidates are visited in sampled order (an i.i.d. draw is already a
    uniformly random order); a candidate is excited iff no previously
    accepted excitation lies within r_o.  max_attempts caps how many
    candidates are considered.
    """
    if not (math.isfinite(r_o) and r_o > 0):
        raise ValueError(f"r_o must be positive, got {r_o!r}")
    candidates = cloud.positions
    if max_attempts is not None:
        if not isinstance(max_attempts, (int, np.integer)) or max_attempts < 0:
            raise ValueError(f"max_attempts must be a non-negative integer, got {max_attempts!r}")
        candidates = candidates[: int(max_attempts)]
    accepted = []
    for point in candidates:
        if all(np.linalg.norm(point - prior) >= r_o for prior in accepted):
            accepted.append(point)
    positions = np.array(accepted, dtype=float).reshape(-1, 3)
    if len(accepted) > 1:
        diffs = positions[:, None, :] - positions[None, :, :]
        dists = np.linalg.norm(diffs, axis=-1)
        np.fill_diagonal(dists, np.inf)
        assert dists.min() >= r_o, "blockade violation: polariton pair closer than r_o"
    return WriteResult(polariton_positions=positions, n_polaritons=len(accepted),
                       n_candidates=len(candidates))


# --------------------------------------------------------------------------
# Single-shot protocol

def _register_return_probability(positions, omega_mu, c3, pulse_duration):
    """All-s return probability of the stored register after the pulse."""
    n = len(positions)
    if n == 0 or omega_mu == 0.0 or pulse_duration == 0.0:
        return 1.0
    hamiltonian = build_pi_sector_hamiltonian(positions, omega_mu, c3)
    psi0 = np.zeros(2 ** n)
    psi0[0] = 1.0
    psi = time_evolve(hamiltonian, psi0, pulse_duration)
    return min(1.0, float(np.abs(psi[0]) ** 2))


def _written_register(config, pair_coeffs, seed, trial):
    n_candidates = int(philox_stream(seed, _STAGE_CANDIDATES, trial)
                       .poisson(config.mean_input_photons * WRITE_EFFICIENCY))
    if n_candidates == 0:
        return WriteResult(polariton_positions=np.empty((0, 3)), n_polaritons=0,
                           n_candidates=0)
    cloud = sample_positions(config, n_candidates, seed, index=trial)
    r_o = optical_blockade_radius(pair_coeffs.c6, config.eit_width)
    return write_polaritons(cloud, r_o)


def simulate_shot(config, pair_coeffs, omega_mu, pulse_duration, seed, trial=0):
    """One store-rotate-retrieve trial; returns the detected photon count.

    The microwave pulse (area Theta = 2*pi*omega_mu*pulse_duration) rotates
    the stored register; phase-matched retrieval projects onto the all-s
    register, so every polariton is retrieved with the same probability
    (all-s return probability) * BASE_RETRIEVAL_EFFICIENCY, independently.
    The common gate keeps the mean signal proportional to [cos^2(Theta/2)]^N
    for free rotation while the independent draws keep the photon statistics
    of N independent emitters (g2(0) = 1 - 1/N).  Detection thinning and
    Poisson background in the gate window follow.
    """
    if not (math.isfinite(omega_mu) and omega_mu >= 0):
        raise ValueError(f"omega_mu must be a non-negative frequency, got {omega_mu!r}")
    if not (math.isfinite(pulse_duration) and 0 <= pulse_duration <= config.storage_time):
        raise ValueError(
            f"pulse_duration must fit in the storage interval [0, {config.storage_time}], "
            f"got {pulse_duration!r}")
    write = _written_register(config, pair_coeffs, seed, trial)
    n = write.n_polaritons
    return_probability = _register_return_probability(
        write.polariton_positions, omega_mu, pair_coeffs.c3, pulse_duration)
    rng = philox_stream(seed, _STAGE_DETECT, trial)
    detected = 0
    if n:
        per_polariton = return_probability * BASE_RETRIEVAL_EFFICIENCY
        retrieved = rng.binomial(n, per_polariton)
        detected = rng.binomial(retrieved, config.detection_efficiency)
    background = rng.poisson(config.background_rate * config.window_duration)
    return int(detected + background)


def _shot_chunk(args):
    config, pair_coeffs, omega_mu, pulse_duration, seed, start, stop = args
    return [simulate_shot(config, pair_coeffs, omega_mu, pulse_duration, seed, trial=t)
            for t in range(start, stop)]


def run_shots(config, pair_coeffs, omega_mu, pulse_duration, trials, seed, threads=1):
    """Detected photon counts for `trials` independent shots (trial-indexed streams)."""
    if not isinstance(trials, (int, np.integer)) or trials < 1:
        raise ValueError(f"trials must be a positive integer, got {trials!r}")
    trials = int(trials)
    if threads is None or threads <= 1 or trials < 64:
        counts = _shot_chunk((config, pair_coeffs, omega_mu, pulse_duration, seed,
                              0, trials))
        return np.asarray(counts, dtype=np.int64)
    edges = np.linspace(0, trials, int(threads) + 1, dtype=int)
    jobs = [(config, pair_coeffs, omega_mu, pulse_duration, seed, int(a), int(b))
            for a, b in zip(edges[:-1], edges[1:]) if b > a]
    with ProcessPoolExecutor(max_workers=int(threads)) as pool:
        parts = list(pool.map(_shot_chunk, jobs))
    return np.asarray([c for part in parts for c in part], dtype=np.int64)


# --------------------------------------------------------------------------
# Detector clicks

@dataclass(frozen=True)
class ClickRecord:
    """Time-tagged detector events for a run of identical trials."""

    times: np.ndarray       # absolute event times (us), sorted
    detectors: np.ndarray   # 'A' or 'B' per event
    n_trials: int
    window: tuple           # (start, end) us within each repetition period
    repetition_period: float

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        detectors = np.asarray(self.detectors)
        if times.shape != detectors.shape or times.ndim != 1:
            raise ValueError("times and detectors must be matching 1-d arrays")
        if times.size and (not np.all(np.isfinite(times)) or times.min() < 0):
            raise ValueError("event times must be finite and non-negative")
        if times.size and np.any(np.diff(times) < 0):
            raise ValueError("event times must be sorted")
        if not np.all(np.isin(detectors, ("A", "B"))):
            raise ValueError("detectors must be 'A' or 'B'")
        start, end = self.window
        if not (0 <= start < end <= self.repetition_period):
            raise ValueError(f"window {self.window} must lie inside one period")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "detectors", detectors)

    @property
    def events(self):
        return list(zip(self.times.tolist(), self.detectors.tolist()))


def generate_click_stream(config, per_trial_photon_counts, seed):
    """Place detected photons and background on two detectors.

    Signal photons land on a Gaussian pulse (FWHM RETRIEVAL_PULSE_FWHM)
    centered in the retrieval window; background is a homogeneous Poisson
    process over the window; every event is routed 50/50 to detector A or B.
    """
    counts = np.asarray(per_trial_photon_counts)
    if counts.ndim != 1 or counts.size < 1:
        raise ValueError("per_trial_photon_counts must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(counts.astype(float))) or np.any(counts < 0):
        raise ValueError("photon counts must be finite and non-negative")
    counts = counts.astype(np.int64)
    n_trials = counts.size
    rng = philox_stream(seed, _STAGE_CLICKS)
    start, end = config.retrieval_window
    center = 0.5 * (start + end)
    sigma = RETRIEVAL_PULSE_FWHM / (2.0 * math.sqrt(2.0 * math.log(2.0)))

    trial_of_signal = np.repeat(np.arange(n_trials), counts)
    signal_offsets = rng.normal(center, sigma, size=trial_of_signal.size)
    outside = (signal_offsets < start) | (signal_offsets >= end)
    while np.any(outside):
        signal_offsets[outside] = rng.normal(center, sigma, size=int(outside.sum()))
        outside = (signal_offsets < start) | (signal_offsets >= end)

    background_counts = rng.poisson(config.background_rate * config.window_duration,
                                    size=n_trials)
    trial_of_background = np.repeat(np.arange(n_trials), background_counts)
    background_offsets = rng.uniform(start, end, size=trial_of_background.size)

    trials_all = np.concatenate([trial_of_signal, trial_of_background])
    offsets_all = np.concatenate([signal_offsets, background_offsets])
    times = trials_all * config.repetition_period + offsets_all
    sides = rng.integers(0, 2, size=times.size)
    order = np.argsort(times, kind="stable")
    detectors = np.where(sides == 0, "A", "B")
    return ClickRecord(times=times[order], detectors=detectors[order],
                       n_trials=int(n_trials), window=(float(start), float(end)),
                       repetition_period=float(config.repetition_period))


# --------------------------------------------------------------------------
# HBT correlation analysis

@dataclass(frozen=True)
class G2Result:
    """Pulsed cross-correlation g2 at integer multiples of the period."""

    tau_bins: np.ndarray            # delay k * repetition_period (us)
    g2: np.ndarray                  # normalized correlation per bin
    statistical_error: np.ndarray   # Poisson-propagated 1-sigma per bin
    coincidence_counts: np.ndarray  # raw cross-detector pair counts per bin
    g2_zero: float
    g2_zero_err: float
    side_peak_level: float          # normalization relative to uncorrelated rate

    def __post_init__(self):
        if np.any(np.asarray(self.g2) < 0):
            raise ValueError("g2 bins must be non-negative")
        positive = np.asarray(self.coincidence_counts) > 0
        if np.any(np.asarray(self.statistical_error)[positive] <= 0):
            raise ValueError("statistical error must be positive where counts exist")


def hbt_g2(clicks, max_delay=60, norm_range=(5, 50)):
    """Cross-detector coincidences binned by pulse-index difference.

    g2(k*T) = C_k / C_norm where C_norm is the mean per-pair coincidence
    rate over side peaks with |k| inside norm_range.  side_peak_level
    reports that normalization relative to the fully uncorrelated rate
    (mean_A * mean_B), which rises as 1 + Var/Mean^2 under slow efficiency
    drift while leaving the normalized bins untouched.
    """
    if clicks.times.size < 2:
        raise ValueError("need at least two events to correlate")
    k_lo, k_hi = norm_range
    if not (0 < k_lo <= k_hi):
        raise ValueError(f"invalid normalization range {norm_range!r}")
    if max_delay < k_hi:
        raise ValueError("max_delay must cover the normalization range")
    n_trials = clicks.n_trials
    pulse_index = np.floor_divide(clicks.times, clicks.repetition_period).astype(int)
    in_range = pulse_index < n_trials
    pulse_index = pulse_index[in_range]
    side = clicks.detectors[in_range]
    counts_a = np.bincount(pulse_index[side == "A"], minlength=n_trials).astype(float)
    counts_b = np.bincount(pulse_index[side == "B"], minlength=n_trials).astype(float)

    if int(max_delay) >= n_trials:
        raise ValueError("max_delay exceeds the number of trials")
    ks = np.arange(-int(max_delay), int(max_delay) + 1)
    coincidences = np.empty(ks.size)
    pairs_available = np.empty(ks.size)
    for i, k in enumerate(ks):
        if k >= 0:
            coincidences[i] = counts_a[: n_trials - k] @ counts_b[k:]
        else:
            coincidences[i] = counts_a[-k:] @ counts_b[: n_trials + k]
        pairs_available[i] = n_trials - abs(k)

    rate = coincidences / pairs_available
    rate_err = np.sqrt(coincidences) / pairs_available
    in_norm = (np.abs(ks) >= k_lo) & (np.abs(ks) <= k_hi)
    norm = float(np.mean(rate[in_norm]))
    if norm <= 0:
        raise ValueError("no coincidences in the normalization range")
    norm_err = float(np.sqrt(np.sum(coincidences[in_norm])) /
                     np.sum(pairs_available[in_norm]))

    g2 = rate / norm
    relative_norm = norm_err / norm
    g2_err = np.where(coincidences > 0,
                      g2 * np.sqrt(np.divide(1.0, coincidences,
                                             out=np.zeros_like(coincidences),
                                             where=coincidences > 0)
                                   + relative_norm ** 2),
                      0.0)
    zero_bin = int(np.flatnonzero(ks == 0)[0])
    uncorrelated = float(np.mean(counts_a) * np.mean(counts_b))
    side_level = norm / uncorrelated if uncorrelated > 0 else math.inf
    return G2Result(tau_bins=ks * clicks.repetition_period, g2=g2,
                    statistical_error=g2_err,
                    coincidence_counts=coincidences.astype(np.int64),
                    g2_zero=float(g2[zero_bin]), g2_zero_err=float(g2_err[zero_bin]),
                    side_peak_level=side_level)


def background_correct_g2(g2_measured, signal_fraction):
    """Remove uncorrelated Poissonian background from a measured g2.

    With signal fraction rho of the total counts, g2_true =
    (g2_measured - (1 - rho^2)) / rho^2, clipped at zero.
    """
    rho = float(signal_fraction)
    if not (0.0 < rho <= 1.0):
        raise ValueError(f"signal_fraction must be in (0, 1], got {signal_fraction!r}")
    corrected = (np.asarray(g2_measured, dtype=float) - (1.0 - rho ** 2)) / rho ** 2
    corrected = np.clip(corrected, 0.0, None)
    return corrected if corrected.ndim else float(corrected)


# --------------------------------------------------------------------------
# Slow efficiency drift

@dataclass(frozen=True)
class DriftSpec:
    """Slow modulation of the per-trial retrieval efficiency."""

    amplitude: float              # peak relative modulation, in [0, 1)
    period_trials: float = 5000.0
    kind: str = "sinusoidal"      # or "linear"
    phase: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.amplitude < 1.0):
            raise ValueError(f"amplitude must be in [0, 1), got {self.amplitude!r}")
        if self.kind not in ("sinusoidal", "linear"):
            raise ValueError(f"kind must be 'sinusoidal' or 'linear', got {self.kind!r}")
        if self.kind == "sinusoidal" and self.period_trials <= 0:
            raise ValueError("period_trials must be positive")

    @classmethod
    def from_relative_std(cls, relative_std, **kwargs):
        """Spec whose efficiency time series has the given Var^0.5/Mean."""
        kind = kwargs.get("kind", "sinusoidal")
        factor = math.sqrt(2.0) if kind == "sinusoidal" else math.sqrt(3.0)
        return cls(amplitude=relative_std * factor, **kwargs)

    def modulation(self, trial_indices, n_trials):
        """Relative efficiency (1 + m_t) / (1 + amplitude), in (0, 1]."""
        t = np.asarray(trial_indices, dtype=float)
        if self.kind == "sinusoidal":
            m = self.amplitude * np.sin(2.0 * math.pi * t / self.period_trials
                                        + self.phase)
        else:
            span = max(n_trials - 1, 1)
            m = self.amplitude * (2.0 * t / span - 1.0)
        return (1.0 + m) / (1.0 + self.amplitude)


def efficiency_drift_model(clicks, drift_spec):
    """Thin a click record by a slowly varying per-trial efficiency."""
    trial_of_event = np.floor_divide(clicks.times, clicks.repetition_period).astype(int)
    keep_probability = drift_spec.modulation(trial_of_event, clicks.n_trials)
    rng = philox_stream(drift_spec.rng_seed, _STAGE_DRIFT)
    keep = rng.random(clicks.times.size) < keep_probability
    return replace(clicks, times=clicks.times[keep], detectors=clicks.detectors[keep])


# --------------------------------------------------------------------------
# Source models and end-to-end correlation runs

def emitter_photon_counts(n_emitters, detection_prob, trials, seed):
    """Per-trial detected counts from n independent single-photon emitters."""
    if not isinstance(n_emitters, (int, np.integer)) or n_emitters < 1:
        raise ValueError(f"n_emitters must be a positive integer, got {n_emitters!r}")
    if not (0.0 <= detection_prob <= 1.0):
        raise ValueError(f"detection_prob must be in [0, 1], got {detection_prob!r}")
    rng = philox_stream(seed, _STAGE_EMITTER)
    return rng.binomial(int(n_emitters), detection_prob, size=int(trials))


def poisson_photon_counts(mean, trials, seed):
    """Per-trial counts from a coherent (Poissonian) source."""
    if not (math.isfinite(mean) and mean >= 0):
        raise ValueError(f"mean must be non-negative, got {mean!r}")
    rng = philox_stream(seed, _STAGE_EMITTER)
    return rng.poisson(mean, size=int(trials))


def simulate_hbt_run(config, trials, seed, n_emitters=3,
                     detection_prob=EMITTER_DETECTION_PROB, drift=None,
                     max_delay=60):
    """Counts -> clicks -> (optional drift) -> g2 for an emitter-model run."""
    counts = emitter_photon_counts(n_emitters, detection_prob, trials, seed)
    clicks = generate_click_stream(config, counts, seed)
    if drift is not None:
        clicks = efficiency_drift_model(clicks, drift)
    return hbt_g2(clicks, max_delay=max_delay)


# --------------------------------------------------------------------------
# Microwave Rabi scans

@dataclass(frozen=True)
class RabiScanResult:
    """Mean detected counts versus microwave Rabi frequency."""

    omegas: np.ndarray       # MHz
    mean_counts: np.ndarray
    sem_counts: np.ndarray
    pulse_duration: float    # us
    trials: int


def _scan_geometries(config, pair_coeffs, count, seed, n_polaritons=None,
                     max_attempts=None):
    """Written registers for a scan, optionally conditioned on the stored number."""
    r_o = optical_blockade_radius(pair_coeffs.c6, config.eit_width)
    mean_candidates = config.mean_input_photons * WRITE_EFFICIENCY
    geometries = []
    attempt = 0
    budget = 10000 * count
    while len(geometries) < count:
        if attempt >= budget:
            raise RuntimeError(
                f"could not draw {count} registers with {n_polaritons} polaritons "
                f"in {budget} attempts")
        n_candidates = int(philox_stream(seed, _STAGE_CANDIDATES, attempt)
                           .poisson(mean_candidates))
        if n_candidates == 0:
            write = WriteResult(polariton_positions=np.empty((0, 3)),
                                n_polaritons=0, n_candidates=0)
        else:
            cloud = sample_positions(config, n_candidates, seed, index=attempt)
            write = write_polaritons(cloud, r_o, max_attempts)
        attempt += 1
        if n_polaritons is not None and write.n_polaritons != n_polaritons:
            continue
        geometries.append(write)
    return geometries


def simulate_rabi_scan(config, pair_coeffs, omegas, pulse_duration, trials, seed,
                       n_polaritons=None, geometry_samples=400, threads=1):
    """Detected-count curve versus drive strength at fixed pulse duration.

    The register dynamics is evaluated once per (geometry, omega) on a fixed
    ensemble of `geometry_samples` written registers, and the per-trial
    detection statistics are then sampled with trials cycling through that
    ensemble — the shot noise of the full pipeline at a fraction of the cost.
    """
    omegas = np.asarray(omegas, dtype=float)
    if omegas.ndim != 1 or omegas.size < 1:
        raise ValueError("omegas must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(omegas)) or np.any(omegas < 0):
        raise ValueError("omegas must be finite and non-negative")
    if not (math.isfinite(pulse_duration) and 0 <= pulse_duration <= config.storage_time):
        raise ValueError(
            f"pulse_duration must fit in the storage interval [0, {config.storage_time}]")
    if not isinstance(trials, (int, np.integer)) or trials < 2:
        raise ValueError(f"trials must be an integer >= 2, got {trials!r}")
    geometries = _scan_geometries(config, pair_coeffs, int(geometry_samples), seed,
                                  n_polaritons=n_polaritons)
    n_per_geometry = np.array([g.n_polaritons for g in geometries], dtype=np.int64)

    jobs = [(geometries, pair_coeffs, float(omega), pulse_duration)
            for omega in omegas]
    if threads is None or threads <= 1 or omegas.size < 2:
        overlaps = [_scan_point_overlaps(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=int(threads)) as pool:
            overlaps = list(pool.map(_scan_point_overlaps, jobs))

    trials = int(trials)
    assignment = np.arange(trials) % len(geometries)
    n_assigned = n_per_geometry[assignment]
    background_mean = config.background_rate * config.window_duration
    means = np.empty(omegas.size)
    sems = np.empty(omegas.size)
    for i in range(omegas.size):
        p_detect = overlaps[i] * BASE_RETRIEVAL_EFFICIENCY * config.detection_efficiency
        rng = philox_stream(seed, _STAGE_SCAN, i)
        counts = rng.binomial(n_assigned, p_detect[assignment])
        counts = counts + rng.poisson(background_mean, size=trials)
        means[i] = counts.mean()
        sems[i] = counts.std(ddof=1) / math.sqrt(trials)
    return RabiScanResult(omegas=omegas, mean_counts=means, sem_counts=sems,
                          pulse_duration=float(pulse_duration), trials=trials)


def _scan_point_overlaps(args):
    geometries, pair_coeffs, omega, pulse_duration = args
    return np.array([
        _register_return_probability(g.polariton_positions, omega,
                                     pair_coeffs.c3, pulse_duration)
        for g in geometries])

"""Readout statistics, the arccos fringe-inversion estimator, and the
experimental feasibility calculator.

Randomness contract: all sampling uses numpy's PCG64 bit generator seeded
through SeedSequence, and binomial counts are drawn by counting uniform
variates below p (normal approximation above R = 1e5).  Trial ensembles
derive per-trial generators with SeedSequence.spawn, so results are
reproducible for a given master seed and independent of evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .metrology import DISPLACEMENT, PerturbationSpec
from .protocol import dispersive_protocol, resonant_protocol

__all__ = [
    "EstimationRun",
    "FeasibilityReport",
    "simulate_readout",
    "estimate_displacement",
    "estimator_calibration",
    "run_trials",
    "feasibility",
    "theory_sigma",
]

_EXACT_SAMPLING_LIMIT = 100_000


@dataclass(frozen=True)
class EstimationRun:
    """One estimation experiment: R repetitions, r excited outcomes, the
    inverted estimate and its quoted uncertainty."""

    repetitions: int
    excited_count: int
    estimate: float
    sigma: float
    alpha_mag: float
    seed: int | None = None

    def __post_init__(self):
        if not (0 <= self.excited_count <= self.repetitions):
            raise ValueError("excited_count must lie in [0, repetitions]")


@dataclass(frozen=True)
class FeasibilityReport:
    interaction_time: float
    decoherence_threshold: float
    ratio: float
    verdict: bool


def _binomial(rng: np.random.Generator, p_e: float, repetitions: int) -> int:
    if repetitions <= _EXACT_SAMPLING_LIMIT:
        return int(np.count_nonzero(rng.random(repetitions) < p_e))
    mean = repetitions * p_e
    std = math.sqrt(repetitions * p_e * (1.0 - p_e))
    draw = round(mean + std * rng.standard_normal())
    return int(min(max(draw, 0), repetitions))


def simulate_readout(p_e: float, repetitions: int, seed) -> int:
    """Draw r ~ Binomial(repetitions, p_e) from the seeded generator."""
    if not 0.0 <= p_e <= 1.0:
        raise ValueError("p_e must lie in [0, 1]")
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    return _binomial(rng, p_e, repetitions)


def theory_sigma(repetitions: int, alpha_mag: float) -> float:
    """Quoted Gaussian width of the estimator, 1 / (8 sqrt(R nbar))."""
    return 1.0 / (8.0 * math.sqrt(repetitions * alpha_mag**2))


def estimate_displacement(
    excited_count: int,
    repetitions: int,
    alpha_mag: float,
    convention: str = "dispersive",
    seed: int | None = None,
) -> EstimationRun:
    """Invert the fringe probability on the principal arccos branch.

    The dispersive fringe P_e = [1 - cos(4|alpha|s)]/2 inverts as
    s = arccos(1 - 2 r/R) / (4 |alpha|); the resonant fringe
    P_e = [1 + cos(4|alpha|s)]/2 pairs with arccos(2 r/R - 1).  The
    frequency ratio is clamped to [-1, 1] to absorb floating-point spill
    at the fringe extremes.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    if excited_count > repetitions:
        raise ValueError("excited_count exceeds repetitions")
    if convention not in ("dispersive", "resonant"):
        raise ValueError("convention must be 'dispersive' or 'resonant'")
    xi = excited_count / repetitions
    arg = 1.0 - 2.0 * xi if convention == "dispersive" else 2.0 * xi - 1.0
    s_hat = math.acos(min(max(arg, -1.0), 1.0)) / (4.0 * alpha_mag)
    return EstimationRun(
        repetitions=repetitions,
        excited_count=excited_count,
        estimate=s_hat,
        sigma=theory_sigma(repetitions, alpha_mag),
        alpha_mag=alpha_mag,
        seed=seed,
    )


def _fringe_probability(true_s: float, alpha: complex, convention: str) -> float:
    pert = PerturbationSpec(DISPLACEMENT, true_s)
    if convention == "dispersive":
        return dispersive_protocol(alpha, pert).p_e
    return resonant_protocol(alpha, pert).p_e


def run_trials(
    true_s: float,
    alpha: complex,
    repetitions: int,
    n_trials: int,
    seed,
    convention: str = "dispersive",
) -> np.ndarray:
    """Excited counts for n_trials independent full pipelines.

    The protocol's excited-state probability is computed once; each trial
    then samples its binomial readout from a spawned sub-generator.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    p_e = _fringe_probability(true_s, alpha, convention)
    children = np.random.SeedSequence(seed).spawn(n_trials)
    counts = np.empty(n_trials, dtype=np.int64)
    for i, child in enumerate(children):
        rng = np.random.Generator(np.random.PCG64(child))
        counts[i] = _binomial(rng, p_e, repetitions)
    return counts


def estimator_calibration(
    true_s: float,
    alpha: complex,
    repetitions: int,
    n_trials: int,
    seed,
    convention: str = "dispersive",
) -> tuple[float, float]:
    """Empirical (mean bias, standard deviation) of the estimator over
    n_trials full protocol->readout->inversion pipelines."""
    a_abs = abs(alpha)
    if not 0.0 < true_s < np.pi / (4.0 * a_abs):
        raise ValueError("true_s must lie strictly inside the principal branch")
    counts = run_trials(true_s, alpha, repetitions, n_trials, seed, convention)
    estimates = np.array(
        [estimate_displacement(int(r), repetitions, a_abs, convention).estimate for r in counts]
    )
    return float(estimates.mean() - true_s), float(estimates.std(ddof=1))


def feasibility(omega0: float, nbar: float, decoherence_budget: float, regime: str = "cavity") -> FeasibilityReport:
    """Compare the protocol's interaction time against decoherence.

    The transit to the revival midpoint takes T = 2 pi sqrt(nbar)/Omega_0.
    In the cavity regime the two-component superposition decoheres nbar
    times faster than the field amplitude damps, so the damping time must
    beat the threshold 2 pi nbar^{3/2}/Omega_0; in the ion regime the
    supplied budget is already the superposition's decoherence time and is
    compared against T directly.  The verdict demands a 10x margin.
    """
    if omega0 <= 0 or nbar <= 0 or decoherence_budget <= 0:
        raise ValueError("feasibility inputs must be positive")
    if regime not in ("cavity", "ion"):
        raise ValueError("regime must be 'cavity' or 'ion'")
    interaction_time = 2.0 * np.pi * math.sqrt(nbar) / omega0
    threshold = interaction_time * nbar if regime == "cavity" else interaction_time
    ratio = decoherence_budget / threshold
    return FeasibilityReport(
        interaction_time=interaction_time,
        decoherence_threshold=threshold,
        ratio=ratio,
        verdict=bool(ratio >= 10.0),
    )

"""Exact algebra for finite superpositions of coherent states.

A state is a weighted list of coherent amplitudes, sum_k w_k |a_k>.  All
inner products are evaluated through the closed-form coherent overlap

    <b|a> = exp(-(|a|^2 + |b|^2)/2 + conj(b) * a),

so displacements, rotations and overlaps are exact for any amplitude,
with no Fock-space truncation.  A truncated number-basis conversion is
provided as the numeric bridge for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

__all__ = [
    "CoherentSuperposition",
    "FockVector",
    "coherent_state",
    "vacuum",
    "make_circular_state",
    "displace",
    "rotate",
    "inner_product",
    "fidelity",
    "to_fock",
    "mean_excitation",
    "default_n_trunc",
]


def _gram(bra_amps: np.ndarray, ket_amps: np.ndarray) -> np.ndarray:
    """Matrix of coherent overlaps G[k, l] = <bra_k|ket_l>."""
    b = bra_amps[:, None]
    k = ket_amps[None, :]
    return np.exp(-0.5 * (np.abs(b) ** 2 + np.abs(k) ** 2) + np.conj(b) * k)


@dataclass(frozen=True)
class CoherentSuperposition:
    """Weighted superposition of coherent states, treated as immutable.

    weights and amplitudes are equal-length complex arrays; term k
    contributes weights[k] * |amplitudes[k]>.  The state need not be
    normalized on construction; `normalized()` rescales using the full
    Gram matrix (never the asymptotic 1/sqrt(M) prefactor, which is only
    valid for well-separated amplitudes).
    """

    weights: np.ndarray
    amplitudes: np.ndarray

    def __init__(self, weights, amplitudes):
        w = np.atleast_1d(np.asarray(weights, dtype=complex))
        a = np.atleast_1d(np.asarray(amplitudes, dtype=complex))
        if w.ndim != 1 or a.ndim != 1 or w.shape != a.shape:
            raise ValueError("weights and amplitudes must be equal-length 1-d sequences")
        if w.size < 1:
            raise ValueError("a superposition needs at least one term")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(a))):
            raise ValueError("weights and amplitudes must be finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "amplitudes", a)

    @property
    def n_terms(self) -> int:
        return self.weights.size

    @property
    def terms(self) -> list[tuple[complex, complex]]:
        return [(complex(w), complex(a)) for w, a in zip(self.weights, self.amplitudes)]

    @property
    def max_amplitude(self) -> float:
        return float(np.max(np.abs(self.amplitudes)))

    def norm(self) -> float:
        g = _gram(self.amplitudes, self.amplitudes)
        n2 = np.conj(self.weights) @ g @ self.weights
        # Hermitian quadratic form; the imaginary part is rounding noise.
        return math.sqrt(max(float(n2.real), 0.0))

    def normalized(self) -> "CoherentSuperposition":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize a zero-norm superposition")
        return CoherentSuperposition(self.weights / n, self.amplitudes)


def coherent_state(alpha: complex) -> CoherentSuperposition:
    return CoherentSuperposition([1.0], [alpha])


def vacuum() -> CoherentSuperposition:
    return coherent_state(0.0)


def make_circular_state(alpha: complex, m: int, gammas) -> CoherentSuperposition:
    """Normalized sum_k e^{i gamma_k} |e^{i phi_k} alpha> with phi_k = 2 pi k / m.

    k runs 1..m, so m=2 gives the two-component cat {-alpha, alpha} and
    m=4 the compass state {+-alpha, +-i alpha}.  Normalization uses the
    exact Gram matrix and is correct for any |alpha|, including overlapping
    components at small radius.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    gam = np.asarray(gammas, dtype=float)
    if gam.shape != (m,):
        raise ValueError(f"expected {m} gamma phases, got shape {gam.shape}")
    k = np.arange(1, m + 1)
    phis = 2.0 * np.pi * k / m
    weights = np.exp(1j * gam)
    amps = np.exp(1j * phis) * alpha
    return CoherentSuperposition(weights, amps).normalized()


def displace(state: CoherentSuperposition, beta: complex) -> CoherentSuperposition:
    """Apply D(beta) term-wise: D(beta)|a> = e^{i Im(beta conj(a))} |a + beta>."""
    phases = np.exp(1j * np.imag(beta * np.conj(state.amplitudes)))
    return CoherentSuperposition(state.weights * phases, state.amplitudes + beta)


def rotate(state: CoherentSuperposition, theta: float) -> CoherentSuperposition:
    """Apply R(theta) = e^{i theta n} term-wise: |a> -> |e^{i theta} a>."""
    return CoherentSuperposition(state.weights, np.exp(1j * theta) * state.amplitudes)


def inner_product(a: CoherentSuperposition, b: CoherentSuperposition) -> complex:
    """<a|b> via the Gram matrix, exact up to floating point."""
    g = _gram(a.amplitudes, b.amplitudes)
    return complex(np.conj(a.weights) @ g @ b.weights)


def fidelity(a: CoherentSuperposition, b: CoherentSuperposition) -> float:
    """|<a|b>|^2; global-phase-insensitive state comparison."""
    return abs(inner_product(a, b)) ** 2


def mean_excitation(state: CoherentSuperposition) -> float:
    """Exact <n> through <a_k| n |a_l> = conj(a_k) a_l <a_k|a_l>."""
    g = _gram(state.amplitudes, state.amplitudes)
    g_n = np.conj(state.amplitudes)[:, None] * state.amplitudes[None, :] * g
    val = np.conj(state.weights) @ g_n @ state.weights
    return float(val.real)


def default_n_trunc(max_amplitude: float) -> int:
    """Truncation size keeping coherent-state leakage below ~1e-10."""
    a = abs(max_amplitude)
    return int(math.ceil(a * a + 6.0 * a + 10.0))


@dataclass(frozen=True)
class FockVector:
    """Truncated number-basis vector c_n, n = 0..dimension-1.

    `leakage` records the norm deficit 1 - sum |c_n|^2 reported by the
    conversion that produced the vector (0 for hand-built vectors).
    """

    coefficients: np.ndarray
    leakage: float = 0.0

    def __init__(self, coefficients, leakage: float = 0.0):
        c = np.atleast_1d(np.asarray(coefficients, dtype=complex))
        if c.ndim != 1 or c.size < 1:
            raise ValueError("coefficients must be a non-empty 1-d sequence")
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "leakage", float(leakage))

    @property
    def dimension(self) -> int:
        return self.coefficients.size

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2))

    def dot(self, other: "FockVector") -> complex:
        n = min(self.dimension, other.dimension)
        return complex(np.vdot(self.coefficients[:n], other.coefficients[:n]))


def to_fock(state: CoherentSuperposition, n_trunc: int | None = None) -> FockVector:
    """Expand into the number basis, c_n = sum_k w_k e^{-|a_k|^2/2} a_k^n / sqrt(n!).

    Coefficients are assembled in the log domain so large amplitudes and
    large n never overflow; the result is always finite.  When n_trunc is
    omitted it is sized from the largest amplitude so the reported leakage
    stays below ~1e-10.
    """
    if n_trunc is None:
        n_trunc = default_n_trunc(state.max_amplitude)
    if n_trunc < 1:
        raise ValueError("n_trunc must be >= 1")
    n = np.arange(n_trunc)
    half_log_fact = 0.5 * gammaln(n + 1.0)
    coeffs = np.zeros(n_trunc, dtype=complex)
    for w, a in zip(state.weights, state.amplitudes):
        r = abs(a)
        if r == 0.0:
            coeffs[0] += w
            continue
        log_mag = -0.5 * r * r + n * math.log(r) - half_log_fact
        coeffs += w * np.exp(log_mag + 1j * n * np.angle(a))
    fv_norm2 = float(np.sum(np.abs(coeffs) ** 2))
    leak = max(0.0, float(abs(np.conj(state.weights) @ _gram(state.amplitudes, state.amplitudes) @ state.weights).real) - fv_norm2)
    return FockVector(coeffs, leakage=leak)

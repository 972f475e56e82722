"""TLS-oscillator measurement sequences that read fringe overlaps out as
level populations.

The generic strategy evolves |level, alpha> under a composable unitary
sequence U, applies the perturbation to the oscillator alone, undoes U,
and reports P_e of the final entangled state.  Two named protocols
implement the idealized algebra in closed form:

* dispersive: pi/2 pulse, then a level-conditioned pi phase of the field
  (the operational content of the far-detuned interaction with the pulse
  area tuned so |g, alpha> -> |g, -alpha> while |e, alpha> is untouched),
  optionally an extra displacement stage that turns the cat into the
  rotation-sensing configuration (|e, 2 alpha> + |g, 0>)/sqrt(2).  The
  excited-state probability is P_e = [1 - cos(Delta)]/2 with fringe
  argument Delta = 4 |alpha| s for the orthogonal displacement direction
  and Delta = 4 |alpha|^2 theta for rotations.

* resonant: free Jaynes-Cummings evolution to half the revival time,
  where the joint state factorizes into a two-component field cat times a
  pure TLS state; a percussive sigma_z kick then mimics time reversal, so
  a second evolution leg closes the interferometer.  Here the field cat
  sits on the axis orthogonal to alpha, so the maximally sensitive
  displacement direction is along alpha, and P_e = [1 + cos(Delta)]/2.
  Stopping both legs early at dt = f * T_R/2 rescales the fringe argument
  by sin(pi f / 2) without changing the scaling of detectable shifts.

A truncated-Fock numeric integrator for the interaction-picture
Jaynes-Cummings Hamiltonian backs the closed-form algebra as an oracle;
it covers the resonant regime, arbitrary detuning, and the effective
dispersive (level-conditioned phase) model with one code path.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .metrology import ROTATION, OutOfRegimeWarning, PerturbationSpec
from .states import CoherentSuperposition, FockVector, coherent_state, displace, inner_product, rotate, vacuum

__all__ = [
    "HybridState",
    "JCParams",
    "ProtocolResult",
    "dispersive_protocol",
    "resonant_protocol",
    "generic_strategy",
    "dispersive_sequence",
    "jc_numeric_evolve",
    "revival_time",
    "hybrid_overlap",
]


@dataclass(frozen=True)
class HybridState:
    """TLS (x) oscillator state sqrt(P_e)|e, state_e> + sqrt(P_g)|g, state_g>.

    Branch states are normalized separately; the complex weights carry the
    branch amplitudes and satisfy |w_e|^2 + |w_g|^2 = 1.
    """

    weight_e: complex
    state_e: CoherentSuperposition
    weight_g: complex
    state_g: CoherentSuperposition

    def __post_init__(self):
        total = abs(self.weight_e) ** 2 + abs(self.weight_g) ** 2
        if abs(total - 1.0) > 1e-8:
            raise ValueError(f"branch weights are not normalized (|w_e|^2+|w_g|^2 = {total})")

    @property
    def p_e(self) -> float:
        return abs(self.weight_e) ** 2

    @property
    def p_g(self) -> float:
        return abs(self.weight_g) ** 2


def hybrid_overlap(a: HybridState, b: HybridState) -> complex:
    """<a|b> over the joint TLS (x) oscillator Hilbert space."""
    val = np.conj(a.weight_e) * b.weight_e * inner_product(a.state_e, b.state_e)
    val += np.conj(a.weight_g) * b.weight_g * inner_product(a.state_g, b.state_g)
    return complex(val)


@dataclass(frozen=True)
class ProtocolResult:
    final: HybridState
    p_e: float
    p_g: float
    intermediate: HybridState | None = None


@dataclass(frozen=True)
class JCParams:
    """Jaynes-Cummings parameters: vacuum Rabi frequency, detuning
    delta = omega_0 - omega, mean excitation, and evolution time."""

    omega0_rabi: float
    detuning: float
    nbar: float
    interaction_time: float

    def __post_init__(self):
        if self.omega0_rabi <= 0:
            raise ValueError("omega0_rabi must be positive")

    @property
    def is_dispersive(self) -> bool:
        """Far-detuned flag, checked as delta >= 10 * Omega_0 * sqrt(nbar)."""
        return abs(self.detuning) >= 10.0 * self.omega0_rabi * math.sqrt(max(self.nbar, 0.0))


def revival_time(params: JCParams) -> float:
    """Revival time T_R = 4 pi sqrt(nbar) / Omega_0 of the resonant model."""
    if params.nbar <= 0:
        raise ValueError("revival time needs nbar > 0")
    return 4.0 * np.pi * math.sqrt(params.nbar) / params.omega0_rabi


def _fringe_argument(alpha: complex, pert: PerturbationSpec, orthogonal_default: bool) -> float:
    """Phase difference 2 Im(beta (A_1* - A_2*)) between the two cat
    branches; rotations enter through the mapping s = theta |alpha|."""
    a_abs = abs(alpha)
    if pert.kind == ROTATION:
        return 4.0 * a_abs**2 * pert.magnitude
    if pert.direction is None:
        phi_rel = np.pi / 2.0 if orthogonal_default else 0.0
    else:
        phi_rel = pert.direction - float(np.angle(alpha))
    projection = np.sin(phi_rel) if orthogonal_default else np.cos(phi_rel)
    return float(4.0 * a_abs * pert.magnitude * projection)


def dispersive_protocol(alpha: complex, pert: PerturbationSpec) -> ProtocolResult:
    """Closed-form dispersive sequence; fringe law P_e = [1 - cos(Delta)]/2.

    For rotations the displacement stage D(alpha) is always part of the
    sequence (the bare cat has no rotation signal), so the intermediate
    state is (|e, 2 alpha> + |g, 0>)/sqrt(2).
    """
    a_abs = abs(alpha)
    if a_abs < 2.0:
        warnings.warn("dispersive protocol assumes a mesoscopic amplitude (|alpha| >= 2)", OutOfRegimeWarning, stacklevel=2)
    delta = _fringe_argument(alpha, pert, orthogonal_default=True)
    w_e = 0.5 * (1.0 - np.exp(1j * delta))
    w_g = 0.5 * (1.0 + np.exp(1j * delta))
    final = HybridState(w_e, coherent_state(alpha), w_g, coherent_state(alpha))
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    if pert.kind == ROTATION:
        intermediate = HybridState(inv_sqrt2, coherent_state(2.0 * alpha), inv_sqrt2, vacuum())
    else:
        intermediate = HybridState(inv_sqrt2, coherent_state(alpha), inv_sqrt2, coherent_state(-alpha))
    return ProtocolResult(final=final, p_e=final.p_e, p_g=final.p_g, intermediate=intermediate)


def resonant_protocol(alpha: complex, pert: PerturbationSpec, dt_fraction: float = 1.0) -> ProtocolResult:
    """Closed-form resonant sequence; fringe law P_e = [1 + cos(Delta)]/2.

    dt_fraction = Delta_t / (T_R/2) in (0, 1] shortens both interferometer
    legs; the fringe argument picks up the factor sin(pi dt_fraction / 2).
    At dt_fraction = 1 the intermediate state is the factorized product
    [e^{-i pi nbar/2} |-i alpha> - e^{i pi nbar/2} |i alpha>]/sqrt(2) (x)
    (e^{-i pi/2} |e> + e^{-i arg alpha} |g>)/sqrt(2); at earlier times the
    atom is still entangled with the field and no closed product form is
    exposed.

    The field cat at the perturbation stage lies along +-i alpha, so a
    displacement parallel to alpha crosses its interference fringes: a
    None direction resolves to arg(alpha) here (not arg(alpha) + pi/2).
    """
    if not (0.0 < dt_fraction <= 1.0):
        raise ValueError("dt_fraction must lie in (0, 1]")
    a_abs = abs(alpha)
    nbar = a_abs**2
    if nbar < 4.0:
        warnings.warn("resonant factorization assumes a mesoscopic field (nbar >= 4)", OutOfRegimeWarning, stacklevel=2)
    kick_phase = np.pi * dt_fraction
    scale = math.sin(kick_phase / 2.0)
    delta = scale * _fringe_argument(alpha, pert, orthogonal_default=False)
    b = np.exp(-1j * float(np.angle(alpha)))
    w_e = 0.5 * (np.exp(1j * delta) + 1.0)
    w_g = 0.5 * b * (1.0 - np.exp(1j * delta))
    final = HybridState(w_e, coherent_state(alpha), w_g, coherent_state(alpha))
    intermediate = None
    if dt_fraction == 1.0:
        cat = CoherentSuperposition(
            [np.exp(-0.5j * np.pi * nbar), -np.exp(0.5j * np.pi * nbar)],
            [-1j * alpha, 1j * alpha],
        ).normalized()
        inv_sqrt2 = 1.0 / math.sqrt(2.0)
        intermediate = HybridState(-1j * inv_sqrt2, cat, b * inv_sqrt2, cat)
    return ProtocolResult(final=final, p_e=final.p_e, p_g=final.p_g, intermediate=intermediate)


# --- generic composable strategy ------------------------------------------

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def _consolidate(state: CoherentSuperposition) -> CoherentSuperposition:
    """Merge identical amplitudes and drop cancelled terms."""
    amps: list[complex] = []
    weights: list[complex] = []
    for w, a in zip(state.weights, state.amplitudes):
        for i, b in enumerate(amps):
            if abs(a - b) < 1e-12:
                weights[i] += w
                break
        else:
            amps.append(complex(a))
            weights.append(complex(w))
    keep = [(w, a) for w, a in zip(weights, amps) if abs(w) > 1e-14]
    if not keep:
        return CoherentSuperposition([0.0], [0.0])
    return CoherentSuperposition([w for w, _ in keep], [a for _, a in keep])


def _add(s1: CoherentSuperposition, c1: complex, s2: CoherentSuperposition, c2: complex) -> CoherentSuperposition:
    weights = np.concatenate([c1 * s1.weights, c2 * s2.weights])
    amps = np.concatenate([s1.amplitudes, s2.amplitudes])
    return _consolidate(CoherentSuperposition(weights, amps))


def _apply_op(branch_e: CoherentSuperposition, branch_g: CoherentSuperposition, op: tuple, inverse: bool):
    """One step of the composable set on unnormalized branch vectors."""
    name = op[0]
    if name == "pi_half":
        if inverse:
            new_e = _add(branch_e, _INV_SQRT2, branch_g, -_INV_SQRT2)
            new_g = _add(branch_e, _INV_SQRT2, branch_g, _INV_SQRT2)
        else:
            new_e = _add(branch_e, _INV_SQRT2, branch_g, _INV_SQRT2)
            new_g = _add(branch_e, -_INV_SQRT2, branch_g, _INV_SQRT2)
        return new_e, new_g
    if name == "conditional_phase":
        return branch_e, rotate(branch_g, np.pi)
    if name == "displace":
        beta = -op[1] if inverse else op[1]
        return displace(branch_e, beta), displace(branch_g, beta)
    if name == "rotate":
        theta = -op[1] if inverse else op[1]
        return rotate(branch_e, theta), rotate(branch_g, theta)
    if name == "sigma_z":
        return branch_e, CoherentSuperposition(-branch_g.weights, branch_g.amplitudes)
    raise ValueError(f"unknown unitary descriptor {name!r}")


def _normalize_op(op) -> tuple:
    if isinstance(op, str):
        return (op,)
    op = tuple(op)
    if not op:
        raise ValueError("empty unitary descriptor")
    return op


def _phase_only_displace(state: CoherentSuperposition, beta: complex) -> CoherentSuperposition:
    """Small-displacement model: each component only picks up the Weyl
    phase e^{2 i Im(beta conj(a))}, its center does not move."""
    phases = np.exp(2j * np.imag(beta * np.conj(state.amplitudes)))
    return CoherentSuperposition(state.weights * phases, state.amplitudes)


def _split(branch_e: CoherentSuperposition, branch_g: CoherentSuperposition) -> HybridState:
    ne, ng = branch_e.norm(), branch_g.norm()
    total = math.sqrt(ne**2 + ng**2)
    se = branch_e.normalized() if ne > 1e-12 else vacuum()
    sg = branch_g.normalized() if ng > 1e-12 else vacuum()
    return HybridState(ne / total, se, ng / total, sg)


def dispersive_sequence(alpha: complex, rotation: bool = False) -> list[tuple]:
    """Descriptor list of the dispersive preparation unitary."""
    seq: list[tuple] = [("pi_half",), ("conditional_phase",)]
    if rotation:
        seq.append(("displace", alpha))
    return seq


def generic_strategy(
    u_ops,
    pert: PerturbationSpec,
    alpha: complex,
    initial_level: str = "e",
    pert_model: str = "exact",
) -> ProtocolResult:
    """|Psi_f> = U^dag U_pert U |level, alpha> with exact branch algebra.

    `pert_model` selects the exact oscillator unitary or the phase-only
    small-displacement model used by the closed-form pipelines.  The TLS
    weights are structurally unchanged by the perturbation (it acts on the
    oscillator only); this and the branch-decomposition identity
    P_e |<alpha|psi_e>|^2 = |<e, alpha|Psi_f>|^2 are verified on the fly.
    """
    ops = [_normalize_op(op) for op in u_ops]
    if initial_level not in ("e", "g"):
        raise ValueError("initial_level must be 'e' or 'g'")
    if pert_model not in ("exact", "phase_only"):
        raise ValueError("pert_model must be 'exact' or 'phase_only'")
    zero = CoherentSuperposition([0.0], [0.0])
    start = coherent_state(alpha)
    branch_e, branch_g = (start, zero) if initial_level == "e" else (zero, start)

    for op in ops:
        branch_e, branch_g = _apply_op(branch_e, branch_g, op, inverse=False)
    intermediate = _split(branch_e, branch_g)

    norms_before = (branch_e.norm(), branch_g.norm())
    if pert.kind == ROTATION:
        if pert_model == "phase_only":
            raise ValueError("phase-only model is defined for displacements")
        branch_e, branch_g = rotate(branch_e, pert.magnitude), rotate(branch_g, pert.magnitude)
    else:
        beta = pert.beta(alpha)
        if pert_model == "exact":
            branch_e, branch_g = displace(branch_e, beta), displace(branch_g, beta)
        else:
            branch_e, branch_g = _phase_only_displace(branch_e, beta), _phase_only_displace(branch_g, beta)
    norms_after = (branch_e.norm(), branch_g.norm())
    if not np.allclose(norms_before, norms_after, rtol=0, atol=1e-9):
        raise AssertionError("perturbation leaked between TLS branches")

    for op in reversed(ops):
        branch_e, branch_g = _apply_op(branch_e, branch_g, op, inverse=True)
    final = _split(branch_e, branch_g)

    ref = coherent_state(alpha)
    amp_e_alpha = final.weight_e * inner_product(ref, final.state_e)
    if abs(abs(amp_e_alpha) ** 2 - final.p_e * abs(inner_product(ref, final.state_e)) ** 2) > 1e-10:
        raise AssertionError("branch decomposition identity violated")
    return ProtocolResult(final=final, p_e=final.p_e, p_g=final.p_g, intermediate=intermediate)


# --- numeric Jaynes-Cummings oracle ---------------------------------------


def jc_numeric_evolve(
    psi: FockVector,
    tls,
    params: JCParams,
    hamiltonian: str = "jc",
    rtol: float = 1e-9,
    atol: float = 1e-12,
) -> np.ndarray:
    """Integrate the interaction-picture Schroedinger equation.

    hamiltonian = "jc": H(t)/hbar = (Omega_0/2)(e^{i delta t} sigma^+ a +
    e^{-i delta t} sigma^- a^dag), exploiting the ladder structure that
    couples |e, n> to |g, n+1>.  hamiltonian = "dispersive": the effective
    far-detuned model chi * n conditioned on the coupled lower level, with
    chi = Omega_0^2 / (4 delta).

    Returns the joint state as an array of shape (2, n_trunc): row 0 the
    |e> branch, row 1 the |g> branch.  The initial product state is
    tls[0] |e, psi> + tls[1] |g, psi>.
    """
    if psi.leakage > 1e-8:
        warnings.warn(f"initial Fock vector carries truncation leakage {psi.leakage:.2e}", stacklevel=2)
    c_tls = np.asarray(tls, dtype=complex)
    if c_tls.shape != (2,):
        raise ValueError("tls must be a 2-component amplitude vector")
    n = psi.dimension
    y0 = np.concatenate([c_tls[0] * psi.coefficients, c_tls[1] * psi.coefficients])
    half_rabi = 0.5 * params.omega0_rabi
    delta = params.detuning
    ladder = np.sqrt(np.arange(1, n))  # couples e[m] <-> g[m+1]

    if hamiltonian == "jc":

        def rhs(t, y):
            ce, cg = y[:n], y[n:]
            phase = np.exp(1j * delta * t)
            dce = np.zeros(n, dtype=complex)
            dcg = np.zeros(n, dtype=complex)
            dce[:-1] = -1j * half_rabi * phase * ladder * cg[1:]
            dcg[1:] = -1j * half_rabi * np.conj(phase) * ladder * ce[:-1]
            return np.concatenate([dce, dcg])

    elif hamiltonian == "dispersive":
        if params.detuning == 0:
            raise ValueError("dispersive model needs a nonzero detuning")
        chi = params.omega0_rabi**2 / (4.0 * params.detuning)
        numbers = np.arange(n)

        def rhs(t, y):
            dcg = -1j * chi * numbers * y[n:]
            return np.concatenate([np.zeros(n, dtype=complex), dcg])

    else:
        raise ValueError("hamiltonian must be 'jc' or 'dispersive'")

    sol = solve_ivp(
        rhs,
        (0.0, params.interaction_time),
        y0,
        method="DOP853",
        rtol=rtol,
        atol=atol,
        dense_output=False,
    )
    if not sol.success:
        raise RuntimeError(f"JC integration failed: {sol.message}")
    y = sol.y[:, -1]
    norm = float(np.linalg.norm(y))
    if abs(norm - np.linalg.norm(y0)) > 1e-9 * max(1.0, np.linalg.norm(y0)):
        warnings.warn(f"integrator norm drift {abs(norm - 1.0):.2e}", stacklevel=2)
    out = y.reshape(2, n)
    top_population = float(np.abs(out[0, -1]) ** 2 + np.abs(out[1, -1]) ** 2)
    if top_population > 1e-10:
        warnings.warn(f"population {top_population:.2e} reached the top Fock level; enlarge the basis", stacklevel=2)
    return out

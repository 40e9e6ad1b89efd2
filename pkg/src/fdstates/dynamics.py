"""Time evolution engines.

Five engines share the `SimulationResult` container:

* `evolve_unitary` / `evolve_continuous` propagate with ``exp(-iHt)`` for a
  constant drive.
* `evolve_envelope` integrates the Schroedinger equation for a shaped
  periodic drive ``f(t)``.
* `evolve_kicked` alternates free Kerr evolution and instantaneous kicks.
* `evolve_kicked_dissipative` replaces the free step by the exact damped Kerr
  map (N = 2) or the Liouvillian propagator (any N).
* `ode_oracle` and `lindblad_oracle` integrate the equations of motion
  directly and serve as independent references.
"""

import logging

import numpy as np
from scipy import linalg
from scipy.integrate import solve_ivp
from scipy.special import binom
from tqdm import tqdm

from fdstates.analytic import leakage
from fdstates.errors import (
    IntegrationError,
    InvalidDampingError,
    InvalidDimensionError,
    UnsupportedEnvelopeError,
)
from fdstates.model import ConstantEnvelope, check_model_dim, kerr_hamiltonian
from fdstates.operators import (
    DensityMatrix,
    StateVector,
    annihilation,
    fidelity,
    matrix_exponential,
)

logger = logging.getLogger(__name__)

ODE_RTOL = 1e-10
ODE_ATOL = 1e-12


class KickSchedule:
    """Delta-kick timing.

    Attributes:
        period (float): Time T between kicks.
        n_pulses (int): Number of free-evolution-then-kick periods.
    """

    def __init__(self, period, n_pulses):
        if not period > 0:
            raise ValueError("Kick period must be positive, got %r." % (period,))
        if n_pulses < 0 or int(n_pulses) != n_pulses:
            raise ValueError("n_pulses must be a non-negative integer, got %r." % (n_pulses,))
        self.period = float(period)
        self.n_pulses = int(n_pulses)

    @property
    def times(self):
        """Sample times ``0, T, ..., n_pulses T``."""
        return self.period * np.arange(self.n_pulses + 1)

    def __repr__(self):
        return "KickSchedule(period=%r, n_pulses=%d)" % (self.period, self.n_pulses)


class SimulationResult:
    """Time series produced by an evolution engine.

    Attributes:
        times (np.array): Sample times, shape (S,).
        probs (np.array): Level populations, shape (S, dim).
        fidelity_vs_target (np.array or None): Fidelity with the target, shape (S,).
        states (np.array or None): Amplitudes (S, dim) or density matrices
            (S, dim, dim) at each sample.
    """

    def __init__(self, times, probs, fidelity_vs_target=None, states=None):
        self.times = np.asarray(times, dtype=float)
        self.probs = np.asarray(probs, dtype=float)
        if self.probs.shape[0] != self.times.shape[0]:
            raise InvalidDimensionError(
                "Got %d probability rows for %d times."
                % (self.probs.shape[0], self.times.shape[0])
            )
        self.fidelity_vs_target = (
            None if fidelity_vs_target is None else np.asarray(fidelity_vs_target, dtype=float)
        )
        self.states = states

    @property
    def dim(self):
        """Number of levels per probability row."""
        return self.probs.shape[1]

    def peaks(self):
        """Maximum population per level over the run."""
        return self.probs.max(axis=0)

    def troughs(self):
        """Minimum population per level over the run."""
        return self.probs.min(axis=0)

    def leakage(self, order):
        """Population outside the `order` lowest levels at each sample."""
        return leakage(self.probs, order)

    def final_state(self):
        """StateVector or DensityMatrix at the last sample."""
        if self.states is None:
            raise ValueError("The engine did not record states.")
        last = self.states[-1]
        if last.ndim == 1:
            return StateVector(last)
        return DensityMatrix(last, check=False)


def _require_constant(model):
    if not isinstance(model.envelope, ConstantEnvelope):
        raise UnsupportedEnvelopeError(
            "Continuous propagation needs a constant envelope, got %r; "
            "use the kicked engine." % model.envelope
        )


def _target_state(target, t):
    return target(t) if callable(target) else target


def _mixed_fidelity(target, rho):
    amp = target.normalized().amp
    if amp.shape[0] < rho.shape[0]:
        amp = np.concatenate((amp, np.zeros(rho.shape[0] - amp.shape[0])))
    elif amp.shape[0] > rho.shape[0]:
        amp = amp[: rho.shape[0]]
    value = np.vdot(amp, rho @ amp).real
    return float(min(1.0, max(0.0, value)))


def evolve_unitary(model, psi0, t):
    """Propagates `psi0` by ``exp(-iHt)`` with ``H = kerr + drive``.

    Args:
        model (KerrModel): Model with a constant envelope.
        psi0 (StateVector): Initial state of dimension ``model.dim``.
        t (float): Time.

    Returns:
        StateVector

    Raises:
        UnsupportedEnvelopeError: If the envelope is not constant.
    """
    _require_constant(model)
    check_model_dim(model, psi0.dim)
    if t == 0:
        return psi0
    return matrix_exponential(model.hamiltonian(), -1j * t).apply(psi0)


def evolve_continuous(model, psi0, duration, samples, target=None):
    """Samples the unitary evolution on a uniform grid over ``[0, duration]``.

    The Hamiltonian is diagonalized once; every sample is then
    ``V exp(-iwt) V^dagger |psi0>``.

    Args:
        model (KerrModel): Model with a constant envelope.
        psi0 (StateVector): Initial state.
        duration (float): Final time.
        samples (int): Number of samples, at least 2.
        target: StateVector or callable ``t -> StateVector`` to compare against.

    Returns:
        SimulationResult
    """
    _require_constant(model)
    check_model_dim(model, psi0.dim)
    if samples < 2:
        raise ValueError("At least 2 samples are needed, got %r." % (samples,))

    times = np.linspace(0.0, duration, samples)
    energies, basis = linalg.eigh(model.hamiltonian().m)
    weights = basis.conj().T @ psi0.amp
    states = (basis @ (np.exp(-1j * np.outer(energies, times)) * weights[:, None])).T
    states[0] = psi0.amp

    fidelities = None
    if target is not None:
        fidelities = [
            fidelity(_target_state(target, t), StateVector(amp))
            for t, amp in zip(times, states)
        ]
    logger.debug("Continuous evolution of %r over %d samples.", model, samples)
    return SimulationResult(times, np.abs(states) ** 2, fidelities, states)


def _require_smooth(model):
    if not hasattr(model.envelope, "value"):
        raise UnsupportedEnvelopeError(
            "Direct integration needs an envelope with finite values, got %r; "
            "use the kicked engine." % model.envelope
        )
    return model.envelope


def _schrodinger_rhs(model, dim):
    envelope = _require_smooth(model)
    kerr = -1j * kerr_hamiltonian(model.order, model.chi, dim).m
    drive = -1j * model.with_dim(dim).drive_operator().m

    def rhs(t, amp):
        return kerr @ amp + envelope.value(t) * (drive @ amp)

    return rhs


def evolve_envelope(
    model, psi0, duration, samples, target=None, rtol=ODE_RTOL, atol=ODE_ATOL
):
    """Integrates ``i dC/dt = (H_kerr + f(t) H_drive) C`` with DOP853.

    Used for shaped periodic drives such as `PeriodicTabulated`; samples are
    taken on a uniform grid over ``[0, duration]``.

    Args:
        model (KerrModel): Model whose envelope provides ``value(t)``.
        psi0 (StateVector): Initial state.
        duration (float): Final time.
        samples (int): Number of samples, at least 2.
        target (StateVector or callable): Optional target, fixed or ``t -> state``.

    Returns:
        SimulationResult

    Raises:
        UnsupportedEnvelopeError: For delta trains.
        IntegrationError: If the integrator fails.
    """
    rhs = _schrodinger_rhs(model, model.dim)
    check_model_dim(model, psi0.dim)
    if samples < 2:
        raise ValueError("At least 2 samples are needed, got %r." % (samples,))

    times = np.linspace(0.0, duration, samples)
    solution = solve_ivp(
        rhs,
        t_span=(0.0, duration),
        y0=psi0.amp.astype(complex),
        method="DOP853",
        t_eval=times,
        rtol=rtol,
        atol=atol,
    )
    if not solution.success:
        raise IntegrationError("Envelope integration failed: %s" % solution.message)

    states = solution.y.T
    fidelities = None
    if target is not None:
        fidelities = [
            fidelity(_target_state(target, t), StateVector(amp))
            for t, amp in zip(times, states)
        ]
    logger.debug("Envelope evolution of %r: %d steps.", model, solution.t.shape[0])
    return SimulationResult(times, np.abs(states) ** 2, fidelities, states)


def kick_operators(model, period):
    """Returns ``(U_free, U_kick)`` for one period of a delta-kicked drive.

    ``U_free = exp(-i kerr T)`` and ``U_kick = exp(-i drive)``; each delta pulse
    carries unit area, so the kick rotates by ``eps`` per pulse.
    """
    u_free = matrix_exponential(model.kerr(), -1j * period)
    u_kick = matrix_exponential(model.drive_operator(), -1j)
    return u_free, u_kick


def evolve_kicked(model, psi0, schedule, target=None, progress=False):
    """Applies ``U_kick U_free`` once per period and samples after each kick.

    Sample k sits at ``t = kT`` and follows k kicks, so its pulse area is
    ``k eps``. Sample 0 is `psi0`.

    Args:
        model (KerrModel): Model; its drive kind selects the kick generator.
        psi0 (StateVector): Initial state.
        schedule (KickSchedule): Kick timing.
        target: StateVector or callable ``t -> StateVector``.
        progress (bool): Show a tqdm progress bar.

    Returns:
        SimulationResult
    """
    check_model_dim(model, psi0.dim)
    u_free, u_kick = kick_operators(model, schedule.period)
    step = u_kick.m @ u_free.m

    states = np.empty((schedule.n_pulses + 1, model.dim), dtype=complex)
    states[0] = psi0.amp
    for k in tqdm(range(1, schedule.n_pulses + 1), disable=not progress):
        states[k] = step @ states[k - 1]

    times = schedule.times
    fidelities = None
    if target is not None:
        fidelities = [
            fidelity(_target_state(target, t), StateVector(amp))
            for t, amp in zip(times, states)
        ]
    return SimulationResult(times, np.abs(states) ** 2, fidelities, states)


class DampedKerrMap:
    """Exact one-period propagator of the damped two-photon Kerr cavity.

    Solves ``d rho/dt = -i[(chi/2) a^dagger^2 a^2, rho]
    + (gamma/2)(2 a rho a^dagger - a^dagger a rho - rho a^dagger a)`` over a
    time T. Each diagonal ``d = p - q >= 0`` of rho evolves independently:

    ``rho'_{n, n-d} = exp(-lambda_n T) sum_k sqrt(C(n+k, k) C(n-d+k, k)) h^k rho_{n+k, n+k-d}``

    with ``mu = gamma + i chi d``, ``lambda_n = n mu - gamma d / 2 - i chi d (d + 1) / 2``
    and ``h = gamma (1 - exp(-mu T)) / mu`` (zero for gamma = 0). Entries with
    p < q follow from Hermiticity. The transfer matrices are built once per map.

    Attributes:
        chi (float): Nonlinearity constant.
        gamma (float): Damping constant, >= 0.
        period (float): Time T.
        dim (int): Number of Fock levels.
    """

    def __init__(self, chi, gamma, period, dim):
        if gamma < 0:
            raise InvalidDampingError("Damping constant must be >= 0, got %r." % (gamma,))
        if not chi > 0:
            raise ValueError("chi must be positive, got %r." % (chi,))
        if not period > 0:
            raise ValueError("Period must be positive, got %r." % (period,))
        self.chi = float(chi)
        self.gamma = float(gamma)
        self.period = float(period)
        self.dim = int(dim)
        self._transfer = [self._transfer_matrix(d) for d in range(self.dim)]

    def _transfer_matrix(self, d):
        chi, gamma, period = self.chi, self.gamma, self.period
        mu = gamma + 1j * chi * d
        h = 0.0 if gamma == 0 else gamma * -np.expm1(-mu * period) / mu

        n = np.arange(d, self.dim)
        decay = np.exp(-(n * mu - gamma * d / 2 - 0.5j * chi * d * (d + 1)) * period)
        size = n.shape[0]
        matrix = np.zeros((size, size), dtype=complex)
        for k in range(size):
            rows = np.arange(size - k)
            feed = np.sqrt(binom(n[rows] + k, k) * binom(n[rows] - d + k, k))
            matrix[rows, rows + k] = decay[rows] * feed * h ** k
        return matrix

    def apply(self, rho):
        """Maps a (dim, dim) array over one period; returns a new array."""
        out = np.empty_like(rho, dtype=complex)
        idx = np.arange(self.dim)
        for d, matrix in enumerate(self._transfer):
            column = idx[: self.dim - d]
            values = matrix @ rho[column + d, column]
            out[column + d, column] = values
            if d > 0:
                out[column, column + d] = values.conj()
        return out


def damped_kerr_step(rho, chi, gamma, period):
    """One period of the exact damped two-photon Kerr map.

    Args:
        rho (DensityMatrix): State before the step.
        chi (float): Nonlinearity constant.
        gamma (float): Damping constant.
        period (float): Time T.

    Returns:
        DensityMatrix

    Raises:
        InvalidDampingError: If gamma < 0.
    """
    kerr_map = DampedKerrMap(chi, gamma, period, rho.dim)
    return DensityMatrix(kerr_map.apply(rho.rho), check=False)


def liouvillian(hamiltonian, gamma):
    """Superoperator of the damped master equation on row-major ``vec(rho)``.

    Uses ``vec(A rho B) = (A kron B^T) vec(rho)``.
    """
    dim = hamiltonian.dim
    identity = np.eye(dim)
    h = hamiltonian.m
    a = annihilation(dim).m
    occupation = a.conj().T @ a
    return (
        -1j * (np.kron(h, identity) - np.kron(identity, h.T))
        + gamma * np.kron(a, a.conj())
        - 0.5 * gamma * (np.kron(occupation, identity) + np.kron(identity, occupation.T))
    )


def liouvillian_step(rho, hamiltonian, gamma, period):
    """Evolves `rho` over `period` with ``expm(L T)``; valid for any Kerr order."""
    if gamma < 0:
        raise InvalidDampingError("Damping constant must be >= 0, got %r." % (gamma,))
    propagator = linalg.expm(liouvillian(hamiltonian, gamma) * period)
    vec = propagator @ rho.rho.reshape(-1)
    return DensityMatrix(vec.reshape(rho.dim, rho.dim), check=False)


def _free_damped_propagator(model, gamma, period):
    if model.order == 2:
        kerr_map = DampedKerrMap(model.chi, gamma, period, model.dim)
        return kerr_map.apply
    propagator = linalg.expm(liouvillian(model.kerr(), gamma) * period)
    dim = model.dim
    return lambda rho: (propagator @ rho.reshape(-1)).reshape(dim, dim)


def evolve_kicked_dissipative(model, rho0, gamma, schedule, target=None, progress=False):
    """Damped free evolution followed by a unitary kick, once per period.

    The exact damped Kerr map is used for N = 2, the Liouvillian propagator
    otherwise. Sample 0 is `rho0`; sample k follows k periods.

    Args:
        model (KerrModel): Model; supplies chi, order and the kick generator.
        rho0 (DensityMatrix): Initial state.
        gamma (float): Damping constant, >= 0.
        schedule (KickSchedule): Kick timing.
        target: StateVector or callable ``t -> StateVector``.
        progress (bool): Show a tqdm progress bar.

    Returns:
        SimulationResult: `states` holds the density matrices.

    Raises:
        InvalidDampingError: If gamma < 0.
    """
    if gamma < 0:
        raise InvalidDampingError("Damping constant must be >= 0, got %r." % (gamma,))
    check_model_dim(model, rho0.dim)
    free = _free_damped_propagator(model, gamma, schedule.period)
    kick = matrix_exponential(model.drive_operator(), -1j).m
    kick_dagger = kick.conj().T

    states = np.empty((schedule.n_pulses + 1, model.dim, model.dim), dtype=complex)
    states[0] = rho0.rho
    for k in tqdm(range(1, schedule.n_pulses + 1), disable=not progress):
        states[k] = kick @ free(states[k - 1]) @ kick_dagger

    times = schedule.times
    probs = np.real(np.diagonal(states, axis1=1, axis2=2))
    fidelities = None
    if target is not None:
        fidelities = [
            _mixed_fidelity(_target_state(target, t), rho) for t, rho in zip(times, states)
        ]
    logger.debug(
        "Dissipative run: gamma=%g, %d periods, final trace %.15g.",
        gamma,
        schedule.n_pulses,
        np.trace(states[-1]).real,
    )
    return SimulationResult(times, probs, fidelities, states)


def ode_oracle(model, psi0, t, dim_big, rtol=ODE_RTOL, atol=ODE_ATOL):
    """Integrates ``i dC/dt = H C`` in `dim_big` levels with DOP853.

    Args:
        model (KerrModel): Model with a constant or tabulated envelope; the drive is
            scaled by ``f(t)``.
        psi0 (StateVector): Initial state of dimension ``model.dim``.
        t (float): Final time.
        dim_big (int): Integration dimension, at least ``model.dim``.

    Returns:
        (StateVector, float): The state truncated to ``model.dim`` and the norm
        of the discarded levels.

    Raises:
        UnsupportedEnvelopeError: For delta trains.
        IntegrationError: If the integrator fails.
    """
    rhs = _schrodinger_rhs(model, max(dim_big, model.dim))
    check_model_dim(model, psi0.dim)
    if dim_big < model.dim:
        raise InvalidDimensionError(
            "dim_big = %d is smaller than the model dimension %d." % (dim_big, model.dim)
        )
    if t == 0:
        return psi0, 0.0

    solution = solve_ivp(
        rhs,
        t_span=(0.0, t),
        y0=psi0.embed(dim_big).amp,
        method="DOP853",
        rtol=rtol,
        atol=atol,
    )
    if not solution.success:
        raise IntegrationError("ODE oracle failed: %s" % solution.message)

    amp = solution.y[:, -1]
    tail = float(np.linalg.norm(amp[model.dim :]))
    logger.debug("ODE oracle: %d steps, discarded tail %.3g.", solution.t.shape[0], tail)
    return StateVector(amp[: model.dim]), tail


def lindblad_oracle(rho0, hamiltonian, gamma, t, rtol=ODE_RTOL, atol=ODE_ATOL):
    """Integrates the damped master equation with DOP853.

    Args:
        rho0 (DensityMatrix): Initial state.
        hamiltonian (Operator): Hamiltonian of the cavity.
        gamma (float): Damping constant.
        t (float): Final time.

    Returns:
        DensityMatrix

    Raises:
        IntegrationError: If the integrator fails.
    """
    if gamma < 0:
        raise InvalidDampingError("Damping constant must be >= 0, got %r." % (gamma,))
    dim = rho0.dim
    h = hamiltonian.m
    a = annihilation(dim).m
    a_dag = a.conj().T
    occupation = a_dag @ a

    def rhs(_, vec):
        rho = vec.reshape(dim, dim)
        rho_dot = -1j * (h @ rho - rho @ h) + gamma * (
            a @ rho @ a_dag - 0.5 * (occupation @ rho + rho @ occupation)
        )
        return rho_dot.reshape(-1)

    solution = solve_ivp(
        rhs,
        t_span=(0.0, t),
        y0=rho0.rho.reshape(-1),
        method="DOP853",
        rtol=rtol,
        atol=atol,
    )
    if not solution.success:
        raise IntegrationError("Lindblad oracle failed: %s" % solution.message)
    return DensityMatrix(solution.y[:, -1].reshape(dim, dim), check=False)


def free_kerr_operator(order, chi, period, dim):
    """``exp(-i kerr T)`` for a bare Kerr cavity."""
    return matrix_exponential(kerr_hamiltonian(order, chi, dim), -1j * period)


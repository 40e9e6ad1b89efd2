"""Hamiltonians, drive envelopes and envelope-derived quantities.

The system is a nonlinear oscillator with an N-photon Kerr term driven either
linearly, ``eps (a^dagger + a) f(t)``, or parametrically,
``eps (a^dagger^2 + a^2) f(t)``. All energies are in units with hbar = 1.
"""

import logging
import math

import numpy as np
from scipy.special import factorial

from fdstates.errors import (
    InvalidDimensionError,
    MissingPeriodError,
    ResonanceError,
    UnsupportedEnvelopeError,
)
from fdstates.operators import Operator, annihilation, check_dimension, creation

logger = logging.getLogger(__name__)

LINEAR = "linear"
PARAMETRIC = "parametric"
DRIVE_KINDS = (LINEAR, PARAMETRIC)

WEAK_DRIVE_RATIO = 0.2
RESONANCE_TOL = 1e-9
B_SERIES_TOL = 1e-10
B_SERIES_MAX_TERMS = 2 ** 22


def _check_period(period):
    if period is None or not np.isfinite(period) or period <= 0:
        raise MissingPeriodError("Period must be a positive number, got %r." % (period,))
    return float(period)


class ConstantEnvelope:
    """Constant drive, ``f(t) = 1``.

    The envelope is not periodic by itself; quantities defined per period (Fourier
    coefficients, the B coefficient) take the period from `period` or from an
    explicit argument.

    Attributes:
        period (float or None): Optional period T used for Fourier quantities.
    """

    kind = "constant"

    def __init__(self, period=None):
        self.period = None if period is None else _check_period(period)

    def value(self, t):
        """Returns ``f(t) = 1``."""
        return 1.0

    def integral(self, t):
        """Returns ``int_0^t f(t') dt'``."""
        return max(float(t), 0.0)

    def fourier(self, n, period):
        """Fourier coefficient ``c_n`` over one period."""
        return complex(period) if n == 0 else 0j

    def __eq__(self, other):
        return isinstance(other, ConstantEnvelope) and self.period == other.period

    def __repr__(self):
        return "ConstantEnvelope(period=%r)" % self.period


class DeltaTrain:
    """Train of Dirac-delta pulses ``f(t) = sum_k delta(t - kT)``, k = 0, 1, ...

    Attributes:
        period (float): Time T between subsequent pulses.
    """

    kind = "delta_train"

    def __init__(self, period):
        self.period = _check_period(period)

    def pulse_count(self, t):
        """Number of pulses in ``[0, t]``, the k = 0 pulse included."""
        if t < 0:
            return 0
        # tolerance keeps t = kT from landing just below an integer
        return int(math.floor(t / self.period + 1e-12)) + 1

    def integral(self, t):
        """Returns ``int_0^t f(t') dt'``; every pulse carries unit weight."""
        return float(self.pulse_count(t))

    def fourier(self, n, period):
        """Fourier coefficient ``c_n = 1``; the pulse on the boundary counts fully."""
        return 1.0 + 0j

    def __eq__(self, other):
        return isinstance(other, DeltaTrain) and self.period == other.period

    def __repr__(self):
        return "DeltaTrain(period=%r)" % self.period


class PeriodicTabulated:
    """Periodic envelope given by equidistant samples over one period.

    Sample ``j`` sits at ``t_j = j T / M``; the envelope is the periodic
    piecewise-linear interpolant of the samples.

    Attributes:
        period (float): Period T.
        samples (np.array): M >= 2 real samples.
    """

    kind = "periodic_tabulated"

    def __init__(self, period, samples):
        self.period = _check_period(period)
        samples = np.array(samples, dtype=float)
        if samples.ndim != 1 or samples.shape[0] < 2:
            raise UnsupportedEnvelopeError("A tabulated envelope needs at least 2 samples.")
        samples.flags.writeable = False
        self.samples = samples

    @property
    def _step(self):
        return self.period / self.samples.shape[0]

    def value(self, t):
        """Evaluates the interpolant at `t`."""
        nodes = np.arange(self.samples.shape[0] + 1) * self._step
        closed = np.append(self.samples, self.samples[0])
        return float(np.interp(float(t) % self.period, nodes, closed))

    def integral(self, t):
        """Returns ``int_0^t f(t') dt'`` of the interpolant (exact)."""
        if t <= 0:
            return 0.0
        full_periods, remainder = divmod(float(t), self.period)
        closed = np.append(self.samples, self.samples[0])
        step = self._step
        segment_areas = step * (closed[:-1] + closed[1:]) / 2
        node_integrals = np.concatenate(([0.0], np.cumsum(segment_areas)))

        j = min(int(remainder // step), self.samples.shape[0] - 1)
        u = remainder - j * step
        slope = (closed[j + 1] - closed[j]) / step
        partial = node_integrals[j] + u * closed[j] + slope * u ** 2 / 2
        return full_periods * node_integrals[-1] + partial

    def fourier(self, n, period):
        """Exact Fourier coefficient of the piecewise-linear interpolant."""
        n_samples = self.samples.shape[0]
        spectrum = np.fft.fft(self.samples)
        return complex(
            self._step * spectrum[n % n_samples] * np.sinc(n / n_samples) ** 2
        )

    def fourier_array(self, ns):
        """Vectorized `fourier` over an integer array `ns`."""
        n_samples = self.samples.shape[0]
        spectrum = np.fft.fft(self.samples)
        ns = np.asarray(ns)
        return self._step * spectrum[ns % n_samples] * np.sinc(ns / n_samples) ** 2

    def __eq__(self, other):
        return (
            isinstance(other, PeriodicTabulated)
            and self.period == other.period
            and np.array_equal(self.samples, other.samples)
        )

    def __repr__(self):
        return "PeriodicTabulated(period=%r, samples=%d)" % (
            self.period,
            self.samples.shape[0],
        )


class KerrModel:
    """Driven Kerr oscillator simulated in a truncated Fock space.

    Attributes:
        dim (int): Simulation truncation dimension. Defaults to ``order + 3``.
        order (int): Nonlinearity order N, the dimension of the target FD state.
        chi (float): Nonlinearity constant.
        eps (float): Drive strength.
        drive (str): ``"linear"`` or ``"parametric"``.
        envelope: ConstantEnvelope, DeltaTrain or PeriodicTabulated.
    """

    def __init__(self, order, chi, eps, dim=None, drive=LINEAR, envelope=None):
        """Initializes a KerrModel and warns outside the weak-drive regime."""
        self.order = check_dimension(order)
        self.dim = self.order + 3 if dim is None else check_dimension(dim)
        if not chi > 0:
            raise ValueError("chi must be positive, got %r." % (chi,))
        if eps < 0:
            raise ValueError("eps must be non-negative, got %r." % (eps,))
        if drive not in DRIVE_KINDS:
            raise ValueError("Drive %r is not one of %s." % (drive, DRIVE_KINDS))
        self.chi = float(chi)
        self.eps = float(eps)
        self.drive = drive
        self.envelope = ConstantEnvelope() if envelope is None else envelope
        self.check_regime()

    @property
    def weak_drive(self):
        """True if ``eps / chi <= 0.2``."""
        return self.eps / self.chi <= WEAK_DRIVE_RATIO

    def check_regime(self):
        """Logs warnings for a strong drive or too little truncation headroom."""
        if not self.weak_drive:
            logger.warning(
                "eps/chi = %.3g exceeds %.2g; perturbative results do not apply.",
                self.eps / self.chi,
                WEAK_DRIVE_RATIO,
            )
        if self.dim < self.order + 2:
            logger.warning(
                "dim = %d leaves no leakage level above order N = %d.",
                self.dim,
                self.order,
            )

    def kerr(self):
        """N-photon Kerr Hamiltonian in the simulation space."""
        return kerr_hamiltonian(self.order, self.chi, self.dim)

    def drive_operator(self):
        """Drive Hamiltonian (envelope not included)."""
        return drive_hamiltonian(self.drive, self.eps, self.dim)

    def hamiltonian(self):
        """Kerr plus drive, the generator for a constant envelope."""
        return self.kerr() + self.drive_operator()

    def with_dim(self, dim):
        """Copy of the model with another truncation dimension."""
        return KerrModel(
            self.order, self.chi, self.eps, dim, self.drive, self.envelope
        )

    def __repr__(self):
        return "KerrModel(order=%d, chi=%g, eps=%g, dim=%d, drive=%r, envelope=%r)" % (
            self.order,
            self.chi,
            self.eps,
            self.dim,
            self.drive,
            self.envelope,
        )


def kerr_hamiltonian(order, chi, dim):
    """Kerr Hamiltonian ``(chi / N) (a^dagger)^N a^N`` in the Fock basis.

    The matrix is diagonal with entries ``(chi / N) n (n - 1) ... (n - N + 1)``;
    the levels ``0, ..., N - 1`` are degenerate at zero energy.

    Args:
        order (int): Nonlinearity order N.
        chi (float): Nonlinearity constant.
        dim (int): Number of Fock levels.

    Returns:
        Operator: Hermitian diagonal operator.

    Example:
        .. code-block:: python

            >>> np.diag(kerr_hamiltonian(2, 1.0, 4).m).real
            array([0., 0., 1., 3.])
    """
    order = check_dimension(order)
    dim = check_dimension(dim)
    levels = np.arange(dim, dtype=float)
    falling = np.prod([levels - j for j in range(order)], axis=0)
    return Operator(np.diag(chi / order * falling), hermitian=True)


def drive_hamiltonian(kind, eps, dim):
    """Drive Hamiltonian with truncated ladder operators.

    Args:
        kind (str): ``"linear"`` for ``eps (a^dagger + a)``, ``"parametric"`` for
            ``eps (a^dagger^2 + a^2)``.
        eps (float): Drive strength.
        dim (int): Number of Fock levels.

    Returns:
        Operator: Hermitian operator.
    """
    dim = check_dimension(dim)
    a = annihilation(dim).m
    a_dag = creation(dim).m
    if kind == LINEAR:
        generator = a_dag + a
    elif kind == PARAMETRIC:
        generator = a_dag @ a_dag + a @ a
    else:
        raise ValueError("Drive %r is not one of %s." % (kind, DRIVE_KINDS))
    return Operator(eps * generator, hermitian=True)


def pulse_area(envelope, eps, t):
    """Pulse area ``Theta(t) = eps int_0^t f(t') dt'``; zero for ``t < 0``."""
    if t < 0:
        return 0.0
    return eps * envelope.integral(t)


def _resolve_period(envelope, period):
    period = envelope.period if period is None else period
    if period is None:
        raise MissingPeriodError(
            "%r has no period; pass an explicit period argument." % envelope
        )
    return _check_period(period)


def fourier_coefficient(envelope, n, period=None):
    """Fourier coefficient ``c_n = int_0^T f(t) exp(-2 pi i n t / T) dt``.

    Args:
        envelope: Drive envelope.
        n (int): Harmonic index.
        period (float): Period for envelopes without one (ConstantEnvelope).

    Returns:
        complex: The coefficient ``c_n``.

    Raises:
        MissingPeriodError: If no period is known.
    """
    period = _resolve_period(envelope, period)
    return envelope.fourier(int(n), period)


def b_parameter(order, chi, period):
    """Returns ``a = T chi (N - 1)! / (2 pi)``."""
    return period * chi * float(factorial(order - 1, exact=True)) / (2 * math.pi)


def b_coefficient(envelope, order, chi, period=None):
    """Coefficient ``B = (1 / 2 pi) sum_n c_n / (n + a)``.

    The constant envelope keeps only ``c_0 = T``, giving ``B = 1 / (chi (N - 1)!)``.
    The delta train has ``c_n = 1`` and the symmetric sum equals
    ``cot(pi a) / 2``. Other envelopes are summed in symmetric pairs, doubling
    the cutoff until the last block contributes less than 1e-10.

    Raises:
        ResonanceError: If ``a`` is within 1e-9 of an integer ``-n`` with
            ``c_n != 0``.
    """
    period = _resolve_period(envelope, period)
    order = check_dimension(order)
    a = b_parameter(order, chi, period)

    nearest = int(round(a))
    if abs(a - nearest) <= RESONANCE_TOL and abs(envelope.fourier(-nearest, period)) > 1e-12:
        raise ResonanceError(
            "Resonance: a = %.12g hits the pole n = %d with nonzero c_n." % (a, -nearest)
        )

    if isinstance(envelope, ConstantEnvelope):
        return complex(period / (2 * math.pi * a))
    if isinstance(envelope, DeltaTrain):
        return complex(0.5 / math.tan(math.pi * a))
    if not isinstance(envelope, PeriodicTabulated):
        raise UnsupportedEnvelopeError("No B series for envelope %r." % envelope)

    total = envelope.fourier(0, period) / a
    low, high = 0, 64
    while True:
        ns = np.arange(low + 1, high + 1)
        block = np.sum(
            envelope.fourier_array(ns) / (ns + a) + envelope.fourier_array(-ns) / (a - ns)
        )
        total += block
        if abs(block) / (2 * math.pi) < B_SERIES_TOL:
            break
        if high >= B_SERIES_MAX_TERMS:
            logger.warning("B series not converged after %d terms.", high)
            break
        low, high = high, 2 * high
    logger.debug("B series summed up to |n| = %d.", high)
    return complex(total / (2 * math.pi))


def check_model_dim(model, dim):
    """Raises InvalidDimensionError if `dim` does not match the model."""
    if dim != model.dim:
        raise InvalidDimensionError(
            "State dimension %d does not match model dimension %d." % (dim, model.dim)
        )

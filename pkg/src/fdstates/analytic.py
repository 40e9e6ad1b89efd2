"""Closed-form perturbative solutions and finite-dimensional target states.

In the weak-drive regime the Kerr term leaves the lowest levels degenerate and
the drive acts resonantly inside that manifold. The amplitudes then follow the
drive matrix restricted to the manifold, which the functions below evaluate in
closed form (coherent case, via Hermite roots) or by exact diagonalization of
the effective coupling matrix (squeezed case).
"""

import logging
import math

import numpy as np
from scipy import linalg
from scipy.special import eval_hermitenorm, factorial

from fdstates.errors import InvalidStateError, UnsupportedOrderError
from fdstates.model import b_coefficient, fourier_coefficient
from fdstates.operators import (
    DensityMatrix,
    Operator,
    StateVector,
    annihilation,
    check_dimension,
    creation,
    matrix_exponential,
)

logger = logging.getLogger(__name__)

MAX_HERMITE_ORDER = 30


class CoherentCoefficients:
    """Amplitudes of the state reached after k periods of a linear drive.

    Attributes:
        order (int): Dimension N of the target space.
        coeffs (np.array): ``C_0, ..., C_{N-1}``.
        leak (complex): ``C_N``; the state carries ``eps * C_N`` on level N.
        eps (float): Drive strength the coefficients were computed for.
        tolerance (float): Declared normalization tolerance of `coeffs`.
    """

    def __init__(self, order, coeffs, leak, eps, tolerance=None):
        self.order = check_dimension(order)
        coeffs = np.array(coeffs, dtype=complex)
        coeffs.flags.writeable = False
        self.coeffs = coeffs
        self.leak = complex(leak)
        self.eps = float(eps)
        self.tolerance = max(1e-10, 10 * self.eps ** 2) if tolerance is None else tolerance
        if abs(np.sum(np.abs(coeffs) ** 2) - 1.0) > self.tolerance:
            raise InvalidStateError("Coherent coefficients are not normalized.")

    def to_state(self, dim=None, include_leak=False):
        """Embeds the amplitudes into `dim` levels (default: N, or N + 1 with leak).

        The leak term enters as ``eps * C_N`` and is not renormalized.
        """
        dim = (self.order + int(include_leak)) if dim is None else check_dimension(dim)
        amp = np.zeros(dim, dtype=complex)
        amp[: self.order] = self.coeffs
        if include_leak and dim > self.order:
            amp[self.order] = self.eps * self.leak
        return StateVector(amp)


class SqueezedCoefficients:
    """Even-level amplitudes of the state generated by a parametric drive.

    Attributes:
        sigma (int): ``Int(s / 2)``.
        coeffs (np.array): ``C_0, C_2, ..., C_{2 sigma}``.
        leak (complex): ``C_{2 sigma + 2}``; enters the state as ``eps * leak``.
        eps (float): Drive strength.
    """

    def __init__(self, sigma, coeffs, leak, eps, tolerance=None):
        self.sigma = int(sigma)
        coeffs = np.array(coeffs, dtype=complex)
        coeffs.flags.writeable = False
        self.coeffs = coeffs
        self.leak = complex(leak)
        self.eps = float(eps)
        self.tolerance = max(1e-10, 10 * self.eps ** 2) if tolerance is None else tolerance
        if abs(np.sum(np.abs(coeffs) ** 2) - 1.0) > self.tolerance:
            raise InvalidStateError("Squeezed coefficients are not normalized.")

    def to_state(self, dim=None, include_leak=False):
        """Places ``C_{2n}`` on the even levels of a `dim`-level state."""
        top = 2 * self.sigma + 2 if include_leak else 2 * self.sigma
        dim = top + 1 if dim is None else check_dimension(dim)
        amp = np.zeros(dim, dtype=complex)
        even = np.arange(0, min(2 * self.sigma, dim - 1) + 1, 2)
        amp[even] = self.coeffs[: even.shape[0]]
        if include_leak and dim > 2 * self.sigma + 2:
            amp[2 * self.sigma + 2] = self.eps * self.leak
        return StateVector(amp)


def two_level_amplitudes(theta):
    """Rabi solution ``C_0 = cos(Theta)``, ``C_1 = -i sin(Theta)``.

    Normalized to ``C_0(0) = 1``; differs from the textbook form
    ``(i cos, sin)`` by the global phase i.
    """
    return StateVector([math.cos(theta), -1j * math.sin(theta)])


def three_level_amplitudes(eps, t):
    """Closed-form amplitudes of the three-level (N = 3) manifold."""
    phase = math.sqrt(3) * eps * t
    return StateVector(
        [
            (2 + math.cos(phase)) / 3,
            -1j * math.sin(phase) / math.sqrt(3),
            math.sqrt(2) / 3 * (math.cos(phase) - 1),
        ]
    )


def hermite_roots(order):
    """Roots of the probabilists' Hermite polynomial ``He_N`` in ascending order.

    The roots are the eigenvalues of the symmetric tridiagonal Jacobi matrix with
    off-diagonal ``sqrt(n)``, polished by one Newton step.

    The roots are exact to a few ulp. The residual ``|He_N(x_m)|`` is then set by
    rounding, about ``|N He_{N-1}(x_m)|`` times the spacing of floats at
    ``x_m``; He_N grows so fast that from N = 15 on it exceeds 1e-9 (about
    1e11 at N = 30) although the roots are as accurate as float64 allows.

    Args:
        order (int): N, between 1 and 30.

    Returns:
        np.array: N real roots.

    Raises:
        UnsupportedOrderError: If N is outside 1..30.
    """
    if not isinstance(order, (int, np.integer)) or not 1 <= order <= MAX_HERMITE_ORDER:
        raise UnsupportedOrderError(
            "Hermite order must be in 1..%d, got %r." % (MAX_HERMITE_ORDER, order)
        )
    if order == 1:
        return np.zeros(1)

    off_diagonal = np.sqrt(np.arange(1, order, dtype=float))
    roots = linalg.eigvalsh_tridiagonal(np.zeros(order), off_diagonal)
    derivative = order * eval_hermitenorm(order - 1, roots)
    return roots - eval_hermitenorm(order, roots) / derivative


def hermite_weights(order):
    """Normalized quadrature weights ``(N - 1)! / (N He_{N-1}(x_m)^2)``; they sum to 1."""
    roots = hermite_roots(order)
    return float(factorial(order - 1, exact=True)) / (
        order * eval_hermitenorm(order - 1, roots) ** 2
    )


def coherent_amplitudes(order, theta):
    """Amplitudes ``C_0, ..., C_{N-1}`` for the pulse area `theta`.

    Example:
        .. code-block:: python

            >>> np.round(coherent_amplitudes(2, np.pi / 4), 6)
            array([0.707107+0.j      , 0.      -0.707107j])
    """
    roots = hermite_roots(order)
    weights = hermite_weights(order)
    phases = np.exp(1j * roots * theta)

    levels = np.arange(order)
    hermite = np.array([eval_hermitenorm(n, roots) for n in levels])
    signs = (-1.0) ** levels / np.sqrt(factorial(levels))
    return signs * (hermite @ (weights * phases))


def coherent_coefficients(order, eps, chi, envelope, k, period=None):
    """Perturbative amplitudes at ``t = kT`` for a linear drive with period T.

    ``C_n = ((N-1)!/N) ((-1)^n / sqrt(n!)) sum_m exp(i k x_m eps c_0)
    He_n(x_m) / He_{N-1}(x_m)^2`` over the roots ``x_m`` of ``He_N``, and the
    leak amplitude ``C_N = sqrt(N) B C_{N-1}``.

    Args:
        order (int): N.
        eps (float): Drive strength.
        chi (float): Nonlinearity constant.
        envelope: Periodic drive envelope.
        k (int): Number of elapsed periods.
        period (float): Period for envelopes without one.

    Returns:
        CoherentCoefficients

    Raises:
        ResonanceError: Propagated from `b_coefficient`.
    """
    if k < 0:
        raise ValueError("Number of periods must be non-negative, got %r." % (k,))
    area = eps * fourier_coefficient(envelope, 0, period).real
    coeffs = coherent_amplitudes(order, k * area)

    b = b_coefficient(envelope, order, chi, period)
    leak = math.sqrt(order) * b * coeffs[-1]
    return CoherentCoefficients(order, coeffs, leak, eps)


def fd_coherent_state(alpha, s):
    """FD coherent state ``exp(alpha a_s^dagger - alpha^* a_s) |0>`` in s + 1 levels."""
    dim = check_dimension(s + 1)
    alpha = complex(alpha)
    a = annihilation(dim).m
    a_dag = creation(dim).m
    generator = Operator(1j * (alpha * a_dag - np.conj(alpha) * a), hermitian=True)
    return matrix_exponential(generator, -1j).apply(StateVector.vacuum(dim))


def fd_squeezed_vacuum(xi, s):
    """FD squeezed vacuum ``exp[(xi/2) a_s^dagger^2 - (xi^*/2) a_s^2] |0>``."""
    dim = check_dimension(s + 1)
    xi = complex(xi)
    a = annihilation(dim).m
    a_dag = creation(dim).m
    generator = Operator(
        1j * (xi / 2 * a_dag @ a_dag - np.conj(xi) / 2 * a @ a), hermitian=True
    )
    return matrix_exponential(generator, -1j).apply(StateVector.vacuum(dim))


def effective_squeeze_matrix(sigma):
    """Coupling ``<2n+2| a^dagger^2 |2n> = sqrt((2n+1)(2n+2))`` on the even manifold."""
    n = np.arange(sigma, dtype=float)
    return np.diag(np.sqrt((2 * n + 1) * (2 * n + 2)), k=1) + np.diag(
        np.sqrt((2 * n + 1) * (2 * n + 2)), k=-1
    )


def squeezed_coefficients(s, eps, t):
    """Perturbative even-level amplitudes for a parametric drive.

    The amplitudes over ``|0>, |2>, ..., |2 sigma>`` evolve under the effective
    coupling matrix of the degenerate even-parity manifold; its exact
    diagonalization gives the spectral sum of the closed form. The leak is
    ``C_{2 sigma + 2} = 2^(-sigma-1) sqrt((2 sigma + 1)(2 sigma + 2)) C_{2 sigma}``.

    Args:
        s (int): The FD space has s + 1 levels; ``sigma = s // 2``.
        eps (float): Drive strength.
        t (float): Time.

    Returns:
        SqueezedCoefficients
    """
    s = check_dimension(s)
    sigma = s // 2
    coupling = Operator(effective_squeeze_matrix(sigma), hermitian=True)
    start = StateVector.vacuum(sigma + 1)
    coeffs = matrix_exponential(coupling, -1j * eps * t).apply(start).amp
    leak = 2.0 ** (-sigma - 1) * math.sqrt((2 * sigma + 1) * (2 * sigma + 2)) * coeffs[-1]
    return SqueezedCoefficients(sigma, coeffs, leak, eps)


def leakage(state, order):
    """Probability outside the `order` lowest levels.

    Args:
        state: StateVector, DensityMatrix or an array of level populations
            whose last axis runs over the levels.
        order (int): Number of levels counted as inside.

    Returns:
        float for a single state, np.array for a stack of population rows.
    """
    if isinstance(state, StateVector):
        return float(np.sum(np.abs(state.amp[order:]) ** 2))
    if isinstance(state, DensityMatrix):
        return float(np.sum(state.populations()[order:]))
    populations = np.asarray(state, dtype=float)
    return populations[..., order:].sum(axis=-1)

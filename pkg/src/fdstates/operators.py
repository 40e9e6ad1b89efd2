"""Finite-dimensional Fock-space linear algebra for fdstates.

States, operators and density matrices are dense numpy arrays over the Fock
levels ``|0>, ..., |dim - 1>``. All objects are read-only after construction.
"""

import logging
import math
import numbers

import numpy as np
from scipy import linalg

from fdstates.errors import InvalidDimensionError, InvalidStateError, NumericError

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
NORM_TOL = 1e-12
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-8


def check_dimension(dim):
    """Returns `dim` as int or raises InvalidDimensionError if it is not >= 1."""
    if isinstance(dim, bool) or not isinstance(dim, numbers.Integral) or dim < 1:
        raise InvalidDimensionError("Dimension must be a positive integer, got %r." % (dim,))
    return int(dim)


def _frozen(array, dtype=complex):
    array = np.array(array, dtype=dtype)
    array.flags.writeable = False
    return array


class StateVector:
    """Pure state in the Fock basis.

    Attributes:
        amp (np.array): Complex amplitudes ``C_n`` for ``n = 0, ..., dim - 1``.
    """

    def __init__(self, amp):
        """Initializes a StateVector from a 1-dimensional amplitude array."""
        amp = np.atleast_1d(np.asarray(amp, dtype=complex))
        if amp.ndim != 1:
            raise InvalidStateError("Amplitudes must be a 1-dimensional array.")
        check_dimension(amp.shape[0])
        if not np.all(np.isfinite(amp)):
            raise NumericError("State contains non-finite amplitudes.")
        self.amp = _frozen(amp)

    @classmethod
    def fock(cls, n, dim):
        """Fock state ``|n>`` in a space of dimension `dim`."""
        dim = check_dimension(dim)
        if not 0 <= n < dim:
            raise InvalidStateError("Level %d outside of 0..%d." % (n, dim - 1))
        amp = np.zeros(dim, dtype=complex)
        amp[n] = 1.0
        return cls(amp)

    @classmethod
    def vacuum(cls, dim):
        """Vacuum state ``|0>``."""
        return cls.fock(0, dim)

    @property
    def dim(self):
        """Number of Fock levels."""
        return self.amp.shape[0]

    @property
    def norm(self):
        """Euclidean norm of the amplitude vector."""
        return float(np.linalg.norm(self.amp))

    def is_normalized(self, tol=NORM_TOL):
        """Checks ``sum |C_n|^2 = 1`` within `tol`."""
        return abs(np.vdot(self.amp, self.amp).real - 1.0) <= tol

    def normalized(self):
        """Returns the state scaled to unit norm."""
        norm = self.norm
        if norm == 0.0:
            raise InvalidStateError("Cannot normalize a zero-norm state.")
        return StateVector(self.amp / norm)

    def embed(self, dim):
        """Zero-pads the state into a space of dimension ``dim >= self.dim``."""
        dim = check_dimension(dim)
        if dim < self.dim:
            raise InvalidDimensionError(
                "Cannot embed a %d-level state into %d levels." % (self.dim, dim)
            )
        amp = np.zeros(dim, dtype=complex)
        amp[: self.dim] = self.amp
        return StateVector(amp)

    def truncate(self, dim):
        """Keeps the `dim` lowest levels. The result is not renormalized."""
        dim = check_dimension(dim)
        return StateVector(self.amp[:dim])

    def __eq__(self, other):
        if isinstance(other, StateVector):
            return self.dim == other.dim and np.array_equal(self.amp, other.amp)
        return False

    def __repr__(self):
        return "StateVector(dim=%d)" % self.dim


class Operator:
    """Dense operator on the Fock space.

    Attributes:
        m (np.array): (dim, dim) complex matrix.
        hermitian (bool): True if the operator was flagged (and checked) Hermitian.
        unitary (bool): True if the operator was flagged (and checked) unitary.
    """

    def __init__(self, m, hermitian=False, unitary=False):
        """Initializes an Operator and validates the requested flags."""
        m = np.asarray(m, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidDimensionError("Operator matrix must be square, got %s." % (m.shape,))
        check_dimension(m.shape[0])
        if not np.all(np.isfinite(m)):
            raise NumericError("Operator contains non-finite entries.")
        if hermitian and hermiticity_error(m) > HERMITIAN_TOL:
            raise NumericError(
                "Operator flagged Hermitian deviates by %.3g." % hermiticity_error(m)
            )
        if unitary and unitarity_error(m) > UNITARY_TOL:
            raise NumericError(
                "Operator flagged unitary deviates by %.3g." % unitarity_error(m)
            )
        self.m = _frozen(m)
        self.hermitian = hermitian
        self.unitary = unitary

    @classmethod
    def identity(cls, dim):
        """Identity operator."""
        return cls(np.eye(check_dimension(dim)), hermitian=True, unitary=True)

    @property
    def dim(self):
        """Number of Fock levels."""
        return self.m.shape[0]

    def dagger(self):
        """Conjugate transpose."""
        return Operator(self.m.conj().T, hermitian=self.hermitian, unitary=self.unitary)

    def apply(self, state):
        """Returns the StateVector ``self |state>``."""
        if state.dim != self.dim:
            raise InvalidDimensionError(
                "Operator of dimension %d applied to state of dimension %d."
                % (self.dim, state.dim)
            )
        return StateVector(self.m @ state.amp)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            return Operator(self.m @ other.m)
        if isinstance(other, StateVector):
            return self.apply(other)
        return NotImplemented

    def __add__(self, other):
        if not isinstance(other, Operator):
            return NotImplemented
        return Operator(self.m + other.m, hermitian=self.hermitian and other.hermitian)

    def __mul__(self, scalar):
        if not isinstance(scalar, numbers.Number):
            return NotImplemented
        return Operator(
            scalar * self.m,
            hermitian=self.hermitian and np.imag(scalar) == 0,
        )

    __rmul__ = __mul__

    def __repr__(self):
        return "Operator(dim=%d, hermitian=%s, unitary=%s)" % (
            self.dim,
            self.hermitian,
            self.unitary,
        )


class DensityMatrix:
    """Mixed state in the Fock basis.

    Construction checks unit trace, Hermiticity and positivity up to round-off.

    Attributes:
        rho (np.array): (dim, dim) complex matrix.
    """

    def __init__(self, rho, check=True):
        """Initializes a DensityMatrix; `check=False` skips the invariant checks."""
        rho = np.asarray(rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidDimensionError("Density matrix must be square, got %s." % (rho.shape,))
        check_dimension(rho.shape[0])
        if not np.all(np.isfinite(rho)):
            raise NumericError("Density matrix contains non-finite entries.")
        self.rho = _frozen(rho)
        if check:
            self.check()

    @classmethod
    def from_state(cls, state):
        """Projector ``|psi><psi|`` of a (normalized) pure state."""
        amp = state.normalized().amp
        return cls(np.outer(amp, amp.conj()))

    @property
    def dim(self):
        """Number of Fock levels."""
        return self.rho.shape[0]

    @property
    def trace(self):
        """Trace of the density matrix."""
        return complex(np.trace(self.rho))

    def min_eigenvalue(self):
        """Smallest eigenvalue of the Hermitian part."""
        hermitian_part = 0.5 * (self.rho + self.rho.conj().T)
        return float(linalg.eigvalsh(hermitian_part)[0])

    def populations(self):
        """Diagonal elements ``<n|rho|n>``."""
        return np.real(np.diag(self.rho)).copy()

    def check(self):
        """Raises InvalidStateError if a density-matrix invariant is violated."""
        if abs(self.trace - 1.0) > TRACE_TOL:
            raise InvalidStateError("Trace %.12g differs from one." % self.trace.real)
        if hermiticity_error(self.rho) > TRACE_TOL:
            raise InvalidStateError("Density matrix is not Hermitian.")
        if self.min_eigenvalue() < -POSITIVITY_TOL:
            raise InvalidStateError(
                "Density matrix has negative eigenvalue %.3g." % self.min_eigenvalue()
            )

    def conjugate_by(self, unitary):
        """Returns ``U rho U^dagger``."""
        return DensityMatrix(unitary.m @ self.rho @ unitary.m.conj().T, check=False)

    def __repr__(self):
        return "DensityMatrix(dim=%d)" % self.dim


def hermiticity_error(m):
    """Returns ``max |m - m^dagger|``."""
    return float(np.max(np.abs(m - m.conj().T)))


def unitarity_error(m):
    """Returns ``max |m m^dagger - I|``."""
    return float(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))))


def annihilation(dim):
    """Truncated annihilation operator ``a_s = sum_n sqrt(n) |n-1><n|``.

    Args:
        dim (int): Number of Fock levels (``s + 1``).

    Returns:
        Operator: Matrix with ``sqrt(n)`` on the first superdiagonal.

    Example:
        .. code-block:: python

            >>> annihilation(3).m.real
            array([[0.        , 1.        , 0.        ],
                   [0.        , 0.        , 1.41421356],
                   [0.        , 0.        , 0.        ]])
    """
    dim = check_dimension(dim)
    return Operator(np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1))


def creation(dim):
    """Truncated creation operator, the conjugate transpose of `annihilation`."""
    return annihilation(dim).dagger()


def number(dim):
    """Number operator ``diag(0, 1, ..., dim - 1)``."""
    dim = check_dimension(dim)
    return Operator(np.diag(np.arange(dim, dtype=float)), hermitian=True)


def matrix_exponential(h, scale):
    """Computes ``exp(scale * h)``.

    Hermitian generators are exponentiated through their eigendecomposition
    ``h = V diag(w) V^dagger``, which is exact up to round-off for any complex
    `scale`. Other generators go through ``scipy.linalg.expm``. For Hermitian `h`
    and purely imaginary `scale` the result is flagged (and checked) unitary.

    Args:
        h (Operator): Generator.
        scale (complex): Scalar prefactor, e.g. ``-1j * t``.

    Returns:
        Operator: The matrix exponential.
    """
    scale = complex(scale)
    if not np.isfinite(scale):
        raise NumericError("Exponent scale %r is not finite." % scale)
    if not np.all(np.isfinite(h.m)):
        raise NumericError("Generator contains non-finite entries.")

    if h.hermitian or hermiticity_error(h.m) <= HERMITIAN_TOL:
        eigenvalues, eigenvectors = linalg.eigh(h.m)
        result = (eigenvectors * np.exp(scale * eigenvalues)) @ eigenvectors.conj().T
        return Operator(result, unitary=scale.real == 0.0)

    return Operator(linalg.expm(scale * h.m))


def series_exponential(h, scale, terms=30):
    """Scaling-and-squaring Taylor exponential.

    Independent of `matrix_exponential` and used to cross-check it.

    Args:
        h (Operator): Generator.
        scale (complex): Scalar prefactor.
        terms (int): Number of Taylor terms after scaling.

    Returns:
        Operator: ``exp(scale * h)``.
    """
    a = complex(scale) * h.m
    norm = np.linalg.norm(a, 1)
    squarings = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    a = a / 2 ** squarings

    result = np.eye(h.dim, dtype=complex)
    term = np.eye(h.dim, dtype=complex)
    for k in range(1, terms + 1):
        term = term @ a / k
        result = result + term
    for _ in range(squarings):
        result = result @ result
    return Operator(result)


def _matched(a, b):
    dim = max(a.dim, b.dim)
    return a.embed(dim).amp, b.embed(dim).amp


def overlap(a, b):
    """Inner product ``<a|b>`` after zero-padding to the larger dimension."""
    amp_a, amp_b = _matched(a, b)
    return complex(np.vdot(amp_a, amp_b))


def fidelity(a, b):
    """Returns ``|<a|b>|^2`` for the normalized states, in [0, 1].

    States of different dimension are compared by zero-padding the smaller one.
    The result does not depend on the global phase of either state.

    Raises:
        InvalidStateError: If either state has zero norm.
    """
    if a.norm == 0.0 or b.norm == 0.0:
        raise InvalidStateError("Fidelity is undefined for zero-norm states.")
    value = abs(overlap(a, b)) ** 2 / (a.norm ** 2 * b.norm ** 2)
    return float(min(1.0, max(0.0, value)))


def probabilities(state):
    """Returns the occupation probabilities ``|C_n|^2`` per level."""
    return np.abs(state.amp) ** 2

"""Dense linear algebra for one and two qubits.

Operators are plain ``complex128`` numpy arrays of shape (2, 2) or (4, 4);
pure states are 1-D arrays of length 2 or 4. The two-qubit basis is ordered
|S A> = |00>, |01>, |10>, |11>, with the interferometer system S as the left
(slow) tensor factor and the ancilla A as the right (fast) one.
"""
import numpy as np

from ._kernels import jacobi_eigvals
from .errors import InvalidArgumentError

HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-12

_SQRT1_2 = 1.0 / np.sqrt(2.0)


def _frozen(m):
    m = np.asarray(m, dtype=np.complex128)
    m.setflags(write=False)
    return m


HADAMARD = _frozen([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]])
PAULI_X = _frozen([[0, 1], [1, 0]])
PAULI_Y = _frozen([[0, -1j], [1j, 0]])
PAULI_Z = _frozen([[1, 0], [0, -1]])
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)

KET0 = _frozen([1, 0])
KET1 = _frozen([0, 1])


def _check_square(m, name="operator"):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in (2, 4):
        raise InvalidArgumentError(f"{name} must be 2x2 or 4x4, got shape {m.shape}")
    return m


def is_hermitian(m, tol=HERMITIAN_TOL):
    m = np.asarray(m)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def is_psd(m, tol=HERMITIAN_TOL):
    """Cheap PSD test: ``m + tol * I`` admits a Cholesky factorisation."""
    m = np.asarray(m)
    try:
        np.linalg.cholesky(0.5 * (m + m.conj().T) + tol * np.eye(m.shape[0]))
    except np.linalg.LinAlgError:
        return False
    return True


def is_unitary(u, tol=UNITARY_TOL):
    u = np.asarray(u)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) < tol)


def make_gate(kind, phi=None, dim=2):
    """Build one of the circuit's gates.

    Parameters
    ----------
    kind : {"hadamard", "phase", "controlled_hadamard", "identity"}
    phi : float, optional
        Phase in radians; required for ``"phase"``. The phase is applied to
        |1>_S (path a).
    dim : int
        Dimension for ``"identity"`` (2 or 4).
    """
    if kind == "hadamard":
        return HADAMARD.copy()
    if kind == "phase":
        if phi is None or not np.isfinite(phi):
            raise InvalidArgumentError("phase gate needs a finite phi")
        return np.diag([1.0, np.exp(1j * phi)]).astype(np.complex128)
    if kind == "controlled_hadamard":
        # H on S exactly when A = 1: basis rows |00>,|01>,|10>,|11>
        g = np.zeros((4, 4), dtype=np.complex128)
        g[0, 0] = g[2, 2] = 1.0
        g[1, 1] = g[1, 3] = g[3, 1] = _SQRT1_2
        g[3, 3] = -_SQRT1_2
        return g
    if kind == "identity":
        if dim not in (2, 4):
            raise InvalidArgumentError(f"identity dim must be 2 or 4, got {dim}")
        return np.eye(dim, dtype=np.complex128)
    raise InvalidArgumentError(f"unknown gate kind {kind!r}")


def tensor_product(left, right):
    """Kronecker product ``left (S) ⊗ right (A)`` of two single-qubit objects.

    Works for 2x2 operators and for length-2 state vectors.
    """
    left = np.asarray(left)
    right = np.asarray(right)
    if left.shape != right.shape or left.shape not in ((2,), (2, 2)):
        raise InvalidArgumentError(
            f"tensor_product needs two dim-2 operands, got {left.shape} and {right.shape}"
        )
    return np.kron(left, right).astype(np.complex128)


def density(psi):
    psi = np.asarray(psi, dtype=np.complex128)
    return np.outer(psi, psi.conj())


def evolve_density(u, rho):
    """Return ``U rho U^dagger``."""
    u = _check_square(u, "U")
    rho = _check_square(rho, "rho")
    if u.shape != rho.shape:
        raise InvalidArgumentError(f"dimension mismatch: U {u.shape} vs rho {rho.shape}")
    return u @ rho @ u.conj().T


def partial_transpose(rho, subsystem="A"):
    """Transpose the 4x4 two-qubit operator on one tensor factor only."""
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise InvalidArgumentError(f"partial_transpose needs a 4x4 operator, got {rho.shape}")
    t = rho.reshape(2, 2, 2, 2)  # indices (s, a, s', a')
    if subsystem == "A":
        t = t.transpose(0, 3, 2, 1)
    elif subsystem == "S":
        t = t.transpose(2, 1, 0, 3)
    else:
        raise InvalidArgumentError(f"subsystem must be 'S' or 'A', got {subsystem!r}")
    return t.reshape(4, 4).copy()


def eigenvalues_hermitian(m):
    """Ascending real eigenvalues of a 2x2 or 4x4 hermitian matrix.

    Uses cyclic Jacobi rotations on the real symmetric embedding
    ``[[Re, -Im], [Im, Re]]``, whose spectrum is that of ``m`` with every
    eigenvalue doubled; every second sorted value is kept.
    """
    m = _check_square(m, "matrix")
    if not is_hermitian(m):
        raise InvalidArgumentError("eigenvalues_hermitian needs a hermitian matrix")
    re = m.real.astype(np.float64)
    im = m.imag.astype(np.float64)
    embedded = np.block([[re, -im], [im, re]])
    embedded = 0.5 * (embedded + embedded.T)
    return jacobi_eigvals(embedded)[::2].copy()


def real_symmetric_eigenvalues(m):
    """Ascending eigenvalues of a small real symmetric matrix (any size)."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidArgumentError(f"need a square matrix, got {m.shape}")
    if np.max(np.abs(m - m.T), initial=0.0) > HERMITIAN_TOL:
        raise InvalidArgumentError("matrix is not symmetric")
    return jacobi_eigvals(0.5 * (m + m.T))

"""Dense complex linear algebra for 2x2 and 4x4 matrices.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The Hermitian
eigensolver is a cyclic complex Jacobi iteration (see ``_kernels``); the
unitary exponential is built from its spectral decomposition.
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import jacobi_eigh_batch
from .errors import NoConvergence, NotFinite, NotHermitian

REL_TOL = 1e-14
MAX_SWEEPS = 100
HERMITIAN_TOL = 1e-12

SIGMA = (
    np.eye(2, dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)
for _s in SIGMA:
    _s.flags.writeable = False


def as_matrix(m, dim: int = 4) -> np.ndarray:
    """Coerce ``m`` to a finite ``dim x dim`` complex array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NotFinite("matrix has non-finite entries")
    return arr


def kron(a, b) -> np.ndarray:
    """Kronecker product of two 2x2 matrices: ``out[2i+k, 2j+l] = a[i,j] * b[k,l]``."""
    a = as_matrix(a, 2)
    b = as_matrix(b, 2)
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(4, 4)


def dagger(m) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m - dagger(m))) <= tol)


def is_unitary(m, tol: float = 1e-12) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(dagger(m) @ m - np.eye(m.shape[-1]))) <= tol)


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # (4,), ascending
    eigenvectors: np.ndarray  # (4, 4), column k pairs with eigenvalues[k]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def eigh_batch(mats, check: bool = True):
    """Eigendecompose a stack ``(n, 4, 4)`` of Hermitian matrices.

    Returns ``(eigenvalues, eigenvectors)`` with shapes ``(n, 4)`` and
    ``(n, 4, 4)``.
    """
    mats = np.ascontiguousarray(mats, dtype=np.complex128)
    if mats.ndim != 3 or mats.shape[1:] != (4, 4):
        raise ValueError(f"expected shape (n, 4, 4), got {mats.shape}")
    if check:
        if not np.all(np.isfinite(mats)):
            raise NotFinite("matrix has non-finite entries")
        defect = np.max(np.abs(mats - dagger(mats)), initial=0.0)
        if defect > HERMITIAN_TOL:
            raise NotHermitian(f"max |M - M^dagger| = {defect:.3e} exceeds {HERMITIAN_TOL:g}")
    w, v, _, converged = jacobi_eigh_batch(mats, REL_TOL, MAX_SWEEPS)
    if not converged.all():
        bad = int(np.flatnonzero(~converged)[0])
        raise NoConvergence(f"Jacobi iteration exceeded {MAX_SWEEPS} sweeps (batch index {bad})")
    return w, v


def eigvalsh_batch(mats, check: bool = True) -> np.ndarray:
    return eigh_batch(mats, check=check)[0]


def hermitian_eigen(m) -> EigenDecomposition:
    m = as_matrix(m)
    w, v = eigh_batch(m[None])
    return EigenDecomposition(w[0], v[0])


def propagators(h, times, sign: int = -1) -> np.ndarray:
    """``exp(sign * i * h * t)`` for every ``t`` in ``times``; shape ``(len(times), 4, 4)``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    dec = hermitian_eigen(h)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    phases = np.exp(sign * 1j * np.outer(times, dec.eigenvalues))
    v = dec.eigenvectors
    out = np.einsum("ik,tk,jk->tij", v, phases, np.conj(v))
    out[times == 0.0] = np.eye(4)
    return out


def exp_unitary(h, t: float, sign: int = -1) -> np.ndarray:
    """Return ``exp(sign * i * h * t)`` for Hermitian ``h``."""
    return propagators(h, [t], sign)[0]

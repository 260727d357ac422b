"""Small dense complex linear algebra for qubit and two-qubit matrices.

Everything here works on numpy arrays of shape (2, 2) or (4, 4).  The
two-qubit basis order is |00>, |01>, |10>, |11> with subsystem A as the
slow index, which is what :func:`numpy.kron` produces.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NonHermitian, NotPSD

HERMITIAN_TOL = 1e-10
PSD_CLAMP = -1e-10
JACOBI_OFF_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100

PAULI_LABELS = ("0", "x", "y", "z")
SIGMA = {
    "0": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class Spectrum(NamedTuple):
    """Ascending eigenvalues with matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_square(m, sizes=(1, 2, 4)) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in sizes:
        raise DimensionMismatch(f"expected a square matrix of size {sizes}, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def hermiticity_residual(m) -> float:
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    # largest-magnitude component of each column made real-positive
    idx = np.argmax(np.abs(vecs), axis=0)
    pivots = vecs[idx, np.arange(vecs.shape[1])]
    return vecs * (np.abs(pivots) / pivots)


def hermitian_eig(h, tol: float = HERMITIAN_TOL) -> Spectrum:
    """Diagonalize a small Hermitian matrix with cyclic complex Jacobi rotations.

    Each rotation first removes the phase of the pivot entry with a diagonal
    unitary and then applies a real Givens rotation.  Sweeps continue until the
    off-diagonal Frobenius norm drops below ``1e-12`` (relative to the matrix
    norm when that exceeds one).
    """
    h = _as_square(h)
    res = hermiticity_residual(h)
    if res > tol:
        raise NonHermitian(f"matrix is not Hermitian (max |H - H^dagger| = {res:.3e})", res)
    n = h.shape[0]
    a = 0.5 * (h + h.conj().T)
    v = np.eye(n, dtype=complex)
    target = JACOBI_OFF_TOL * max(1.0, float(np.linalg.norm(a)))
    offdiag = ~np.eye(n, dtype=bool)

    for _ in range(JACOBI_MAX_SWEEPS + 1):
        off = np.sqrt(np.sum(np.abs(a[offdiag]) ** 2))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                g = np.eye(n, dtype=complex)
                g[p, p] = c
                g[p, q] = s
                g[q, p] = -s * np.conj(phase)
                g[q, q] = c * np.conj(phase)
                a = g.conj().T @ a @ g
                v = v @ g
    else:
        raise NoConvergence(f"Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps")

    w = np.real(np.diag(a)).copy()
    order = np.argsort(w, kind="stable")
    return Spectrum(w[order], _fix_phases(v[:, order]))


def psd_sqrt(h) -> np.ndarray:
    """Principal square root of a Hermitian positive semidefinite matrix.

    Eigenvalues in ``[-1e-10, 0)`` are treated as zero; anything more negative
    raises :class:`NotPSD`.  Eigenvalues below the rounding floor
    ``n * eps * max|lambda|`` are also zeroed, otherwise a noise value of 1e-17
    would become a 3e-9 entry of the root.
    """
    w, v = hermitian_eig(h)
    if w[0] < PSD_CLAMP:
        raise NotPSD(f"matrix has a negative eigenvalue {w[0]:.3e}", -w[0])
    floor = len(w) * np.finfo(float).eps * max(1.0, float(np.max(np.abs(w))))
    root = np.sqrt(np.where(w <= floor, 0.0, w))
    s = (v * root) @ v.conj().T
    return 0.5 * (s + s.conj().T)


def kron(a, b) -> np.ndarray:
    a = _as_square(a, sizes=(2,))
    b = _as_square(b, sizes=(2,))
    return np.kron(a, b)


def partial_trace(m, keep: str = "A") -> np.ndarray:
    """Reduced 2x2 matrix of subsystem ``keep`` ('A' or 'B') of a 4x4 matrix."""
    m = _as_square(m, sizes=(4,)).reshape(2, 2, 2, 2)
    if keep == "A":
        return np.einsum("ijkj->ik", m)
    if keep == "B":
        return np.einsum("ijil->jl", m)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


@dataclass(frozen=True)
class PauliCoefficients:
    """Real table ``a[i, j] = Tr((sigma_i x sigma_j) M)`` with i, j in 0, x, y, z.

    Index with a two-letter label, e.g. ``coeffs['zx']``.
    """

    table: np.ndarray

    def __getitem__(self, key: str) -> float:
        i, j = key
        return float(self.table[PAULI_LABELS.index(i), PAULI_LABELS.index(j)])

    @property
    def local_a(self) -> np.ndarray:
        """(a_x0, a_y0, a_z0)"""
        return self.table[1:, 0]

    @property
    def local_b(self) -> np.ndarray:
        """(a_0x, a_0y, a_0z)"""
        return self.table[0, 1:]

    @property
    def correlation(self) -> np.ndarray:
        """3x3 block a_ij for i, j in x, y, z."""
        return self.table[1:, 1:]


PAULI_PRODUCTS = np.array(
    [[np.kron(SIGMA[i], SIGMA[j]) for j in PAULI_LABELS] for i in PAULI_LABELS]
)


def pauli_coeffs(m) -> PauliCoefficients:
    m = _as_square(m, sizes=(4,))
    res = hermiticity_residual(m)
    if res > HERMITIAN_TOL:
        raise NonHermitian(f"matrix is not Hermitian (max |M - M^dagger| = {res:.3e})", res)
    # Tr(P M) = sum_kl P_kl M_lk
    raw = np.einsum("ijkl,lk->ij", PAULI_PRODUCTS, m)
    imag = float(np.max(np.abs(raw.imag)))
    if imag > HERMITIAN_TOL * max(1.0, float(np.max(np.abs(m)))) * 4:
        raise NonHermitian(f"Pauli coefficients have imaginary residue {imag:.3e}", imag)
    return PauliCoefficients(raw.real.copy())

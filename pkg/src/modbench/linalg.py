"""Dense complex matrix kernel.

Hermitian eigendecomposition by cyclic Jacobi sweeps, operator norms,
scalar functional calculus, and realification of complex spaces so that
real-linear (in particular antilinear) operators can be stored as plain
real matrices over (Re, Im)-stacked coordinates.

Matrices are numpy arrays; complex scalars are pairs of 64-bit floats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoConvergence, NotHermitian

HERMITICITY_TOL = 1e-10
JACOBI_OFF_TOL = 1e-13  # times ||a||_F, per sweep termination
JACOBI_MAX_SWEEPS = 100
CLUSTER_TOL = 1e-9  # eigenvalue clustering threshold, times (1 + |lambda|)


def as_cmatrix(a) -> np.ndarray:
    """Coerce to a finite 2-d complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError("matrix has non-finite entries")
    return m


@dataclass(frozen=True)
class HermEig:
    """Eigendecomposition of a Hermitian matrix.

    eigenvalues are ascending; basis columns are the matching eigenvectors
    and form a unitary matrix.
    """

    eigenvalues: np.ndarray
    basis: np.ndarray

    def function(self, f) -> np.ndarray:
        """Apply the scalar function f eigenvalue-wise; see mat_func."""
        vals = _apply_scalar(self.eigenvalues, f)
        return (self.basis * vals) @ self.basis.conj().T


def _apply_scalar(eigenvalues: np.ndarray, f) -> np.ndarray:
    vals = np.empty(len(eigenvalues), dtype=complex)
    for i, lam in enumerate(eigenvalues):
        try:
            v = complex(f(lam))
        except (ValueError, ZeroDivisionError, OverflowError, FloatingPointError) as exc:
            raise DomainError(f"scalar function undefined at eigenvalue {lam}") from exc
        if not (np.isfinite(v.real) and np.isfinite(v.imag)):
            raise DomainError(f"scalar function non-finite at eigenvalue {lam}")
        vals[i] = v
    return vals


def herm_eig(a, max_sweeps: int = JACOBI_MAX_SWEEPS) -> HermEig:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Raises NotHermitian if the symmetry defect exceeds 1e-10 relative to
    the Frobenius norm, and NoConvergence past the sweep budget.
    """
    m = as_cmatrix(a)
    n = m.shape[0]
    if m.shape[0] != m.shape[1]:
        raise NotHermitian("matrix is not square")
    fro = np.linalg.norm(m)
    if np.linalg.norm(m - m.conj().T) > HERMITICITY_TOL * max(fro, 1e-300):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    m = (m + m.conj().T) / 2.0

    v = np.eye(n, dtype=complex)
    if n == 1 or fro == 0.0:
        w = m.diagonal().real.copy()
        order = np.argsort(w, kind="stable")
        return HermEig(w[order], v[:, order])

    off_tol = JACOBI_OFF_TOL * fro
    elem_tol = off_tol / n
    for _ in range(max_sweeps):
        strict = m - np.diag(m.diagonal())
        off = np.linalg.norm(strict)
        if off <= off_tol:
            break
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                r = abs(apq)
                if r <= elem_tol:
                    continue
                rotated = True
                u = apq / r
                tau = (m[q, q].real - m[p, p].real) / (2.0 * r)
                sign = 1.0 if tau >= 0.0 else -1.0
                t = sign / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # unitary on the (p,q) plane: [[c, s], [-s*conj(u), c*conj(u)]]
                colp = m[:, p].copy()
                colq = m[:, q].copy()
                m[:, p] = c * colp - s * np.conj(u) * colq
                m[:, q] = s * colp + c * np.conj(u) * colq
                rowp = m[p, :].copy()
                rowq = m[q, :].copy()
                m[p, :] = c * rowp - s * u * rowq
                m[q, :] = s * rowp + c * u * rowq
                m[p, q] = 0.0
                m[q, p] = 0.0
                m[p, p] = m[p, p].real
                m[q, q] = m[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * np.conj(u) * vq
                v[:, q] = s * vp + c * np.conj(u) * vq
        if not rotated:
            break
    else:
        raise NoConvergence(f"Jacobi sweeps exhausted at off-norm {off:.3e}")

    w = m.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return HermEig(w[order], v[:, order])


def op_norm(a) -> float:
    """Largest singular value, via the top eigenvalue of a^* a."""
    m = as_cmatrix(a)
    if not m.size or not np.any(m):
        return 0.0
    gram = m.conj().T @ m
    top = herm_eig(gram).eigenvalues[-1]
    return float(np.sqrt(max(top, 0.0)))


def mat_func(a, f) -> np.ndarray:
    """f(a) for Hermitian a by functional calculus on the eigenvalues."""
    return herm_eig(a).function(f)


def cluster_eigenvalues(eigenvalues: np.ndarray) -> list[list[int]]:
    """Group sorted eigenvalues into clusters of numerically equal values."""
    groups: list[list[int]] = []
    for i, lam in enumerate(eigenvalues):
        if groups and abs(lam - eigenvalues[groups[-1][0]]) <= CLUSTER_TOL * (1 + abs(lam)):
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


# ---------------------------------------------------------------------------
# realification


def realify_vector(v: np.ndarray) -> np.ndarray:
    """Complex vector -> stacked (Re, Im) real vector of twice the length."""
    v = np.asarray(v, dtype=complex).ravel()
    return np.concatenate([v.real, v.imag])


def complexify_vector(w: np.ndarray) -> np.ndarray:
    """Inverse of realify_vector."""
    w = np.asarray(w, dtype=float).ravel()
    n = w.size // 2
    return w[:n] + 1j * w[n:]


def realify_matrix(m: np.ndarray) -> np.ndarray:
    """Complex-linear matrix X + iY as the real block matrix [[X, -Y], [Y, X]]."""
    m = as_cmatrix(m)
    x, y = m.real, m.imag
    return np.block([[x, -y], [y, x]])


def mult_by_i(n: int) -> np.ndarray:
    """Realified form of multiplication by i on an n-dimensional complex space."""
    eye = np.eye(n)
    z = np.zeros((n, n))
    return np.block([[z, -eye], [eye, z]])


@dataclass(frozen=True)
class RealLinearOperator:
    """Real-linear map on a realified complex space, as a 2N x 2N real matrix."""

    matrix: np.ndarray

    @property
    def dim(self) -> int:
        """Complex dimension N of the underlying space."""
        return self.matrix.shape[0] // 2

    @classmethod
    def identity(cls, n: int) -> "RealLinearOperator":
        return cls(np.eye(2 * n))

    @classmethod
    def from_complex_matrix(cls, m) -> "RealLinearOperator":
        return cls(realify_matrix(m))

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Apply to a complex vector of length N."""
        return complexify_vector(self.matrix @ realify_vector(v))

    def compose(self, other: "RealLinearOperator") -> "RealLinearOperator":
        return RealLinearOperator(self.matrix @ other.matrix)

    def __matmul__(self, other: "RealLinearOperator") -> "RealLinearOperator":
        return self.compose(other)

    def transpose(self) -> "RealLinearOperator":
        return RealLinearOperator(self.matrix.T)

    def norm(self) -> float:
        """Operator norm over the realified coordinates."""
        gram = self.matrix.T @ self.matrix
        top = herm_eig(gram).eigenvalues[-1]
        return float(np.sqrt(max(top, 0.0)))

    def linearity_defects(self) -> tuple[float, float]:
        """Norms of the commutator and anticommutator with multiplication by i.

        A complex-linear operator has vanishing commutator, an antilinear one
        a vanishing anticommutator; both are scaled by the operator norm.
        """
        mi = mult_by_i(self.dim)
        scale = max(np.linalg.norm(self.matrix), 1e-300)
        comm = np.linalg.norm(mi @ self.matrix - self.matrix @ mi) / scale
        anti = np.linalg.norm(mi @ self.matrix + self.matrix @ mi) / scale
        return float(comm), float(anti)

    def is_complex_linear(self, tol: float = 1e-9) -> bool:
        return self.linearity_defects()[0] <= tol

    def is_antilinear(self, tol: float = 1e-9) -> bool:
        return self.linearity_defects()[1] <= tol

    def complex_form(self, tol: float = 1e-9) -> np.ndarray:
        """Extract the N x N complex matrix of a complex-linear operator."""
        if not self.is_complex_linear(tol):
            raise ValueError("operator is not complex-linear within tolerance")
        n = self.dim
        x = (self.matrix[:n, :n] + self.matrix[n:, n:]) / 2.0
        y = (self.matrix[n:, :n] - self.matrix[:n, n:]) / 2.0
        return x + 1j * y


def real_sym_eig(m: np.ndarray, max_sweeps: int = JACOBI_MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a real symmetric matrix; returns (values, real basis)."""
    eig = herm_eig(np.asarray(m, dtype=float), max_sweeps=max_sweeps)
    basis = eig.basis
    if np.max(np.abs(basis.imag)) > 1e-12:
        raise NotHermitian("real symmetric input produced complex eigenvectors")
    return eig.eigenvalues, basis.real.copy()


def real_polar(theta: RealLinearOperator) -> tuple[RealLinearOperator, RealLinearOperator]:
    """Polar decomposition theta = j t of a real-linear operator.

    t = (theta^T theta)^{1/2} is symmetric positive semidefinite and j is a
    real partial isometry (orthogonal whenever theta is injective).
    """
    m = theta.matrix
    w, v = real_sym_eig(m.T @ m)
    w = np.maximum(w, 0.0)
    sv = np.sqrt(w)
    t = (v * sv) @ v.T
    rank_tol = max(sv[-1], 0.0) * 1e-12
    inv = np.where(sv > rank_tol, np.divide(1.0, sv, out=np.zeros_like(sv), where=sv > 0), 0.0)
    j = m @ (v * inv) @ v.T
    return RealLinearOperator(j), RealLinearOperator(t)

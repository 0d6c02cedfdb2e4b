"""Bounded route to modular theory after Rieffel and Van Daele.

P is the real-orthogonal projection onto K = M_sa.omega, built by real
Gram-Schmidt over an explicit Hermitian basis; Q is conjugated from P by
multiplication by i; R = P + Q, Theta = P - Q with real polar factors.
Nothing here touches the spectral route or the rho-conjugation closed
forms, so agreement between the two routes is a genuine cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .linalg import RealLinearOperator
from .space import (
    AlgebraElement,
    GnsVector,
    WStarSpace,
    gns_embed,
    gns_unembed,
    right_norm,
    total_bound,
)


def hermitian_basis(space: WStarSpace) -> list[AlgebraElement]:
    """A real basis of the self-adjoint part of the algebra."""
    out = []
    for bi, n in enumerate(space.blocks):
        def unit(mat):
            data = [np.zeros((k, k), dtype=complex) for k in space.blocks]
            data[bi] = mat
            return AlgebraElement(space, tuple(data))

        for i in range(n):
            m = np.zeros((n, n), dtype=complex)
            m[i, i] = 1.0
            out.append(unit(m))
        for i in range(n):
            for j in range(i + 1, n):
                m = np.zeros((n, n), dtype=complex)
                m[i, j] = 1.0
                m[j, i] = 1.0
                out.append(unit(m))
                m = np.zeros((n, n), dtype=complex)
                m[i, j] = 1j
                m[j, i] = -1j
                out.append(unit(m))
    return out


def _gram_schmidt(columns: np.ndarray) -> np.ndarray:
    """Orthonormalize columns in the real inner product, with one re-pass."""
    q = np.array(columns, dtype=float)
    n = q.shape[1]
    for i in range(n):
        v = q[:, i]
        for _ in range(2):  # second pass controls cancellation
            for j in range(i):
                v = v - (q[:, j] @ v) * q[:, j]
        nrm = np.linalg.norm(v)
        if nrm < 1e-12:
            raise ValueError("Hermitian basis is degenerate; omega not separating?")
        q[:, i] = v / nrm
    return q


@dataclass(frozen=True)
class RvdData:
    """The bounded-route operators for one space."""

    space: WStarSpace
    p: RealLinearOperator
    q: RealLinearOperator
    r: RealLinearOperator
    theta: RealLinearOperator
    j_rvd: RealLinearOperator
    t_rvd: RealLinearOperator
    r_eig: linalg.HermEig

    def r_function_matrix(self, f) -> np.ndarray:
        """f(R) as a complex matrix over the flattened GNS coordinates."""
        return self.r_eig.function(f)

    def delta_matrix(self) -> np.ndarray:
        """Delta = R^{-1}(2 - R) from the bounded route only."""
        return self.r_function_matrix(lambda r: (2.0 - r) / r)


def build_rvd(space: WStarSpace) -> RvdData:
    """Assemble P, Q, R, Theta and the polar factors of Theta."""
    basis = hermitian_basis(space)
    cols = np.column_stack(
        [linalg.realify_vector(space.flatten(gns_embed(h).data)) for h in basis]
    )
    q_basis = _gram_schmidt(cols)
    p_mat = q_basis @ q_basis.T
    mi = linalg.mult_by_i(space.dim)
    q_mat = mi @ p_mat @ mi.T
    p = RealLinearOperator(p_mat)
    q = RealLinearOperator(q_mat)
    r = RealLinearOperator(p_mat + q_mat)
    theta = RealLinearOperator(p_mat - q_mat)
    j_rvd, t_rvd = linalg.real_polar(theta)
    r_eig = linalg.herm_eig(r.complex_form())
    return RvdData(space, p, q, r, theta, j_rvd, t_rvd, r_eig)


_RVD_CACHE_KEY = "rvd"


def get_rvd(space: WStarSpace) -> RvdData:
    """Per-space cached RvdData (spaces are immutable)."""
    if _RVD_CACHE_KEY not in space._caches:
        space._caches[_RVD_CACHE_KEY] = build_rvd(space)
    return space._caches[_RVD_CACHE_KEY]


def delta_it_rvd(rvd: RvdData, t: float, xi: GnsVector) -> GnsVector:
    """Delta^{it} xi via (2-R)^{it} R^{-it}, functional calculus on R."""
    mat = rvd.r_function_matrix(lambda r: (2.0 - r) ** (1j * t) * r ** (-1j * t))
    return GnsVector.from_flat(rvd.space, mat @ xi.flat())


def delta_it_rvd_matrix(rvd: RvdData, t: float) -> np.ndarray:
    """The unitary Delta^{it} of the bounded route as a complex matrix."""
    return rvd.r_function_matrix(lambda r: (2.0 - r) ** (1j * t) * r ** (-1j * t))


# ---------------------------------------------------------------------------
# commutant helpers (right multiplications; Lemma boundedlemma makes these
# the faithful finite-dimensional commutant model)


class CommutantElement:
    """Right multiplication xi -> xi.c, an element of M'."""

    __slots__ = ("space", "data")

    def __init__(self, space: WStarSpace, data):
        self.space = space
        self.data = tuple(data)

    def omega_vector(self) -> GnsVector:
        return GnsVector(self.space, tuple(s @ c for s, c in zip(self.space.rho_sqrt, self.data)))

    def apply(self, xi: GnsVector) -> GnsVector:
        return GnsVector(self.space, tuple(b @ c for b, c in zip(xi.data, self.data)))

    def star(self) -> "CommutantElement":
        return CommutantElement(self.space, tuple(c.conj().T for c in self.data))

    def op_norm(self) -> float:
        return max(linalg.op_norm(c) for c in self.data)

    def right_norm(self) -> float:
        """Norm of the mirrored realization a.omega -> a.(c omega)."""
        return max(
            linalg.op_norm(s @ c @ isq)
            for s, c, isq in zip(self.space.rho_sqrt, self.data, self.space.rho_isqrt)
        )


def commutant_from_vector(v: GnsVector) -> CommutantElement:
    """The unique c in M' with c.omega = v."""
    return CommutantElement(v.space, tuple(isq @ b for isq, b in zip(v.space.rho_isqrt, v.data)))


def sample_commutant(space: WStarSpace, seed: int) -> CommutantElement:
    rng = np.random.default_rng(seed)
    data = []
    for k in space.blocks:
        re = rng.standard_normal((k, k))
        im = rng.standard_normal((k, k))
        data.append((re + 1j * im) / np.sqrt(2.0))
    return CommutantElement(space, tuple(data))


# ---------------------------------------------------------------------------
# witnesses and identity checks


@dataclass(frozen=True)
class PWitnessCertificate:
    op_norm_b: float
    right_norm_b: float
    total_bound_b: float
    op_norm_x: float
    right_norm_x: float
    total_bound_x: float
    selfadjoint_defect: float

    @property
    def op_bound(self) -> float:
        """||b|| <= 2 ||x||_right."""
        return 2.0 * self.right_norm_x

    @property
    def right_bound(self) -> float:
        """||b||_right <= ||x||_right + 2 ||x||."""
        return self.right_norm_x + 2.0 * self.op_norm_x

    @property
    def total_bound_bound(self) -> float:
        """b lands in S_{3K} for x in S_K."""
        return 3.0 * self.total_bound_x

    def ok(self, rtol: float = 1e-9) -> bool:
        slack = 1.0 + rtol
        return (
            self.op_norm_b <= self.op_bound * slack + rtol
            and self.right_norm_b <= self.right_bound * slack + rtol
            and self.total_bound_b <= self.total_bound_bound * slack + rtol
        )


def p_witness(rvd: RvdData, x: AlgebraElement) -> tuple[AlgebraElement, PWitnessCertificate]:
    """The unique self-adjoint b with b.omega = P(x.omega), with norm bounds."""
    space = rvd.space
    xi = linalg.realify_vector(space.flatten(gns_embed(x).data))
    proj = linalg.complexify_vector(rvd.p.matrix @ xi)
    b = gns_unembed(GnsVector.from_flat(space, proj))
    sa_defect = max(float(np.max(np.abs(m - m.conj().T))) for m in b.data)
    cert = PWitnessCertificate(
        op_norm_b=b.op_norm(),
        right_norm_b=right_norm(b),
        total_bound_b=total_bound(b),
        op_norm_x=x.op_norm(),
        right_norm_x=right_norm(x),
        total_bound_x=total_bound(x),
        selfadjoint_defect=sa_defect,
    )
    return b, cert


@dataclass(frozen=True)
class ThetaReport:
    algebra_identity_defect: float  # Theta x.omega = (2-R) x*.omega
    commutant_identity_defect: float  # Theta x'.omega = R x'*.omega
    roundtrip_defect: float  # adjoint consistency of the Theta exchange

    def max_defect(self) -> float:
        return max(
            self.algebra_identity_defect,
            self.commutant_identity_defect,
            self.roundtrip_defect,
        )


def theta_identities_check(
    rvd: RvdData, samples: int = 20, seed: int = 0, corrupt_r_identity: bool = False
) -> ThetaReport:
    """Check the Theta exchange identities on random algebra/commutant elements.

    With corrupt_r_identity the operator R in the identities is replaced by
    the identity, which must produce a visible defect on non-tracial spaces
    (negative control for the defect detectors).
    """
    space = rvd.space
    theta = rvd.theta.matrix
    r_mat = np.eye(2 * space.dim) if corrupt_r_identity else rvd.r.matrix
    two_minus_r = 2.0 * np.eye(2 * space.dim) - r_mat

    def real_flat(v: GnsVector) -> np.ndarray:
        return linalg.realify_vector(space.flatten(v.data))

    d_alg = 0.0
    d_comm = 0.0
    d_round = 0.0
    from .space import sample_sort

    for k in range(samples):
        x = sample_sort(space, 2, seed=1000 * seed + 2 * k)
        lhs = theta @ real_flat(gns_embed(x))
        rhs = two_minus_r @ real_flat(gns_embed(x.star()))
        d_alg = max(d_alg, float(np.linalg.norm(lhs - rhs)) / max(1.0, gns_embed(x).norm()))

        c = sample_commutant(space, seed=1000 * seed + 2 * k + 1)
        lhs = theta @ real_flat(c.omega_vector())
        rhs = r_mat @ real_flat(c.star().omega_vector())
        d_comm = max(d_comm, float(np.linalg.norm(lhs - rhs)) / max(1.0, c.omega_vector().norm()))

        # Theta maps commutant vectors to algebra vectors compatibly with adjoints
        v = GnsVector.from_flat(space, linalg.complexify_vector(theta @ real_flat(c.omega_vector())))
        w = GnsVector.from_flat(space, linalg.complexify_vector(theta @ real_flat(c.star().omega_vector())))
        m1 = gns_unembed(v)
        m2 = gns_unembed(w)
        diff = m2 - m1.star()
        d_round = max(d_round, max(float(np.max(np.abs(b))) for b in diff.data))

    return ThetaReport(d_alg, d_comm, d_round)

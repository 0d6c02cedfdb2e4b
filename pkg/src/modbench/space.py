"""Finite-dimensional W*-probability spaces.

A space is a finite direct sum of complex matrix blocks together with a
faithful state given by a block-diagonal positive-definite density of unit
trace.  The GNS Hilbert space is realized in the weighted Hilbert-Schmidt
model: the element x embeds as x . rho^{1/2}, so the cyclic vector omega is
rho^{1/2} itself.  That identification is fixed here once and shared by all
other modules; rho-conjugation closed forms for the modular data are *not*
exposed by this module and live only in test oracles.
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .errors import NotPositive, TraceError

EPS_FAITH = 1e-10
TRACE_TOL = 1e-8
SORT_SLACK = 1e-9  # multiplicative membership tolerance for the sorts S_n


class WStarSpace:
    """Block matrix algebra with a faithful state; immutable after build."""

    def __init__(self, blocks, rho_blocks, rho_eigs):
        self.blocks = tuple(int(n) for n in blocks)
        self.rho = tuple(rho_blocks)
        self.rho_eigs = tuple(rho_eigs)
        self.rho_sqrt = tuple(e.function(np.sqrt).astype(complex) for e in rho_eigs)
        self.rho_isqrt = tuple(e.function(lambda t: 1.0 / np.sqrt(t)).astype(complex) for e in rho_eigs)
        self.dim = int(sum(n * n for n in self.blocks))
        offs = []
        pos = 0
        for n in self.blocks:
            offs.append(pos)
            pos += n * n
        self._offsets = tuple(offs)
        self._caches: dict = {}

    # -- constructors ------------------------------------------------------

    @property
    def is_tracial(self) -> bool:
        tr = self.dim_total
        return all(
            np.allclose(rb, np.eye(n) / tr, atol=1e-12) for n, rb in zip(self.blocks, self.rho)
        )

    @property
    def dim_total(self) -> int:
        """Total matrix dimension (sum of block sizes)."""
        return sum(self.blocks)

    def identity(self) -> "AlgebraElement":
        return AlgebraElement(self, tuple(np.eye(n, dtype=complex) for n in self.blocks))

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, tuple(np.zeros((n, n), dtype=complex) for n in self.blocks))

    def element(self, *block_data) -> "AlgebraElement":
        if len(block_data) == 1 and len(self.blocks) != 1:
            block_data = tuple(block_data[0])
        mats = tuple(linalg.as_cmatrix(b) for b in block_data)
        if tuple(m.shape[0] for m in mats) != self.blocks or any(m.shape[0] != m.shape[1] for m in mats):
            raise ValueError("block shapes do not match the space")
        return AlgebraElement(self, mats)

    @property
    def omega(self) -> "GnsVector":
        return GnsVector(self, self.rho_sqrt)

    # -- flattened GNS coordinates ----------------------------------------

    def flatten(self, blocks) -> np.ndarray:
        out = np.empty(self.dim, dtype=complex)
        for off, n, b in zip(self._offsets, self.blocks, blocks):
            out[off : off + n * n] = np.asarray(b, dtype=complex).ravel()
        return out

    def unflatten(self, flat: np.ndarray) -> tuple:
        return tuple(
            np.asarray(flat[off : off + n * n], dtype=complex).reshape(n, n)
            for off, n in zip(self._offsets, self.blocks)
        )

    def left_mult_matrix(self, x: "AlgebraElement") -> np.ndarray:
        """Matrix of pi(x): xi -> x.xi over the flattened GNS coordinates."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for off, n, b in zip(self._offsets, self.blocks, x.data):
            out[off : off + n * n, off : off + n * n] = np.kron(b, np.eye(n))
        return out

    def right_mult_flat_matrix(self, mats) -> np.ndarray:
        """Matrix of xi -> xi.b over the flattened GNS coordinates."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for off, n, b in zip(self._offsets, self.blocks, mats):
            out[off : off + n * n, off : off + n * n] = np.kron(np.eye(n), np.asarray(b).T)
        return out


def make_space(blocks, rho_blocks, normalize: bool = False) -> WStarSpace:
    """Validate and build a W*-probability space.

    Each rho block must be Hermitian positive definite with smallest
    eigenvalue at least the faithfulness floor 1e-10; traces must sum to 1
    within 1e-8 unless `normalize` rescales them.
    """
    blocks = tuple(int(n) for n in blocks)
    mats = [linalg.as_cmatrix(b).copy() for b in rho_blocks]
    if len(mats) != len(blocks) or any(m.shape != (n, n) for m, n in zip(mats, blocks)):
        raise ValueError("rho block shapes do not match the block pattern")
    total = sum(float(np.trace(m).real) for m in mats)
    if abs(total - 1.0) > TRACE_TOL and not normalize:
        raise TraceError(f"total trace {total} deviates from 1 beyond {TRACE_TOL}")
    if total <= 0:
        raise NotPositive("total trace is not positive")
    mats = [m / total for m in mats]
    eigs = []
    for m in mats:
        e = linalg.herm_eig(m)
        if e.eigenvalues[0] < EPS_FAITH:
            raise NotPositive(
                f"rho eigenvalue {e.eigenvalues[0]:.3e} below faithfulness floor {EPS_FAITH}"
            )
        eigs.append(e)
    return WStarSpace(blocks, tuple(mats), tuple(eigs))


class AlgebraElement:
    """Block-diagonal matrix in the algebra; norms are computed on demand."""

    __slots__ = ("space", "data", "_norms")

    def __init__(self, space: WStarSpace, data):
        self.space = space
        self.data = tuple(data)
        self._norms: dict = {}

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        return AlgebraElement(self.space, tuple(a + b for a, b in zip(self.data, other.data)))

    def __sub__(self, other):
        return AlgebraElement(self.space, tuple(a - b for a, b in zip(self.data, other.data)))

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return AlgebraElement(self.space, tuple(a @ b for a, b in zip(self.data, other.data)))
        return self.scale(other)

    def __rmul__(self, scalar):
        return self.scale(scalar)

    def __neg__(self):
        return self.scale(-1.0)

    def scale(self, scalar) -> "AlgebraElement":
        s = complex(scalar)
        return AlgebraElement(self.space, tuple(s * a for a in self.data))

    def star(self) -> "AlgebraElement":
        return AlgebraElement(self.space, tuple(a.conj().T for a in self.data))

    # norms ----------------------------------------------------------------

    def op_norm(self) -> float:
        if "op" not in self._norms:
            self._norms["op"] = max(linalg.op_norm(b) for b in self.data)
        return self._norms["op"]

    def is_selfadjoint(self, tol: float = 1e-9) -> bool:
        d = max(np.max(np.abs(a - a.conj().T)) for a in self.data)
        return d <= tol * max(1.0, max(np.max(np.abs(a)) for a in self.data))


def state(x: AlgebraElement) -> complex:
    """phi(x) = sum of tr(rho_b x_b)."""
    return complex(sum(np.trace(r @ b) for r, b in zip(x.space.rho, x.data)))


def gns_embed(x: AlgebraElement) -> "GnsVector":
    """x -> x.rho^{1/2}, the GNS image of x."""
    return GnsVector(x.space, tuple(b @ s for b, s in zip(x.data, x.space.rho_sqrt)))


def gns_unembed(v: "GnsVector") -> AlgebraElement:
    """The unique x with gns_embed(x) = v (omega is separating)."""
    return AlgebraElement(v.space, tuple(b @ s for b, s in zip(v.data, v.space.rho_isqrt)))


def phi_norm(x: AlgebraElement) -> float:
    """||x||_phi = sqrt(phi(x*x))."""
    if "phi" not in x._norms:
        sq = sum(
            float(np.linalg.norm(b @ s) ** 2) for b, s in zip(x.data, x.space.rho_sqrt)
        )
        x._norms["phi"] = float(np.sqrt(sq))
    return x._norms["phi"]


def sharp_norm(x: AlgebraElement) -> float:
    """||x||^#, the strong-* norm sqrt((||x||_phi^2 + ||x*||_phi^2)/2)."""
    a = phi_norm(x)
    b = phi_norm(x.star())
    return float(np.sqrt((a * a + b * b) / 2.0))


def right_mult_realization(x: AlgebraElement) -> tuple:
    """Per-block matrices B with bw -> b.x realized as xi -> xi.B."""
    return tuple(
        isq @ b @ sq for isq, b, sq in zip(x.space.rho_isqrt, x.data, x.space.rho_sqrt)
    )


def right_norm(x: AlgebraElement) -> float:
    """Norm of right multiplication by x on the GNS space."""
    if "right" not in x._norms:
        x._norms["right"] = max(linalg.op_norm(b) for b in right_mult_realization(x))
    return x._norms["right"]


def total_bound(x: AlgebraElement) -> float:
    """max of the operator norm and the right norms of x and x*."""
    if "total" not in x._norms:
        x._norms["total"] = max(x.op_norm(), right_norm(x), right_norm(x.star()))
    return x._norms["total"]


def in_sort(x: AlgebraElement, n: int) -> bool:
    """Membership in S_n, with multiplicative slack against roundoff."""
    return total_bound(x) <= n * (1.0 + SORT_SLACK)


def sample_sort(space: WStarSpace, n: int, seed: int) -> AlgebraElement:
    """Deterministic random element of S_n.

    Draws complex-Gaussian blocks and rescales by n/total_bound when the
    draw lands outside the sort; all three norms are homogeneous, so the
    rescaled element is in S_n exactly.
    """
    if n < 1:
        raise ValueError("sort index must be >= 1")
    rng = np.random.default_rng(seed)
    data = []
    for k in space.blocks:
        re = rng.standard_normal((k, k))
        im = rng.standard_normal((k, k))
        data.append((re + 1j * im) / np.sqrt(2.0))
    x = AlgebraElement(space, tuple(data))
    tb = total_bound(x)
    if tb > n:
        x = x.scale(n / tb)
    return x


def distance_to_sa(x: AlgebraElement) -> float:
    """phi-norm distance from x to the self-adjoint elements.

    Real-orthogonal projection of the GNS image onto the self-adjoint
    subspace, delegated to the Rieffel-Van Daele projection P.
    """
    from .rvd import get_rvd  # deferred: rvd builds on this module

    rvd = get_rvd(x.space)
    xi = x.space.flatten(gns_embed(x).data)
    res = linalg.realify_vector(xi) - rvd.p.matrix @ linalg.realify_vector(xi)
    return float(np.linalg.norm(res))


class GnsVector:
    """Element of the GNS Hilbert space in weighted Hilbert-Schmidt coordinates."""

    __slots__ = ("space", "data")

    def __init__(self, space: WStarSpace, data):
        self.space = space
        self.data = tuple(data)

    def __add__(self, other):
        return GnsVector(self.space, tuple(a + b for a, b in zip(self.data, other.data)))

    def __sub__(self, other):
        return GnsVector(self.space, tuple(a - b for a, b in zip(self.data, other.data)))

    def scale(self, scalar) -> "GnsVector":
        s = complex(scalar)
        return GnsVector(self.space, tuple(s * a for a in self.data))

    def __mul__(self, scalar):
        return self.scale(scalar)

    __rmul__ = __mul__

    def inner(self, other: "GnsVector") -> complex:
        """<self, other>, conjugate-linear in the second slot."""
        return complex(
            sum(np.vdot(b, a) for a, b in zip(self.data, other.data))
        )

    def norm(self) -> float:
        return float(np.sqrt(max(self.inner(self).real, 0.0)))

    def flat(self) -> np.ndarray:
        return self.space.flatten(self.data)

    @classmethod
    def from_flat(cls, space: WStarSpace, flat: np.ndarray) -> "GnsVector":
        return cls(space, space.unflatten(flat))


class Dissection:
    """The many-sorted view of a space: sorts S_n with the sharp metric."""

    def __init__(self, space: WStarSpace, n_max: int, tolerance: float = SORT_SLACK):
        self.space = space
        self.n_max = int(n_max)
        self.tolerance = float(tolerance)

    def contains(self, x: AlgebraElement, n: int) -> bool:
        return total_bound(x) <= n * (1.0 + self.tolerance)

    def metric(self, x: AlgebraElement, y: AlgebraElement) -> float:
        return sharp_norm(x - y)

    def sorts(self):
        return range(1, self.n_max + 1)


# ---------------------------------------------------------------------------
# JSON contracts


def _matrix_to_json(m: np.ndarray):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def _matrix_from_json(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def space_to_json(space: WStarSpace) -> dict:
    return {
        "blocks": list(space.blocks),
        "rho_blocks": [_matrix_to_json(b) for b in space.rho],
    }


def space_from_json(doc: dict, normalize: bool = False) -> WStarSpace:
    return make_space(doc["blocks"], [_matrix_from_json(b) for b in doc["rho_blocks"]], normalize=normalize)


def element_to_json(x: AlgebraElement) -> dict:
    return {"element_blocks": [_matrix_to_json(b) for b in x.data]}


def element_from_json(space: WStarSpace, doc: dict) -> AlgebraElement:
    return space.element([_matrix_from_json(b) for b in doc["element_blocks"]])

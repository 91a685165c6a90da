"""The 7-dimensional matrix model of g2 in the complex cross-product basis.

Matrices act on coordinates in the basis (u_3, u_2, u_1, u_0, u_-1, u_-2, u_-3).
The Cartan subalgebra is diagonal, the positive root vectors are strictly upper
triangular, and e_-delta is the conjugate transpose of e_delta.  The Higgs field
of a cyclic G2 Higgs bundle is phi = e~ + q e_gamma with e~ the lowering element
of the principal sl2 triple and e_gamma the highest root vector.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .octonion import BasisTag, ImVector, QFLIP, derivation_defect

SQRT_M2 = 1j * math.sqrt(2)
SQRT_M6 = 1j * math.sqrt(6)


class Root(str, enum.Enum):
    BETA = "beta"
    ALPHA = "alpha"
    ALPHA_BETA = "alpha+beta"
    ALPHA_2BETA = "alpha+2beta"
    ALPHA_3BETA = "alpha+3beta"
    GAMMA = "2alpha+3beta"

    @property
    def height(self) -> int:
        return _HEIGHTS[self]


_HEIGHTS = {
    Root.BETA: 1,
    Root.ALPHA: 1,
    Root.ALPHA_BETA: 2,
    Root.ALPHA_2BETA: 3,
    Root.ALPHA_3BETA: 4,
    Root.GAMMA: 5,
}

# nonzero entries of the positive root vectors, 1-based (row, column)
_ROOT_ENTRIES = {
    Root.BETA: {(1, 2): 1, (3, 4): SQRT_M2, (4, 5): SQRT_M2, (6, 7): 1},
    Root.ALPHA: {(2, 3): 1, (5, 6): 1},
    Root.ALPHA_BETA: {(1, 3): 1, (2, 4): -SQRT_M2, (4, 6): SQRT_M2, (5, 7): -1},
    Root.ALPHA_2BETA: {(1, 4): SQRT_M2, (2, 5): 1, (3, 6): 1, (4, 7): SQRT_M2},
    Root.ALPHA_3BETA: {(1, 5): 1, (3, 7): -1},
    Root.GAMMA: {(1, 6): 1, (2, 7): 1},
}


def _from_entries(entries):
    m = np.zeros((7, 7), dtype=complex)
    for (i, j), v in entries.items():
        m[i - 1, j - 1] = v
    return m


def bracket(a, b):
    return a @ b - b @ a


@dataclass(frozen=True)
class ChevalleyTriple:
    e: np.ndarray
    e_neg: np.ndarray
    t: np.ndarray


def chevalley(root) -> ChevalleyTriple:
    """Root vector, negative root vector and coroot for a positive root."""
    try:
        root = Root(root)
    except ValueError:
        raise KeyError(f"unknown root {root!r}") from None
    e = _from_entries(_ROOT_ENTRIES[root])
    e_neg = e.conj().T
    return ChevalleyTriple(e, e_neg, bracket(e, e_neg))


def root_table():
    return {root: chevalley(root) for root in Root}


def csa(r, s):
    """Cartan element diag(r+s, r, s, 0, -s, -r, -r-s)."""
    return np.diag([r + s, r, s, 0, -s, -r, -r - s]).astype(complex)


GRADING = np.diag([3.0, 2, 1, 0, -1, -2, -3]).astype(complex)


def principal_3ds():
    """The principal sl2 triple (x, e, e~) with [x, e] = e and [e, e~] = x."""
    r3, r5 = math.sqrt(3), math.sqrt(5)
    e = np.diag([r3, r5, SQRT_M6, SQRT_M6, r5, r3], 1).astype(complex)
    e_tilde = np.diag([r3, r5, -SQRT_M6, -SQRT_M6, r5, r3], -1).astype(complex)
    return GRADING.copy(), e, e_tilde


def metric_matrix(r, s):
    """Diagonal harmonic metric H = diag(1/(rs), 1/r, 1/s, 1, s, r, rs)."""
    return np.diag([1 / (r * s), 1 / r, 1 / s, 1, s, r, r * s]).astype(complex)


@dataclass(frozen=True)
class HiggsData:
    qval: complex
    r: float
    s: float
    phi: np.ndarray
    phi_adj: np.ndarray


def higgs(qval, r, s) -> HiggsData:
    """Higgs field phi = e~ + q e_gamma and its adjoint H^-1 phi^dagger H."""
    if r <= 0 or s <= 0:
        raise ValueError("metric components must be positive")
    _, _, e_tilde = principal_3ds()
    phi = e_tilde + qval * chevalley(Root.GAMMA).e
    h = np.diag(metric_matrix(r, s))
    phi_adj = (phi.conj().T * h[None, :]) / h[:, None]
    return HiggsData(complex(qval), float(r), float(s), phi, phi_adj)


def hitchin_laplacians(qval, r, s):
    """(Delta log r, Delta log s) forced by the diagonal of [phi, phi_adj]."""
    data = higgs(qval, r, s)
    d = np.diag(bracket(data.phi, data.phi_adj)).real
    return -d[1], -d[2]


# ---------------------------------------------------------------------------
# involutions


def sigma(a):
    """sigma(A) = -Q A^T Q."""
    return -QFLIP @ np.asarray(a).T @ QFLIP


def rho(a):
    """Compact real structure rho(A) = -conj(A)^T."""
    return -np.asarray(a).conj().T


def tau(a):
    """Split real structure tau = rho sigma, i.e. Q conj(A) Q."""
    return rho(sigma(a))


def tau_hat(a, r, s):
    """The bundle real structure on endomorphisms, H^-1 Q conj(A) Q H."""
    h = metric_matrix(r, s)
    return np.linalg.inv(h) @ QFLIP @ np.asarray(a).conj() @ QFLIP @ h


def tau_V(v: ImVector) -> ImVector:
    """Complex conjugation of (Im Oct')^C read in the complex basis."""
    if v.basis is not BasisTag.COMPLEX_B:
        raise ValueError("tau_V acts on ComplexB coordinates")
    return ImVector(tuple(QFLIP @ v.array().conj()), BasisTag.COMPLEX_B)


def bundle_real_structure(v: ImVector, r, s) -> ImVector:
    """x -> H^-1 Q conj(x), the real structure of the Higgs bundle at a point."""
    if r <= 0 or s <= 0:
        raise ValueError("metric components must be positive")
    if v.basis is not BasisTag.COMPLEX_B:
        raise ValueError("bundle_real_structure acts on ComplexB coordinates")
    h_inv = np.linalg.inv(metric_matrix(r, s))
    return ImVector(tuple(h_inv @ QFLIP @ v.array().conj()), BasisTag.COMPLEX_B)


def unitary_frame(r, s) -> np.ndarray:
    """Columns w_1..w_7 in ComplexB coordinates: H^-1/2 applied to (i, j, k, l, li, lj, lk)."""
    a = 1 / math.sqrt(2)
    g = np.diag(np.diag(metric_matrix(r, s)).real ** -0.5)
    m = np.zeros((7, 7), dtype=complex)
    # rows indexed by u_3, ..., u_-3
    m[3, 0] = 1
    m[1, 1], m[5, 1] = a, a
    m[1, 2], m[5, 2] = -1j * a, 1j * a
    m[2, 3], m[4, 3] = a, a
    m[2, 4], m[4, 4] = 1j * a, -1j * a
    m[0, 5], m[6, 5] = -a, -a
    m[0, 6], m[6, 6] = 1j * a, -1j * a
    return g @ m


def g2_membership_defect(a) -> float:
    """Derivation defect of a ComplexB matrix."""
    return derivation_defect(a, BasisTag.COMPLEX_B)

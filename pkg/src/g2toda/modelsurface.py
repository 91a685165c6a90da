"""Closed-form data for the constant sextic differential q = 1.

The metric is constant, phi0 and its adjoint commute, and parallel transport is
a matrix exponential diagonalised by E0 = H0^(-1/2) S:

    psi0(z) = E0 exp(2 Re(z D)) E0^-1,   D = alpha diag(xi, xi^3, ..., xi^11, 0).

The curve starts at u_0, whose E0 coordinates are (-1, 1, -1, 1, -1, 1, 0)/sqrt(6),
so in E0 coordinates the model curve is exp(2 Re(z D)) applied to that vector.
Under the real identification of the fibre at the origin the columns of E0 are
the clock vectors x_1, x_3, ..., x_11, x_0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .g2lie import higgs
from .octonion import (
    CLOCK_LABELS,
    CLOCK_S,
    XI,
    BasisTag,
    ImVector,
    basis_matrix,
    model_metric_diag,
)
from .toda import CONST

ALPHA = CONST.alpha
E0_START = np.array([-1, 1, -1, 1, -1, 1, 0]) / math.sqrt(6)


def model_metric():
    """(r0, s0, diag H0) for q = 1."""
    r0 = (2 / 5) ** (1 / 3)
    s0 = CONST.d ** (1 / 3)
    return r0, s0, model_metric_diag()


@dataclass(frozen=True)
class ModelData:
    h0: np.ndarray
    eigenvalues: np.ndarray
    s: np.ndarray
    e0: np.ndarray
    phi0: np.ndarray
    phi0_adj: np.ndarray


def model_data() -> ModelData:
    r0, s0, h0 = model_metric()
    data = higgs(1.0, r0, s0)
    eig = np.array([ALPHA * XI**k for k in (1, 3, 5, 7, 9, 11)] + [0])
    e0 = np.diag(h0**-0.5) @ CLOCK_S
    return ModelData(h0, eig, CLOCK_S, e0, data.phi, data.phi_adj)


MODEL = model_data()
E0_INV = np.linalg.inv(MODEL.e0)


def exponents(z):
    """The diagonal of 2 Re(z D)."""
    return 2 * (np.asarray(z)[..., None] * MODEL.eigenvalues).real


def direction_profile(theta):
    """d_i(theta) = cos(theta + (2i-1) pi/6) for i = 1..6 and d_7 = 0."""
    theta = np.asarray(theta, dtype=float)
    k = np.arange(1, 7)
    d = np.cos(theta[..., None] + (2 * k - 1) * np.pi / 6)
    return np.concatenate([d, np.zeros(theta.shape + (1,))], axis=-1)


def psi0(z) -> np.ndarray:
    """Closed-form model transport matrix in ComplexB coordinates."""
    return MODEL.e0 @ np.diag(np.exp(exponents(z))) @ E0_INV


def nu0_coords(z) -> np.ndarray:
    """E0 coordinates of the model curve at z."""
    return np.exp(exponents(z)) * E0_START


def nu0(z) -> ImVector:
    return ImVector(tuple(nu0_coords(z)), BasisTag.GRADED_E0)


def nu0_real(z) -> np.ndarray:
    """The model curve in real M coordinates, sum of clock vectors."""
    return basis_matrix(BasisTag.CLOCK_C).real @ nu0_coords(z)


def clock_vector(k) -> np.ndarray:
    """x_k in real M coordinates, k in {0, 1, 3, 5, 7, 9, 11}."""
    return basis_matrix(BasisTag.CLOCK_C).real[:, CLOCK_LABELS.index(k % 12)]


def model_limit(theta, offset=0.0, tol=1e-9) -> np.ndarray:
    """Projective limit of the model curve along t e^(i theta) + i offset, t -> infinity.

    The dominant clock vectors are those maximising cos(theta + (2k-1) pi/6);
    when two tie (critical directions) the offset weights them by exp(c_k(i offset)).
    Returned as a unit vector in real M coordinates.
    """
    prof = direction_profile(theta)[:6]
    top = np.flatnonzero(prof >= prof.max() - tol)
    weights = exponents(1j * offset)
    vec = np.zeros(7)
    for idx in top:
        k = idx + 1
        vec += (-1) ** k * math.exp(weights[idx] - weights[top].max()) * clock_vector(2 * k - 1)
    return vec / np.linalg.norm(vec)


def hexagon() -> list:
    """The clock hexagon ([x_1], [x_3], ..., [x_11]) in real M coordinates."""
    return [clock_vector(k) for k in (1, 3, 5, 7, 9, 11)]


"""Link data for cohomogeneity-one geometries.

Two kinds of link are supported:

* invariant-coframe links given by constant structure constants
  ``d theta^a = -1/2 c^a_{bc} theta^b ^ theta^c`` (nilmanifold, torus, ...);
* the round 6-sphere link of the flat cone, which has no invariant coframe
  and is handled by the ray representation in :mod:`g2lab.frames`, using
  rotation generators that stabilize the standard 3-form.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import algebra as al

LINK_DIM = 6


@dataclass(frozen=True)
class LinkSpec:
    """Invariant link coframe: d theta^a = -1/2 c^a_{bc} theta^b ^ theta^c."""

    name: str
    c: np.ndarray  # c[a, b, c] with [X_b, X_c] = c^a_{bc} X_a

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.shape != (LINK_DIM,) * 3:
            raise ValueError("structure constants must be 6x6x6")
        if np.abs(c + np.swapaxes(c, 1, 2)).max() > 1e-14:
            raise ValueError("structure constants must be antisymmetric in the lower pair")
        object.__setattr__(self, "c", c)

    def jacobi_residual(self):
        c = self.c
        j = (
            np.einsum("dea,ebc->dabc", c, c)
            + np.einsum("deb,eca->dabc", c, c)
            + np.einsum("dec,eab->dabc", c, c)
        )
        return float(np.abs(j).max())


def _set(c, d, a, b, v):
    c[d, a, b] = v
    c[d, b, a] = -v


@lru_cache(maxsize=None)
def iwasawa_link():
    """T^2-bundle over the flat T^4 carrying a hyperkahler triple.

    Coframe order (eta1..eta4, theta5, theta6) with d eta^i = 0 and

        d theta^5 = -(eta^14 + eta^23),   d theta^6 = -(eta^13 - eta^24).

    The orientation of the triple is the one for which the warped 3-form of
    the explicit linear-potential shrinker is positive (identity-metric
    calibration); other sign conventions flip the induced metric's sign on
    the T^4 block.
    """
    c = np.zeros((LINK_DIM,) * 3)
    _set(c, 4, 0, 3, 1.0)
    _set(c, 4, 1, 2, 1.0)
    _set(c, 5, 0, 2, 1.0)
    _set(c, 5, 1, 3, -1.0)
    return LinkSpec("iwasawa", c)


@lru_cache(maxsize=None)
def torus_link():
    return LinkSpec("torus", np.zeros((LINK_DIM,) * 3))


@lru_cache(maxsize=None)
def su2_torus_link():
    """Unit round S^3 x T^3 (bi-invariant), used to calibrate curvature signs."""
    c = np.zeros((LINK_DIM,) * 3)
    _set(c, 0, 1, 2, 2.0)
    _set(c, 1, 2, 0, 2.0)
    _set(c, 2, 0, 1, 2.0)
    return LinkSpec("su2xT3", c)


# ---------------------------------------------------------------------------
# stabilizer algebra of the standard 3-form (for the flat-cone ray frame)
# ---------------------------------------------------------------------------


def _act_on_form3(A, phi_dense):
    return (
        np.einsum("im,mjk->ijk", A, phi_dense)
        + np.einsum("jm,imk->ijk", A, phi_dense)
        + np.einsum("km,ijm->ijk", A, phi_dense)
    )


@lru_cache(maxsize=None)
def stabilizer_basis():
    """Basis (14 matrices) of {A in so(7) : A . phi0 = 0}."""
    phi = al.standard_phi().dense()
    so_basis = []
    for i in range(7):
        for j in range(i + 1, 7):
            B = np.zeros((7, 7))
            B[i, j], B[j, i] = 1.0, -1.0
            so_basis.append(B)
    M = np.stack([_act_on_form3(B, phi).ravel() for B in so_basis], axis=1)
    _, s, Vt = np.linalg.svd(M)
    null = Vt[s < 1e-10]
    if null.shape[0] != 14:
        raise RuntimeError("stabilizer algebra has unexpected dimension")
    mats = tuple(
        sum(coef[m] * so_basis[m] for m in range(len(so_basis))) for coef in null
    )
    return mats


@lru_cache(maxsize=None)
def ray_rotation_generators():
    """Matrices A_2..A_7 in the stabilizer algebra with A_a e_1 = e_a.

    These realize the tangential directions at a ray point t*e_1: the
    derivative of an equivariant field along e_a equals (1/t) times the
    algebra action of A_a on its components.
    """
    mats = stabilizer_basis()
    E = np.stack([A[:, 0] for A in mats], axis=1)  # columns A e1
    gens = []
    for a in range(1, 7):
        target = np.zeros(7)
        target[a] = 1.0
        coef, *_ = np.linalg.lstsq(E, target, rcond=None)
        A = sum(coef[m] * mats[m] for m in range(len(mats)))
        if np.linalg.norm(A[:, 0] - target) > 1e-12:
            raise RuntimeError("ray tangential generator solve failed")
        gens.append(A)
    return tuple(gens)

"""Cohomogeneity-one frame calculus on a radial grid.

Two geometry backends share one set of operators (connection, curvature,
covariant/exterior derivatives):

* :class:`LieFrameGeometry` - invariant link coframe with constant structure
  constants; components of invariant tensors depend on the radial variable
  only, so link-direction derivatives of components vanish.
* :class:`FlatRayGeometry` - the flat cone over the round 6-sphere in the
  Cartesian frame, with fields tabulated along the ray ``t * e_1``.  Fields
  are assumed equivariant under the stabilizer group of the standard 3-form
  (which acts transitively on the sphere), so tangential derivatives are the
  exact algebraic action of the ray rotation generators divided by radius.

Index conventions: frame index 0 is radial, 1..6 are link directions.  All
stored tensors are in lower components unless stated; ``variances`` strings
('d' lower / 'u' upper) drive raising-aware operators.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field

import numpy as np

from . import algebra as al
from .errors import SingularMetric
from .grids import RadialGrid
from .links import LinkSpec, ray_rotation_generators

DIM = 7
_LETTERS = string.ascii_lowercase.replace("n", "")


# ---------------------------------------------------------------------------
# geometry backends
# ---------------------------------------------------------------------------


class LieFrameGeometry:
    """Radial grid x invariant coframe with constant structure constants."""

    def __init__(self, grid: RadialGrid, link: LinkSpec):
        if link.jacobi_residual() > 1e-12:
            raise ValueError("link structure constants violate the Jacobi identity")
        self.grid = grid
        self.link = link
        C = np.zeros((DIM,) * 3)
        C[1:, 1:, 1:] = link.c
        self.C = C  # frame structure [e_a, e_b] = C^d_{ab} e_d

    @property
    def t(self):
        return self.grid.nodes

    @property
    def n(self):
        return self.grid.n

    def dirderiv(self, values, radial=None):
        """e_alpha(values) stacked along a new axis 1."""
        values = np.asarray(values, dtype=float)
        out = np.zeros((values.shape[0], DIM) + values.shape[1:])
        out[:, 0] = radial if radial is not None else self.grid.deriv(values)
        return out

    def structure(self):
        return self.C


class FlatRayGeometry:
    """Flat 7-space in the Cartesian frame along the ray t -> t * e_1."""

    def __init__(self, grid: RadialGrid):
        if grid.nodes[0] <= 0:
            raise ValueError("the ray representation needs t_min > 0")
        self.grid = grid
        self.generators = ray_rotation_generators()

    @property
    def t(self):
        return self.grid.nodes

    @property
    def n(self):
        return self.grid.n

    def _rotate(self, A, values):
        rank = values.ndim - 1
        if rank == 0:
            return np.zeros_like(values)
        out = np.zeros_like(values)
        base = _LETTERS[:rank]
        for slot in range(rank):
            src = base[:slot] + "z" + base[slot + 1 :]
            out += np.einsum(f"{base[slot]}z,n{src}->n{base}", A, values)
        return out

    def dirderiv(self, values, radial=None):
        values = np.asarray(values, dtype=float)
        out = np.zeros((values.shape[0], DIM) + values.shape[1:])
        out[:, 0] = radial if radial is not None else self.grid.deriv(values)
        inv_t = 1.0 / self.t
        shape = (-1,) + (1,) * (values.ndim - 1)
        for a, A in enumerate(self.generators):
            out[:, a + 1] = inv_t.reshape(shape) * self._rotate(A, values)
        return out

    def structure(self):
        return None


# ---------------------------------------------------------------------------
# metric fields
# ---------------------------------------------------------------------------


def metric_field_from_phi(phi_values):
    """Batched metric recovery over grid nodes; returns (g, vol).

    Raises SingularMetric if any node fails positive-definiteness or the
    orientation is not uniformly positive.
    """
    g, orient, det = al.metric_candidates_dense(phi_values)
    if np.any(~np.isfinite(det)) or np.any(det < 1e-300):
        raise SingularMetric("metric recovery singular at some node")
    ev = np.linalg.eigvalsh(g)
    if ev[..., 0].min() <= 0:
        raise SingularMetric("recovered metric not positive-definite at some node")
    if np.any(orient < 0):
        raise SingularMetric("orientation flip inside the grid")
    return g, np.sqrt(np.linalg.det(g))


def check_spd(g):
    g = np.asarray(g, dtype=float)
    if np.abs(g - np.swapaxes(g, -1, -2)).max() > 1e-10:
        raise SingularMetric("metric field not symmetric")
    if np.linalg.eigvalsh(g)[..., 0].min() <= 0:
        raise SingularMetric("metric field not positive-definite")


# ---------------------------------------------------------------------------
# connection and curvature
# ---------------------------------------------------------------------------


@dataclass
class CurvatureData:
    """Connection plus curvature of a metric field in the chosen frame."""

    Gu: np.ndarray        # Gamma^m_{ab}  (n, m, a, b)
    Riem: np.ndarray      # R_{abcd} = g(R(e_a, e_b) e_c, e_d)
    Ric: np.ndarray
    R: np.ndarray
    g: np.ndarray
    ginv: np.ndarray
    eGu: np.ndarray = field(repr=False, default=None)  # e_alpha(Gamma^m_{bc})

    def symmetry_residuals(self):
        r = self.Riem
        scale = max(np.abs(r).max(), 1e-30)
        anti1 = np.abs(r + np.einsum("nbacd->nabcd", r)).max()
        anti2 = np.abs(r + np.einsum("nabdc->nabcd", r)).max()
        pair = np.abs(r - np.einsum("ncdab->nabcd", r)).max()
        bianchi = np.abs(
            r + np.einsum("nacdb->nabcd", r) + np.einsum("nadbc->nabcd", r)
        ).max()
        return {
            "antisym_first": anti1 / scale,
            "antisym_second": anti2 / scale,
            "pair_exchange": pair / scale,
            "first_bianchi": bianchi / scale,
        }


def _koszul_lower(geo, g, e_g):
    C = geo.structure()
    Gd = 0.5 * (
        e_g
        + np.einsum("nbac->nabc", e_g)
        - np.einsum("ncab->nabc", e_g)
    )
    if C is not None:
        Gd = Gd + 0.5 * (
            np.einsum("dab,ndc->nabc", C, g)
            - np.einsum("dbc,nda->nabc", C, g)
            + np.einsum("dca,ndb->nabc", C, g)
        )
    return Gd


def christoffels(geo, g, dg=None):
    """Gamma^m_{ab} of the metric field in the frame (torsion-free, metric)."""
    e_g = geo.dirderiv(g, radial=dg)
    Gd = _koszul_lower(geo, g, e_g)
    return np.einsum("nmc,nabc->nmab", np.linalg.inv(g), Gd)


def curvature_from_metric(geo, g, dg=None, d2g=None):
    """Assemble connection, Riemann, Ricci and scalar curvature."""
    check_spd(g)
    ginv = np.linalg.inv(g)
    e_g = geo.dirderiv(g, radial=dg)
    Gd = _koszul_lower(geo, g, e_g)
    Gu = np.einsum("nmc,nabc->nmab", ginv, Gd)

    if dg is not None and d2g is not None:
        # analytic radial derivative of Gamma from dg, d2g
        e_dg = geo.dirderiv(dg, radial=d2g)
        dGd = _koszul_lower(geo, dg, e_dg)
        dginv = -np.einsum("nab,nbc,ncd->nad", ginv, dg, ginv)
        dGu = np.einsum("nmc,nabc->nmab", dginv, Gd) + np.einsum(
            "nmc,nabc->nmab", ginv, dGd
        )
        eGu = geo.dirderiv(Gu, radial=dGu)
    else:
        eGu = geo.dirderiv(Gu)

    C = geo.structure()
    Rupl = (
        np.einsum("nadbc->ndcab", eGu)
        - np.einsum("nbdac->ndcab", eGu)
        + np.einsum("ndam,nmbc->ndcab", Gu, Gu)
        - np.einsum("ndbm,nmac->ndcab", Gu, Gu)
    )
    if C is not None:
        Rupl = Rupl - np.einsum("mab,ndmc->ndcab", C, Gu)
    Riem = np.einsum("nde,necab->nabcd", g, Rupl)
    Ric = np.einsum("nacab->ncb", Rupl)
    R = np.einsum("ncb,ncb->n", ginv, Ric)
    return CurvatureData(Gu=Gu, Riem=Riem, Ric=Ric, R=R, g=g, ginv=ginv, eGu=eGu)


# ---------------------------------------------------------------------------
# covariant and exterior derivatives
# ---------------------------------------------------------------------------


def covd(geo, Gu, values, variances, radial=None):
    """Covariant derivative; the new (lower) slot is prepended.

    ``variances`` is a string like 'dd' describing the slots of ``values``.
    """
    values = np.asarray(values, dtype=float)
    rank = values.ndim - 1
    if len(variances) != rank:
        raise ValueError("variance string does not match tensor rank")
    out = geo.dirderiv(values, radial=radial)
    base = _LETTERS[1 : rank + 1]
    for slot, var in enumerate(variances):
        src = base[:slot] + "z" + base[slot + 1 :]
        if var == "u":
            out += np.einsum(f"n{base[slot]}az,n{src}->na{base}", Gu, values)
        else:
            out -= np.einsum(f"nza{base[slot]},n{src}->na{base}", Gu, values)
    return out


def gradient(geo, f, df=None):
    """Frame differential of a scalar profile, shape (n, 7)."""
    return geo.dirderiv(np.asarray(f, dtype=float), radial=df)


def hessian_scalar(geo, Gu, f, df=None, d2f=None):
    grad = gradient(geo, f, df=df)
    return covd(geo, Gu, grad, "d", radial=(None if d2f is None else _stack_radial(d2f)))


def _stack_radial(d2f):
    # radial derivative of the gradient covector: only the e_0 component has
    # an analytic profile; link components of invariant gradients vanish.
    d2f = np.asarray(d2f, dtype=float)
    out = np.zeros(d2f.shape + (DIM,))
    out[..., 0] = d2f
    return out


def laplacian_scalar(geo, Gu, ginv, f, df=None, d2f=None):
    H = hessian_scalar(geo, Gu, f, df=df, d2f=d2f)
    return np.einsum("nab,nab->n", ginv, H)


def laplacian_tensor(geo, Gu, ginv, values, variances):
    """Rough Laplacian g^{ab} nabla_a nabla_b acting slotwise."""
    first = covd(geo, Gu, values, variances)
    second = covd(geo, Gu, first, "d" + variances)
    return np.einsum("nab,nab...->n...", ginv, second)


def exterior_d(geo, values, degree, radial=None):
    """Frame exterior derivative of an invariant form field (degree 0..3)."""
    e_w = geo.dirderiv(values, radial=radial)
    C = geo.structure()
    if degree == 0:
        return e_w
    if degree == 1:
        out = e_w - np.einsum("nba->nab", e_w)
        if C is not None:
            out -= np.einsum("mab,nm->nab", C, values)
        return out
    if degree == 2:
        out = (
            e_w
            - np.einsum("nbac->nabc", e_w)
            + np.einsum("ncab->nabc", e_w)
        )
        if C is not None:
            cw = np.einsum("mab,nmc->nabc", C, values)
            out -= cw - np.einsum("nacb->nabc", cw) + np.einsum("nbca->nabc", cw)
        return out
    if degree == 3:
        out = (
            e_w
            - np.einsum("nbacd->nabcd", e_w)
            + np.einsum("ncabd->nabcd", e_w)
            - np.einsum("ndabc->nabcd", e_w)
        )
        if C is not None:
            cw = np.einsum("mab,nmcd->nabcd", C, values)
            out -= (
                cw
                - np.einsum("nacbd->nabcd", cw)
                + np.einsum("nadbc->nabcd", cw)
                + np.einsum("nbcad->nabcd", cw)
                - np.einsum("nbdac->nabcd", cw)
                + np.einsum("ncdab->nabcd", cw)
            )
        return out
    raise NotImplementedError("exterior derivative implemented for degrees 0..3")


def lie_deriv_radial(geo, phi_values, xi, dphi=None, dxi=None, dphi4=None):
    """Lie derivative of a 3-form field along X = xi(t) e_0.

    Uses Cartan's formula d(X . phi) + X . d(phi); the second term is
    evaluated from ``dphi4`` (the exterior derivative of phi) when given,
    otherwise computed.
    """
    xi = np.asarray(xi, dtype=float)
    inner = xi[:, None, None] * phi_values[:, 0]
    if dphi is not None and dxi is not None:
        d_inner = dxi[:, None, None] * phi_values[:, 0] + xi[:, None, None] * dphi[:, 0]
    else:
        d_inner = None
    term1 = exterior_d(geo, inner, 2, radial=d_inner)
    if dphi4 is None:
        dphi4 = exterior_d(geo, phi_values, 3, radial=dphi)
    term2 = xi[:, None, None, None] * dphi4[:, 0]
    return term1 + term2


# ---------------------------------------------------------------------------
# norms and index gymnastics
# ---------------------------------------------------------------------------


def tensor_norm_sq(g, ginv, values, variances):
    """Pointwise squared norm of a tensor field (full contraction, no 1/k!)."""
    values = np.asarray(values, dtype=float)
    rank = values.ndim - 1
    if rank == 0:
        return values ** 2
    s1 = _LETTERS[:rank]
    s2 = _LETTERS[rank : 2 * rank]
    ops = [values, values]
    subs = [f"n{s1}", f"n{s2}"]
    for i, var in enumerate(variances):
        ops.append(ginv if var == "d" else g)
        subs.append(f"n{s1[i]}{s2[i]}")
    return np.einsum(",".join(subs) + "->n", *ops)


def raise_index(ginv, values, slot, rank):
    base = _LETTERS[:rank]
    src = base[:slot] + "z" + base[slot + 1 :]
    return np.einsum(f"n{base[slot]}z,n{src}->n{base}", ginv, values)


def sup_norm(g, ginv, values, variances):
    return float(np.sqrt(np.maximum(tensor_norm_sq(g, ginv, values, variances), 0.0)).max())

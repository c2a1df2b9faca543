"""Pointwise exterior algebra and G2 linear algebra on a 7-dimensional space.

Conventions (fixed once, used everywhere):

* Alternating k-forms are stored as vectors over the C(7,k) strictly
  increasing multi-indices.  With this storage the inner product
  ``<a,b> = sum_I a_I b^I`` over sorted I equals the (1/k!)-normalized full
  contraction, so the standard 3-form has squared norm 7.
* The induced metric of a 3-form phi is normalized by the Euclidean
  calibration: ``s_ij = (1/144) eps^{abcdefg} phi_iab phi_jcd phi_efg`` and
  ``g = s * (det s)^(-1/9)``, which sends the standard phi to the identity
  with unit volume.  If ``det s < 0`` the orientation flips instead of
  rejecting the form.
* Hodge star uses the induced metric, volume ``sqrt(det g)`` and the stored
  orientation sign.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DegenerateForm

DIM = 7

# ---------------------------------------------------------------------------
# combinatorial tables
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def basis(k):
    """Sorted k-index tuples (0-based) indexing the component vector."""
    return tuple(itertools.combinations(range(DIM), k))


@lru_cache(maxsize=None)
def basis_pos(k):
    return {I: p for p, I in enumerate(basis(k))}


def _perm_sign(seq):
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@lru_cache(maxsize=None)
def _perm_table(k):
    """All permutations of k slots with parity, for dense <-> vec conversion."""
    perms = []
    for p in itertools.permutations(range(k)):
        perms.append((p, _perm_sign(p)))
    return tuple(perms)


@lru_cache(maxsize=None)
def _complement_table(k):
    """For each sorted I in basis(k): (position of I^c in basis(7-k), sign(I,I^c))."""
    pos_c = basis_pos(DIM - k)
    out_pos = np.empty(len(basis(k)), dtype=np.intp)
    out_sgn = np.empty(len(basis(k)))
    for p, I in enumerate(basis(k)):
        comp = tuple(i for i in range(DIM) if i not in I)
        out_pos[p] = pos_c[comp]
        out_sgn[p] = _perm_sign(I + comp)
    return out_pos, out_sgn


@lru_cache(maxsize=None)
def wedge_tensor(k, l):
    """Dense structure tensor W[out, a, b] with (alpha ^ beta) = W . a . b."""
    if k + l > DIM:
        raise ValueError("wedge degree exceeds 7")
    bk, bl, bo = basis(k), basis(l), basis_pos(k + l)
    W = np.zeros((len(basis(k + l)), len(bk), len(bl)))
    for ia, I in enumerate(bk):
        for ib, J in enumerate(bl):
            if set(I) & set(J):
                continue
            W[bo[tuple(sorted(I + J))], ia, ib] = _perm_sign(I + J)
    return W


@lru_cache(maxsize=None)
def _vec_dense_indices(k):
    """Index arrays mapping vector storage to the dense antisymmetric array."""
    idx = np.array(basis(k), dtype=np.intp)  # (C, k)
    return idx


def dense_from_vec(k, vec):
    """Expand sorted-basis components to a dense fully antisymmetric array."""
    vec = np.asarray(vec, dtype=float)
    lead = vec.shape[:-1]
    out = np.zeros(lead + (DIM,) * k)
    if k == 0:
        return vec.reshape(lead)
    idx = _vec_dense_indices(k)
    for perm, sign in _perm_table(k):
        cols = tuple(idx[:, p] for p in perm)
        out[(...,) + cols] = sign * vec
    return out


def vec_from_dense(k, dense):
    """Read sorted-basis components off a dense antisymmetric array."""
    dense = np.asarray(dense, dtype=float)
    if k == 0:
        return dense[..., None] if dense.ndim == 0 else dense
    idx = _vec_dense_indices(k)
    cols = tuple(idx[:, p] for p in range(k))
    return dense[(...,) + cols]


@lru_cache(maxsize=None)
def levi_civita_dense():
    """Dense rank-7 Levi-Civita symbol (eps[0..6 perm] = parity)."""
    eps = np.zeros((DIM,) * DIM)
    for perm in itertools.permutations(range(DIM)):
        eps[perm] = _perm_sign(perm)
    return eps


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AltForm:
    """Alternating k-form stored over strictly increasing multi-indices."""

    degree: int
    comps: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.comps, dtype=float)
        if c.shape != (len(basis(self.degree)),):
            raise ValueError(
                f"degree-{self.degree} form needs {len(basis(self.degree))} components"
            )
        object.__setattr__(self, "comps", c)

    def dense(self):
        return dense_from_vec(self.degree, self.comps)

    @classmethod
    def from_dense(cls, k, dense):
        return cls(k, vec_from_dense(k, dense))

    def __add__(self, other):
        self._check(other)
        return AltForm(self.degree, self.comps + other.comps)

    def __sub__(self, other):
        self._check(other)
        return AltForm(self.degree, self.comps - other.comps)

    def __mul__(self, s):
        return AltForm(self.degree, self.comps * float(s))

    __rmul__ = __mul__

    def __neg__(self):
        return AltForm(self.degree, -self.comps)

    def _check(self, other):
        if self.degree != other.degree:
            raise ValueError("degree mismatch")


def ThreeForm(comps):
    """Degree-3 form constructor (35 components over sorted triples)."""
    return AltForm(3, comps)


@dataclass(frozen=True)
class Metric7:
    """Metric induced by a 3-form: symmetric matrix, volume, orientation sign."""

    g: np.ndarray
    vol: float
    orientation: float = 1.0
    ginv: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.ginv is None:
            object.__setattr__(self, "ginv", np.linalg.inv(self.g))


@dataclass(frozen=True)
class Sym2:
    """Symmetric 2-tensor (input of the 3-form valued operator i_phi)."""

    a: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.shape != (DIM, DIM) or not np.allclose(a, a.T, atol=1e-13):
            raise ValueError("Sym2 requires an exactly symmetric 7x7 array")
        object.__setattr__(self, "a", 0.5 * (a + a.T))


@dataclass(frozen=True)
class IrrepDecomp3:
    """gamma = 3*b0*phi + *(b1 ^ phi) + b3 with mutually orthogonal parts."""

    b0: float
    b1: np.ndarray
    b3: AltForm
    b1_norm_sq: float
    b3_norm_sq: float


# ---------------------------------------------------------------------------
# standard form and induced metric
# ---------------------------------------------------------------------------

_PHI0_TABLE = (
    ((0, 1, 2), 1.0),
    ((0, 3, 4), 1.0),
    ((0, 5, 6), 1.0),
    ((1, 3, 5), 1.0),
    ((1, 4, 6), -1.0),
    ((2, 3, 6), -1.0),
    ((2, 4, 5), -1.0),
)
# Components of phi0(u,v,w) = <u x v, w> for the octonion cross product whose
# oriented multiplication triples are (123)(145)(167)(246)(275)(374)(365).
# The orientation convention is fixed by requiring the induced metric of phi0
# to be the identity with +1 orientation.


def standard_phi():
    """The standard G2 3-form: e123 + e145 + e167 + e246 - e257 - e347 - e356."""
    v = np.zeros(len(basis(3)))
    pos = basis_pos(3)
    v[pos[(0, 1, 2)]] = 1.0
    v[pos[(0, 3, 4)]] = 1.0
    v[pos[(0, 5, 6)]] = 1.0
    v[pos[(1, 3, 5)]] = 1.0
    v[pos[(1, 4, 6)]] = -1.0
    v[pos[(2, 3, 6)]] = -1.0
    v[pos[(2, 4, 5)]] = -1.0
    return AltForm(3, v)


def _phi_hat_dense(phi_dense):
    """eps^{abcdefg} phi_{efg} as a dense rank-4 array (batched)."""
    vec = vec_from_dense(3, phi_dense)
    cpos, csgn = _complement_table(3)
    hat_vec = np.zeros(vec.shape[:-1] + (len(basis(4)),))
    hat_vec[..., cpos] = 6.0 * csgn * vec
    # sign(I, I^c) with the 3-index block first equals sign(I^c, I) up to the
    # parity of moving 4 indices past 3, i.e. (-1)^12 = +1.
    return dense_from_vec(4, hat_vec)


def metric_candidates_dense(phi_dense):
    """Batched raw metric recovery: returns (g, orientation, det_s)."""
    phi_dense = np.asarray(phi_dense, dtype=float)
    hat = _phi_hat_dense(phi_dense)
    s = np.einsum("...iab,...jcd,...abcd->...ij", phi_dense, phi_dense, hat) / 144.0
    det = np.linalg.det(s)
    orient = np.where(det < 0, -1.0, 1.0)
    s = s * orient[..., None, None]
    det = np.abs(det)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = s * det[..., None, None] ** (-1.0 / 9.0)
    return g, orient, det


def metric_from_phi(phi):
    """Induced metric of a nondegenerate 3-form.

    Raises DegenerateForm when the defining 7-form identity is singular or
    the recovered bilinear form is not positive-definite.
    """
    dense = phi.dense() if isinstance(phi, AltForm) else dense_from_vec(3, phi)
    g, orient, det = metric_candidates_dense(dense)
    if not np.isfinite(det) or det < 1e-300:
        raise DegenerateForm("singular metric recovery (det s = 0)")
    ev = np.linalg.eigvalsh(g)
    if ev[0] <= 0:
        raise DegenerateForm(f"recovered metric not positive-definite (min eig {ev[0]:.3e})")
    return Metric7(g=g, vol=float(np.sqrt(np.linalg.det(g))), orientation=float(orient))


# ---------------------------------------------------------------------------
# metric-dependent operations on compressed forms
# ---------------------------------------------------------------------------


def gram(ginv, k):
    """Induced inner-product matrix on k-forms: det of k x k minors of g^{-1}."""
    if k == 0:
        return np.ones(np.shape(ginv)[:-2] + (1, 1))
    idx = _vec_dense_indices(k)
    sub = np.asarray(ginv)[..., idx[:, None, :, None], idx[None, :, None, :]]
    return np.linalg.det(sub)


def form_inner(metric, a, b):
    """<a, b>_g over sorted multi-indices (the 1/k! contraction)."""
    if a.degree != b.degree:
        raise ValueError("degree mismatch")
    G = gram(metric.ginv, a.degree)
    return float(a.comps @ G @ b.comps)


def form_norm(metric, a):
    return float(np.sqrt(max(form_inner(metric, a, a), 0.0)))


def wedge(a, b):
    W = wedge_tensor(a.degree, b.degree)
    return AltForm(a.degree + b.degree, np.einsum("oab,a,b->o", W, a.comps, b.comps))


def hodge_star(metric, a):
    """Hodge star defined by alpha ^ *beta = <alpha, beta> Vol."""
    k = a.degree
    G = gram(metric.ginv, k)
    raised = G @ a.comps
    cpos, csgn = _complement_table(k)
    out = np.zeros(len(basis(DIM - k)))
    out[cpos] = metric.orientation * metric.vol * csgn * raised
    return AltForm(DIM - k, out)


def star_batch(g, orient, k, vecs):
    """Batched Hodge star on compressed k-form components.

    ``g`` has shape (..., 7, 7); ``vecs`` shape (..., C(7,k)).
    """
    ginv = np.linalg.inv(g)
    vol = np.sqrt(np.linalg.det(g)) * orient
    G = gram(ginv, k)
    raised = np.einsum("...ab,...b->...a", G, vecs)
    cpos, csgn = _complement_table(k)
    out = np.zeros(vecs.shape[:-1] + (len(basis(DIM - k)),))
    out[..., cpos] = vol[..., None] * csgn * raised
    return out


def interior_vector(v, a):
    """Contraction of a vector into a k-form (no metric needed)."""
    dense = a.dense()
    return AltForm.from_dense(a.degree - 1, np.tensordot(v, dense, axes=(0, 0)))


# ---------------------------------------------------------------------------
# G2 decomposition of 3-forms and the i_phi operator
# ---------------------------------------------------------------------------


def i_phi_dense(phi_dense, h):
    """(i_phi h)_{abc} = h_a^l phi_{lbc} + h_b^l phi_{alc} + h_c^l phi_{abl}.

    ``h`` must already carry one upper index (mixed form h_a^l); for a
    symmetric 2-tensor w.r.t. the metric g pass ``h_mixed = h @ ginv``.
    """
    return (
        np.einsum("...al,...lbc->...abc", h, phi_dense)
        + np.einsum("...bl,...alc->...abc", h, phi_dense)
        + np.einsum("...cl,...abl->...abc", h, phi_dense)
    )


def i_phi(phi, h):
    """3-form valued operator on symmetric 2-tensors; i_phi(g) = 3 phi."""
    metric = metric_from_phi(phi)
    arr = h.a if isinstance(h, Sym2) else np.asarray(h, dtype=float)
    mixed = arr @ metric.ginv
    return AltForm.from_dense(3, i_phi_dense(phi.dense(), mixed))


def measure_i_phi_constant(phi, n=64, seed=20240301):
    """Measured ratio |i_phi(h)|^2 / |h|^2 over random traceless symmetric h."""
    metric = metric_from_phi(phi)
    rng = np.random.default_rng(seed)
    dense = phi.dense()
    ratios = []
    for _ in range(n):
        h = rng.standard_normal((DIM, DIM))
        h = 0.5 * (h + h.T)
        h -= np.trace(metric.ginv @ h) / DIM * metric.g
        iph = AltForm.from_dense(3, i_phi_dense(dense, h @ metric.ginv))
        hsq = float(np.einsum("ij,kl,ik,jl->", h, h, metric.ginv, metric.ginv))
        ratios.append(form_inner(metric, iph, iph) / hsq)
    return float(np.mean(ratios)), float(np.std(ratios))


def decompose_three_form(gamma, phi):
    """Split gamma into the 1 + 7 + 27 pieces of the induced G2 action.

    b0 = <gamma, phi>/21 (since |phi|^2 = 7), the one-form part is extracted
    from the contraction gamma^{ijk} (*phi)_{ijkl} = 24 (b1)_l, and b3 is the
    remainder gamma - 3 b0 phi - *(b1 ^ phi).
    """
    metric = metric_from_phi(phi)
    b0 = form_inner(metric, gamma, phi) / 21.0
    star_phi = hodge_star(metric, phi)
    gi = metric.ginv
    g_up = np.einsum(
        "...ia,...jb,...kc,...abc->...ijk", gi, gi, gi, gamma.dense()
    )
    b1 = np.einsum("...ijk,...ijkl->...l", g_up, star_phi.dense()) / 24.0
    part7 = hodge_star(metric, wedge(AltForm(1, b1), phi))
    b3 = gamma - 3.0 * b0 * phi - part7
    b1_sq = float(b1 @ gi @ b1)
    return IrrepDecomp3(
        b0=float(b0),
        b1=b1,
        b3=b3,
        b1_norm_sq=b1_sq,
        b3_norm_sq=form_inner(metric, b3, b3),
    )


def reconstruct_three_form(decomp, phi):
    metric = metric_from_phi(phi)
    part7 = hodge_star(metric, wedge(AltForm(1, decomp.b1), phi))
    return 3.0 * decomp.b0 * phi + part7 + decomp.b3


def volume_second_order_expansion(decomp):
    """Second-order model of the volume-form ratio under phi -> phi + gamma."""
    return float(
        1.0
        + 7.0 * decomp.b0
        + 14.0 * decomp.b0 ** 2
        + (2.0 / 3.0) * decomp.b1_norm_sq
        - (1.0 / 6.0) * decomp.b3_norm_sq
    )


def exact_volume_ratio(phi, gamma):
    """Vol_{phi+gamma} / Vol_phi via full metric recovery of both forms."""
    m0 = metric_from_phi(phi)
    m1 = metric_from_phi(phi + gamma)
    return m1.vol / m0.vol

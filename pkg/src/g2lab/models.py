"""Model geometries: flat cone, the explicit linear-potential shrinker on the
Iwasawa cylinder, and synthetic asymptotically conical data.

Each model is delivered as a :class:`G2State` (3-form field plus lazily cached
metric, connection, curvature, torsion) or a :class:`ShrinkerData` adding the
potential and dilation constant.  Explicit models carry analytic radial
derivatives of their profiles so curvature/torsion identities are frame-exact;
synthetic data falls back to finite differences where no closed form exists.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import algebra as al
from . import frames as fr
from .errors import DegenerateForm, SingularMetric
from .grids import RadialGrid
from .links import iwasawa_link

DIM = 7


# ---------------------------------------------------------------------------
# G2 state container
# ---------------------------------------------------------------------------


@dataclass
class G2State:
    """A 3-form field with cached derived geometry."""

    geo: object
    phi: np.ndarray                  # (n,7,7,7) dense frame components
    dphi: np.ndarray = None          # analytic radial derivative (optional)
    d2phi: np.ndarray = None
    g: np.ndarray = None             # metric; recovered from phi when absent
    dg: np.ndarray = None
    d2g: np.ndarray = None
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.g is None:
            try:
                self.g, _ = fr.metric_field_from_phi(self.phi)
            except SingularMetric as exc:
                raise DegenerateForm(str(exc)) from exc

    # -- lazy derived quantities -------------------------------------------

    def _get(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    @property
    def ginv(self):
        return self._get("ginv", lambda: np.linalg.inv(self.g))

    @property
    def vol(self):
        return self._get("vol", lambda: np.sqrt(np.linalg.det(self.g)))

    def metric_dg(self):
        return self.dg if self.dg is not None else self._get(
            "dg_fd", lambda: self.geo.grid.deriv(self.g)
        )

    def metric_d2g(self):
        return self.d2g if self.d2g is not None else self._get(
            "d2g_fd", lambda: self.geo.grid.deriv(self.g, 2)
        )

    @property
    def conn(self):
        return self._get(
            "conn", lambda: fr.christoffels(self.geo, self.g, dg=self.metric_dg())
        )

    @property
    def curv(self):
        return self._get(
            "curv",
            lambda: fr.curvature_from_metric(
                self.geo, self.g, dg=self.metric_dg(), d2g=self.metric_d2g()
            ),
        )

    @property
    def star_phi(self):
        def build():
            vec = al.vec_from_dense(3, self.phi)
            orient = np.ones(self.phi.shape[0])
            out = al.star_batch(self.g, orient, 3, vec)
            return al.dense_from_vec(4, out)

        return self._get("star_phi", build)

    @property
    def nabla_phi(self):
        return self._get(
            "nabla_phi",
            lambda: fr.covd(self.geo, self.conn, self.phi, "ddd", radial=self.dphi),
        )

    @property
    def dphi4(self):
        """Exterior derivative of the 3-form (closedness monitor)."""
        return self._get(
            "dphi4", lambda: fr.exterior_d(self.geo, self.phi, 3, radial=self.dphi)
        )

    def closedness_residual(self):
        n2 = fr.tensor_norm_sq(self.g, self.ginv, self.dphi4, "dddd") / 24.0
        return float(np.sqrt(np.maximum(n2, 0.0)).max())


# ---------------------------------------------------------------------------
# shrinker container
# ---------------------------------------------------------------------------


@dataclass
class ShrinkerData(G2State):
    """(phi, f, lambda) with the soliton field X = grad f (radial)."""

    f: np.ndarray = None
    df: np.ndarray = None
    d2f: np.ndarray = None
    lam: float = -1.5

    def __post_init__(self):
        super().__post_init__()
        if self.lam >= 0:
            raise ValueError("shrinkers require a negative dilation constant")
        if self.f is None:
            raise ValueError("a shrinker needs a potential profile")
        if np.abs(self.g[:, 0, 1:]).max() > 1e-10:
            raise ValueError("radial direction must be metric-orthogonal to the link")

    def f_deriv(self):
        return self.df if self.df is not None else self.geo.grid.deriv(self.f)

    def f_deriv2(self):
        return self.d2f if self.d2f is not None else self.geo.grid.deriv(self.f, 2)

    @property
    def xi(self):
        """Radial component of grad f (the soliton vector field)."""
        return self.ginv[:, 0, 0] * self.f_deriv()

    def grad_f_norm_sq(self):
        return self.ginv[:, 0, 0] * self.f_deriv() ** 2


# ---------------------------------------------------------------------------
# model builders
# ---------------------------------------------------------------------------


def build_flat_cone(grid: RadialGrid):
    """Flat 7-space in polar form: standard parallel 3-form, f = r^2/4."""
    if grid.nodes[0] <= 0:
        raise ValueError("flat cone requires t_min > 0")
    geo = fr.FlatRayGeometry(grid)
    n = grid.n
    t = grid.nodes
    phi = np.tile(al.standard_phi().dense(), (n, 1, 1, 1))
    eye = np.tile(np.eye(DIM), (n, 1, 1))
    zeros2 = np.zeros((n, DIM, DIM))
    return ShrinkerData(
        geo=geo,
        phi=phi,
        dphi=np.zeros_like(phi),
        d2phi=np.zeros_like(phi),
        g=eye,
        dg=zeros2,
        d2g=zeros2,
        f=t ** 2 / 4.0,
        df=t / 2.0,
        d2f=np.full(n, 0.5),
        lam=-1.5,
        name="flat-cone",
    )


_FOWDAR_PHI_SLOTS = (
    # (i, j, k, warping key): phi_{ijk} = sign * profile
    ((0, 1, 2), "A", 1.0),
    ((0, 3, 4), "A", 1.0),
    ((0, 5, 6), "B", 1.0),
    ((1, 3, 5), "E", 1.0),
    ((2, 4, 5), "E", -1.0),
    ((1, 4, 6), "E", -1.0),
    ((2, 3, 6), "E", -1.0),
)


def _set_three_form(arr, profile, i, j, k):
    for (a, b, c), s in (
        ((i, j, k), 1.0), ((j, k, i), 1.0), ((k, i, j), 1.0),
        ((j, i, k), -1.0), ((i, k, j), -1.0), ((k, j, i), -1.0),
    ):
        arr[:, a, b, c] += s * profile


def build_fowdar(grid: RadialGrid):
    """Gradient shrinker on R x (T^2-bundle over T^4): linear potential.

    Invariant-coframe representation with analytic profiles

        g = dt^2 + sqrt(3) e^{t/6} g_{T^4} + (1/3) e^{t/3} (theta5^2 + theta6^2)
        f = (5/2) t,   lambda = -1/2,   X = (5/2) d/dt.
    """
    geo = fr.LieFrameGeometry(grid, iwasawa_link())
    n, t = grid.n, grid.nodes
    A = np.sqrt(3.0) * np.exp(t / 6.0)
    B = np.exp(t / 3.0) / 3.0
    E = np.exp(t / 3.0)
    profiles = {"A": A, "B": B, "E": E}
    rates = {"A": 1.0 / 6.0, "B": 1.0 / 3.0, "E": 1.0 / 3.0}

    phi = np.zeros((n, DIM, DIM, DIM))
    dphi = np.zeros_like(phi)
    d2phi = np.zeros_like(phi)
    for (i, j, k), key, sign in _FOWDAR_PHI_SLOTS:
        p = sign * profiles[key]
        r = rates[key]
        _set_three_form(phi, p, i, j, k)
        _set_three_form(dphi, r * p, i, j, k)
        _set_three_form(d2phi, r * r * p, i, j, k)

    g = np.zeros((n, DIM, DIM))
    dg = np.zeros_like(g)
    d2g = np.zeros_like(g)
    g[:, 0, 0] = 1.0
    for i in range(1, 5):
        g[:, i, i], dg[:, i, i], d2g[:, i, i] = A, A / 6.0, A / 36.0
    for i in (5, 6):
        g[:, i, i], dg[:, i, i], d2g[:, i, i] = B, B / 3.0, B / 9.0

    return ShrinkerData(
        geo=geo,
        phi=phi,
        dphi=dphi,
        d2phi=d2phi,
        g=g,
        dg=dg,
        d2g=d2g,
        f=2.5 * t,
        df=np.full(n, 2.5),
        d2f=np.zeros(n),
        lam=-0.5,
        name="fowdar",
    )


# ---------------------------------------------------------------------------
# synthetic asymptotically conical data
# ---------------------------------------------------------------------------


def _smoothstep(x):
    """Quintic smoothstep: C^2, s(0)=0, s(1)=1, s', s'' vanish at both ends."""
    x = np.clip(x, 0.0, 1.0)
    return x ** 3 * (10.0 - 15.0 * x + 6.0 * x ** 2)


def _smoothstep_d1(x):
    inside = (x > 0.0) & (x < 1.0)
    x = np.clip(x, 0.0, 1.0)
    return np.where(inside, 30.0 * x ** 2 * (1.0 - x) ** 2, 0.0)


def _smoothstep_d2(x):
    inside = (x > 0.0) & (x < 1.0)
    x = np.clip(x, 0.0, 1.0)
    return np.where(inside, 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x), 0.0)


def _smoothstep_d3(x):
    inside = (x > 0.0) & (x < 1.0)
    x = np.clip(x, 0.0, 1.0)
    return np.where(inside, 60.0 * (1.0 - 6.0 * x + 6.0 * x ** 2), 0.0)


class _RationalProfile:
    """u(t) = amp * chi(t) * sum_m c_m t^{-k-m} with analytic derivatives."""

    def __init__(self, amplitude, decay_rate, coeffs, t_on, width):
        self.amp = amplitude
        self.k = decay_rate
        self.coeffs = coeffs
        self.t_on = t_on
        self.width = width

    def _chi(self, t, order):
        x = (t - self.t_on) / self.width
        f = [_smoothstep, _smoothstep_d1, _smoothstep_d2, _smoothstep_d3][order]
        return f(x) / self.width ** order

    def _core(self, t, order):
        out = np.zeros_like(t)
        for m, c in enumerate(self.coeffs):
            p = -(self.k + m)
            fac = 1.0
            for j in range(order):
                fac *= p - j
            out += c * fac * t ** (p - order)
        return out

    def eval(self, t, order):
        # Leibniz rule on chi * core
        from math import comb

        total = np.zeros_like(t)
        for j in range(order + 1):
            total += comb(order, j) * self._chi(t, j) * self._core(t, order - j)
        return self.amp * total


def _ray_wedge_pattern():
    """Constant array W1 with (e^1 ^ (e_1 . phi0))_{ijk} = W1_{ijk}."""
    phi = al.standard_phi().dense()
    mu = phi[0]  # (e_1 . phi0)_{jk}
    W = np.zeros((DIM, DIM, DIM))
    for i in range(DIM):
        for j in range(DIM):
            for k in range(DIM):
                W[i, j, k] = (
                    (1.0 if i == 0 else 0.0) * mu[j, k]
                    - (1.0 if j == 0 else 0.0) * mu[i, k]
                    + (1.0 if k == 0 else 0.0) * mu[i, j]
                )
    return W


def build_synthetic_ac(grid: RadialGrid, link="flat-cone", decay_rate=2.0,
                       amplitude=0.05, seed=0):
    """Closed perturbation of the flat cone with prescribed radial decay.

    The perturbing 3-form is the exact exterior derivative of
    ``u(r) * (x . phi0)`` for a compactly-switched-on radial profile u, so the
    result is closed to machine precision:

        phi = (1 + 3u) phi0 + (u'(r) r) e^1 ^ (e_1 . phi0).
    """
    if link != "flat-cone":
        raise NotImplementedError(
            "synthetic AC data is built over the flat cone (its closed model cone)"
        )
    geo = fr.FlatRayGeometry(grid)
    t = grid.nodes
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed))
    coeffs = np.concatenate([[1.0], rng.uniform(-0.5, 0.5, size=2)])
    width = 0.15 * (t[-1] - t[0])
    u = _RationalProfile(amplitude, decay_rate, coeffs, t[0], width)

    phi0 = al.standard_phi().dense()
    W1 = _ray_wedge_pattern()
    u0, u1, u2, u3 = (u.eval(t, m) for m in range(4))

    def assemble(c_phi, c_w):
        return c_phi[:, None, None, None] * phi0 + c_w[:, None, None, None] * W1

    phi = assemble(1.0 + 3.0 * u0, u1 * t)
    dphi = assemble(3.0 * u1, u2 * t + u1)
    d2phi = assemble(3.0 * u2, u3 * t + 2.0 * u2)
    state = G2State(geo=geo, phi=phi, dphi=dphi, d2phi=d2phi,
                    name=f"synthetic-ac[k={decay_rate},seed={seed}]")
    return state


def synthetic_shrinker(grid: RadialGrid, decay_rate=2.0, amplitude=0.05,
                       seed=0, log_coeff=0.1):
    """Shrinker-shaped data over synthetic AC: f = r^2/4 + c log r."""
    state = build_synthetic_ac(grid, decay_rate=decay_rate, amplitude=amplitude,
                               seed=seed)
    t = grid.nodes
    return ShrinkerData(
        geo=state.geo,
        phi=state.phi,
        dphi=state.dphi,
        d2phi=state.d2phi,
        f=t ** 2 / 4.0 + log_coeff * np.log(t),
        df=t / 2.0 + log_coeff / t,
        d2f=0.5 - log_coeff / t ** 2,
        lam=-1.5,
        name=state.name + "+potential",
    )


def cone_reference(grid: RadialGrid):
    """The unperturbed flat cone 3-form on the same representation."""
    return build_flat_cone(grid)

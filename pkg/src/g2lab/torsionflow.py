"""Torsion of closed 3-form fields and explicit stepping of their flow.

The full torsion 2-tensor is extracted from the first covariant derivative,

    T_i^j = (1/24) (nabla_i phi)_{lmn} (*phi)^{jlmn},

and the flow right-hand side uses the closed-case identity: the Hodge
Laplacian of the 3-form equals i_phi(h) with
h = -Ric - (1/3)|T|^2 g - 2 T.T, which avoids discretizing codifferentials.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import algebra as al
from . import frames as fr
from .errors import DegenerateForm, NotClosed, StabilityViolation
from .models import G2State

CLOSED_TOL = 1e-8


@dataclass
class TorsionData:
    T: np.ndarray        # lowered antisymmetric 2-tensor
    Tud: np.ndarray      # T_i^j
    norm_sq: np.ndarray  # |T|^2 = T_ij T^ij per node


def torsion_from_phi(state: G2State, check_closed=True):
    """Torsion of a closed 3-form field; NotClosed above the tolerance."""
    if check_closed:
        res = state.closedness_residual()
        if res > CLOSED_TOL:
            raise NotClosed(f"closedness residual {res:.3e} exceeds {CLOSED_TOL}")
    gi = state.ginv
    star_up = np.einsum(
        "nja,nlb,nmc,npd,nabcd->njlmp", gi, gi, gi, gi, state.star_phi
    )
    Tud = np.einsum("nilmp,njlmp->nij", state.nabla_phi, star_up) / 24.0
    T = np.einsum("nij,njk->nik", Tud, state.g)
    norm_sq = np.einsum("nij,nia,njb,nab->n", T, gi, gi, T)
    return TorsionData(T=T, Tud=Tud, norm_sq=norm_sq)


def flow_h_tensor(state: G2State, tors: TorsionData = None):
    """h = -Ric - (1/3)|T|^2 g - 2 T.T (the symmetric 2-tensor of the flow)."""
    tors = tors or torsion_from_phi(state)
    TT = np.einsum("nik,nkj->nij", tors.Tud, tors.T)
    return -state.curv.Ric - (tors.norm_sq[:, None, None] / 3.0) * state.g - 2.0 * TT


def laplacian_flow_rhs(state: G2State, tors: TorsionData = None):
    """Hodge Laplacian of the closed 3-form, as a dense 3-form field."""
    h = flow_h_tensor(state, tors)
    mixed = np.einsum("nia,naj->nij", h, state.ginv)
    return al.i_phi_dense(state.phi, mixed)


def soliton_flow_residual(state, lam, xi, dxi=None):
    """Sup norm of Laplacian(phi) - lam*phi - L_X phi for radial X = xi e_0."""
    lap = laplacian_flow_rhs(state)
    lie = fr.lie_deriv_radial(
        state.geo, state.phi, xi, dphi=state.dphi, dxi=dxi,
        dphi4=state.dphi4,
    )
    resid = lap - lam * state.phi - lie
    n2 = fr.tensor_norm_sq(state.g, state.ginv, resid, "ddd") / 6.0
    return float(np.sqrt(np.maximum(n2, 0.0)).max())


# ---------------------------------------------------------------------------
# explicit time stepping
# ---------------------------------------------------------------------------


def stable_dt(state: G2State, safety=0.2):
    """Parabolic step bound: safety * (min radial spacing)^2 / curvature scale."""
    rm = fr.tensor_norm_sq(state.g, state.ginv, state.curv.Riem, "dddd")
    scale = max(1.0, float(np.sqrt(np.maximum(rm, 0.0)).max()))
    return safety * state.geo.grid.min_spacing ** 2 / scale


@dataclass
class FlowState:
    """One time slice of the 3-form flow."""

    time: float
    state: G2State

    @classmethod
    def from_phi(cls, geo, phi, time=0.0, name=""):
        return cls(time=time, state=G2State(geo=geo, phi=phi, name=name))


def _rhs(geo, phi, direction):
    try:
        state = G2State(geo=geo, phi=phi)
    except DegenerateForm:
        raise
    rhs = laplacian_flow_rhs(state)
    return rhs if direction == "forward" else -rhs


def step_flow(fstate: FlowState, dt, direction="forward", scheme="rk4",
              enforce_stability=True):
    """One explicit step of d(phi)/dt = Laplacian(phi) (or its negation)."""
    if direction not in ("forward", "backward"):
        raise ValueError("direction must be forward or backward")
    if scheme != "rk4":
        raise NotImplementedError("only the classical 4th-order scheme is provided")
    if enforce_stability:
        bound = stable_dt(fstate.state)
        if dt > bound:
            raise StabilityViolation(f"dt={dt:.3e} exceeds stability bound {bound:.3e}")
    geo, phi = fstate.state.geo, fstate.state.phi
    k1 = _rhs(geo, phi, direction)
    k2 = _rhs(geo, phi + 0.5 * dt * k1, direction)
    k3 = _rhs(geo, phi + 0.5 * dt * k2, direction)
    k4 = _rhs(geo, phi + dt * k3, direction)
    new_phi = phi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    sign = 1.0 if direction == "forward" else -1.0
    return FlowState(time=fstate.time + sign * dt,
                     state=G2State(geo=geo, phi=new_phi, name=fstate.state.name))


def run_flow(fstate: FlowState, dt, steps, direction="forward"):
    traj = [fstate]
    for _ in range(steps):
        traj.append(step_flow(traj[-1], dt, direction=direction))
    return traj


# ---------------------------------------------------------------------------
# trajectory diagnostics
# ---------------------------------------------------------------------------


@dataclass
class EvolutionReport:
    metric_evolution_residual: float
    volume_monotone: bool
    min_volume_increment: float
    closedness_drift: float


def _time_deriv_4th(stack, dt):
    """4th-order derivative in time at interior slices of a uniform stack."""
    n = stack.shape[0]
    if n < 5:
        raise ValueError("need at least 5 time slices")
    out = np.empty((n - 4,) + stack.shape[1:])
    for i in range(2, n - 2):
        out[i - 2] = (stack[i - 2] - 8 * stack[i - 1] + 8 * stack[i + 1] - stack[i + 2]) / (
            12.0 * dt
        )
    return out


def evolution_cross_check(traj):
    """Compare d(g)/dt along a forward trajectory with the flow identity.

    Reports the maximum residual of dg/dt + 2 Ric + (2/3)|T|^2 g + 4 T.T,
    the sign of the nodal volume increments, and the closedness drift.
    """
    if len(traj) < 5:
        raise ValueError("need a trajectory of at least 5 states")
    dts = np.diff([f.time for f in traj])
    if dts[0] <= 0 or np.abs(dts - dts[0]).max() > 1e-12 * abs(dts[0]):
        raise ValueError("cross-check expects a forward trajectory with uniform steps")
    dt = dts[0]
    gs = np.stack([f.state.g for f in traj])
    dg_dt = _time_deriv_4th(gs, dt)
    resid = 0.0
    for offset, fstate in enumerate(traj[2:-2]):
        st = fstate.state
        tors = torsion_from_phi(st, check_closed=False)
        TT = np.einsum("nik,nkj->nij", tors.Tud, tors.T)
        target = -2.0 * st.curv.Ric - (2.0 / 3.0) * tors.norm_sq[:, None, None] * st.g - 4.0 * TT
        r = dg_dt[offset] - target
        n2 = fr.tensor_norm_sq(st.g, st.ginv, r, "dd")
        resid = max(resid, float(np.sqrt(np.maximum(n2, 0.0)).max()))
    vols = np.stack([f.state.vol for f in traj])
    incr = np.diff(vols, axis=0)
    drift = max(f.state.closedness_residual() for f in traj)
    return EvolutionReport(
        metric_evolution_residual=resid,
        volume_monotone=bool((incr > 0).all()),
        min_volume_increment=float(incr.min()),
        closedness_drift=drift,
    )

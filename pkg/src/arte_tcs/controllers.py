"""Traction control laws.

Three anti-slip structures that share one call signature,

    update(v, w, t_applied, t_demand, dt) -> commanded torque

so the simulation loop can swap them freely:

ModelFollowingControl
    Integrates a nominal wheel-speed model driven by the demand and
    feeds back the high-pass-filtered speed error: T = T_dem - K * HPF(
    w - w_model).  The model inertia is the wheel plus the vehicle mass
    reflected through the contact at a nominal slip, J = Jw +
    M * r^2 * (1 - lambda); a road estimate can retune it on the fly.

SlipRatioControl
    PI regulation of the slip ratio around a target, on top of a
    friction feedforward r * N * mu_ref, clamped to the 300 N.m
    saturation.  Without a road estimate it assumes dry asphalt at the
    default target; with one, set_reference() installs the estimated
    peak-slip point.  Conditional anti-windup: the integrator freezes
    while the unsaturated command is pinned beyond an active limit.

MaxTransmissibleTorque
    First-order observer of the tire driving force from motor torque
    and wheel acceleration, then a torque ceiling

        T_max = (1 + c / alpha) * r * fd_hat,    c = Jw / (M/4 * r^2)

    with relaxation factor alpha in (0, 1]: smaller alpha admits more
    wheel acceleration headroom, larger alpha is more conservative.
    When the ceiling binds on a saturated surface the chassis/wheel
    acceleration ratio settles at alpha.  A road estimate additionally
    installs a grip ceiling alpha * r * fd_peak so the command never
    requests more than alpha of the transmissible traction torque;
    without road knowledge the observer path alone has to discover the
    limit, which it can only do after slip has developed.
"""

import math

from .errors import ConfigError
from .vehicle_plant import VehicleParams, first_order_lag, slip_ratio

MFC_GAIN_DEFAULT = 50.0
SRC_SATURATION_DEFAULT = 300.0
SRC_KP_DEFAULT = 50.0
SRC_KI_DEFAULT = 100.0
MTTE_ALPHA_DEFAULT = 0.80
MTTE_TORQUE_FLOOR = 10.0


class HighPassFilter:
    """First-order high-pass, bilinear discretization, tau in seconds."""

    def __init__(self, tau):
        if tau <= 0.0:
            raise ConfigError("high-pass time constant must be positive")
        self.tau = tau
        self._s = 0.0

    def reset(self):
        self._s = 0.0

    def step(self, x, dt):
        a = 2.0 * self.tau / dt
        b0 = a / (a + 1.0)
        a1 = (1.0 - a) / (a + 1.0)
        y = b0 * x + self._s
        self._s = -b0 * x - a1 * y
        return y


class ModelFollowingControl:
    def __init__(self, params=None, gain=MFC_GAIN_DEFAULT,
                 hp_tau=None, lambda_nominal=0.1):
        self.params = VehicleParams() if params is None else params
        if gain <= 0.0:
            raise ConfigError("MFC gain must be positive")
        self.gain = gain
        self.hpf = HighPassFilter(self.params.tau_hp if hp_tau is None else hp_tau)
        self.w_model = 0.0
        self.j_model = self._inertia(lambda_nominal)

    def _inertia(self, lam):
        p = self.params
        return p.jw + p.m_vehicle * p.r * p.r * (1.0 - lam)

    def set_slip_estimate(self, lam):
        """Retune the reference-model inertia for an estimated peak slip."""
        if not (0.0 <= lam <= 1.0):
            raise ConfigError("slip estimate must lie in [0, 1]")
        self.j_model = self._inertia(lam)

    def reset(self, w0=0.0):
        self.w_model = w0
        self.hpf.reset()

    def update(self, v, w, t_applied, t_demand, dt):
        lim = self.params.torque_limit
        t_dem = min(max(t_demand, 0.0), lim)
        self.w_model += dt * t_dem / self.j_model
        err = self.hpf.step(w - self.w_model, dt)
        t_cmd = t_dem - self.gain * err
        return min(max(t_cmd, 0.0), lim)


class SlipRatioControl:
    def __init__(self, params=None, kp=SRC_KP_DEFAULT, ki=SRC_KI_DEFAULT,
                 t_sat=SRC_SATURATION_DEFAULT, lambda_ref=0.1, mu_ref=None):
        self.params = VehicleParams() if params is None else params
        if kp < 0.0 or ki < 0.0:
            raise ConfigError("SRC gains must be non-negative")
        if not (0.0 < t_sat):
            raise ConfigError("SRC saturation must be positive")
        self.kp = kp
        self.ki = ki
        self.t_sat = t_sat
        self.integ = 0.0
        # default belief: dry asphalt friction at the default target slip
        if mu_ref is None:
            from .tire_road import DEFAULT_CURVES, RoadType
            mu_ref = float(DEFAULT_CURVES[RoadType.ASPHALT].mu(lambda_ref))
        self.set_reference(lambda_ref, mu_ref)

    def set_reference(self, lambda_ref, mu_ref):
        """Install a slip target and the friction level believed there."""
        if not (0.0 < lambda_ref < 1.0):
            raise ConfigError("slip target must lie in (0, 1)")
        if not (0.0 < mu_ref <= 1.5):
            raise ConfigError("reference friction must lie in (0, 1.5]")
        self.lambda_ref = lambda_ref
        self.base = self.params.r * self.params.normal_load() * mu_ref

    def reset(self):
        self.integ = 0.0

    def update(self, v, w, t_applied, t_demand, dt):
        p = self.params
        hi = min(max(t_demand, 0.0), p.torque_limit, self.t_sat)
        lam = slip_ratio(v, w, p.r)
        err = self.lambda_ref - lam
        u = self.base + self.kp * err + self.integ
        # integrate unless saturated with the error pushing further out
        if not ((u > hi and err > 0.0) or (u < 0.0 and err < 0.0)):
            self.integ += self.ki * err * dt
        if u > hi:
            return hi
        if u < 0.0:
            return 0.0
        return u


class MaxTransmissibleTorque:
    def __init__(self, params=None, alpha=MTTE_ALPHA_DEFAULT, tau_obs=None,
                 fd_hat0=0.0, t_floor=MTTE_TORQUE_FLOOR):
        self.params = VehicleParams() if params is None else params
        self.tau_obs = self.params.tau_motor if tau_obs is None else tau_obs
        if self.tau_obs <= 0.0:
            raise ConfigError("observer time constant must be positive")
        self.set_alpha(alpha)
        self.fd_hat = fd_hat0
        self.fd_peak = None
        self.t_floor = t_floor
        self._w_prev = None
        p = self.params
        self.c = p.jw / ((p.m_vehicle / 4.0) * p.r * p.r)

    def set_alpha(self, alpha):
        if not (0.0 < alpha <= 1.0):
            raise ConfigError("relaxation factor must lie in (0, 1]")
        self.alpha = alpha

    def set_road_estimate(self, alpha, fd_peak):
        """Adopt a surface-matched relaxation factor and grip ceiling."""
        if fd_peak <= 0.0:
            raise ConfigError("peak driving force must be positive")
        self.set_alpha(alpha)
        self.fd_peak = fd_peak

    def clear_road_estimate(self):
        self.fd_peak = None

    def reset(self, fd_hat0=0.0):
        self.fd_hat = fd_hat0
        self._w_prev = None

    def update(self, v, w, t_applied, t_demand, dt):
        p = self.params
        if self._w_prev is None:
            dw = 0.0
        else:
            dw = (w - self._w_prev) / dt
        self._w_prev = w
        fd_raw = (t_applied - p.jw * dw) / p.r
        self.fd_hat = first_order_lag(self.fd_hat, fd_raw, self.tau_obs, dt)

        t_max = (1.0 + self.c / self.alpha) * p.r * self.fd_hat
        if self.fd_peak is not None:
            t_grip = self.alpha * p.r * self.fd_peak
            if t_grip < t_max:
                t_max = t_grip
        if t_max < self.t_floor:
            t_max = self.t_floor
        t_dem = min(max(t_demand, 0.0), p.torque_limit)
        return t_dem if t_dem < t_max else t_max


class OpenLoop:
    """Pass the demand straight through (baseline, no slip control)."""

    def __init__(self, params=None):
        self.params = VehicleParams() if params is None else params

    def update(self, v, w, t_applied, t_demand, dt):
        lim = self.params.torque_limit
        return min(max(t_demand, 0.0), lim)

#   Licensed under the Apache License, Version 2.0 (the "License"); you may
#   not use this file except in compliance with the License. You may obtain
#   a copy of the License at
#
#        http://www.apache.org/licenses/LICENSE-2.0
#
#   Unless required by applicable law or agreed to in writing, software
#   distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#   WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#   License for the specific language governing permissions and limitations
#   under the License.

"""
Lyapunov, storage and energy functions and the region of attraction
estimates built from their sublevel sets.

The energy functions accept floats or numpy arrays for the state
coordinates. A :class:`RoaSet` is an immutable snapshot of one estimate,
holding the parameters it was computed for, its level and the scalars that
describe it.
"""

import collections
import dataclasses
import enum
import functools
import logging
import math

from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
from scipy import optimize

from swingsim import equilibria
from swingsim import exceptions
from swingsim import models


__all__ = ['RoaKind', 'RoaSet', 'SmibConstants',
           'v_load', 'vdot_load', 'w_storage', 'wdot_storage',
           'supply_rate', 'passivity_defect',
           'u_closed_loop', 'udot_closed_loop',
           'potential_smib', 'v_smib', 'vdot_smib_improved',
           'vdot_smib_conventional', 'delta_minus', 'smib_constants',
           'smib_conventional_level',
           'omega_s_set', 'omega_k_set', 'oval_set', 'smib_set',
           'smib_conventional_set', 'roa_set', 'default_roa_kind',
           'applies', 'roa_for_model', 'roa_contains', 'is_exceptional',
           'set_energy', 'instrumentation']


LOG = logging.getLogger(__name__)

Number = Any  # float or numpy array

DELTA_MINUS_XTOL = 1e-10
DELTA_MINUS_MAXITER = 200

CONDITION_SPEED = 'omega_star > sqrt(gamma/D_d)'
CONDITION_LOAD = '0 <= P_m/gamma < 2/pi'


class RoaKind(enum.Enum):
    """The region of attraction estimates."""
    OMEGA_S = 'omega-s'
    OMEGA_K = 'omega-k'
    OVAL_O = 'oval'
    SMIB_LEVEL_SET = 'smib'
    SMIB_CONVENTIONAL_LEVEL_SET = 'smib-conventional'

    @property
    def columns(self) -> Tuple[str, ...]:
        """The state coordinates the set is defined over."""
        if self is RoaKind.OVAL_O:
            return ('xi', 'omega')
        if self in (RoaKind.SMIB_LEVEL_SET,
                    RoaKind.SMIB_CONVENTIONAL_LEVEL_SET):
            return ('delta', 'omega')
        return ('omega',)


@dataclasses.dataclass(frozen=True)
class RoaSet:
    """
    A sublevel set {V <= level} estimating a region of attraction.

    ``constants`` holds the scalars that describe the set: the equilibria
    ``omega_s``/``omega_u`` (and ``u_bar``) for the load sets, ``J``,
    ``omega_star`` and ``xi_bar`` for the oval, and ``c``, ``c_k``, ``c_p``,
    ``delta_bar`` and ``delta_minus`` for the infinite-bus sets.
    """
    kind: RoaKind
    params: models.GeneratorParams
    level: float
    constants: Dict[str, float] = dataclasses.field(compare=False)

    @property
    def columns(self) -> Tuple[str, ...]:
        return self.kind.columns

    @property
    def center(self) -> Tuple[float, ...]:
        """The equilibrium the set is an estimate for."""
        if self.kind is RoaKind.OVAL_O:
            return (self.constants['xi_bar'], self.params.omega_star)
        if self.kind in (RoaKind.OMEGA_S, RoaKind.OMEGA_K):
            return (self.constants['omega_s'],)
        return (self.constants['delta_bar'], self.params.omega_star)


SmibConstants = collections.namedtuple('SmibConstants', [
        'c_k',
        'c_p',
        'c',
        'delta_minus',
        'delta_bar',
    ])


def _roots(p: models.GeneratorParams,
           u_bar: float = 0.0) -> Tuple[float, float]:
    pair = equilibria.equilibria_load(p, u_bar)
    if not pair.exists:
        raise exceptions.NoEquilibrium(
            f'discriminant {pair.delta_disc!r} is not positive')
    assert pair.omega_s is not None and pair.omega_u is not None
    return pair.omega_s, pair.omega_u


def v_load(p: models.GeneratorParams, omega: Number) -> Number:
    """The shifted kinetic energy (1/2) J (w - w_s)^2."""
    omega_s, _ = _roots(p)
    return 0.5 * p.J * (omega - omega_s) ** 2


def vdot_load(p: models.GeneratorParams, omega: Number) -> Number:
    """dV/dt = -D_d (w - w_s)^2 (1 - w_u/w) along the improved load
    model."""
    models.guard_speed(omega)
    omega_s, omega_u = _roots(p)
    return -p.D_d * (omega - omega_s) ** 2 * (1.0 - omega_u / omega)


def w_storage(p: models.GeneratorParams, omega: Number,
              omega_s_bar: float) -> Number:
    """
    The storage function (1/2) J (w - w_s)^2 w*/w_s.

    ``omega_s_bar`` is the stable equilibrium of the controlled model for the
    reference input.
    """
    if not omega_s_bar > 0:
        raise exceptions.NoEquilibrium(
            f'equilibrium speed {omega_s_bar!r} is not positive')
    return (0.5 * p.J * (omega - omega_s_bar) ** 2
            * p.omega_star / omega_s_bar)


def wdot_storage(p: models.GeneratorParams, omega: float,
                 u: float, u_bar: float = 0.0) -> float:
    """dW/dt along the controlled model with the constant input ``u``, for
    the storage function centred on the equilibrium for ``u_bar``."""
    omega_s, _ = _roots(p, u_bar)
    omega_dot = models.rhs_controlled(p, models.SimState(omega), u)
    return p.J * (omega - omega_s) * (p.omega_star / omega_s) * omega_dot


def supply_rate(p: models.GeneratorParams, omega: Number,
                u: Number, u_bar: float = 0.0) -> Number:
    """The incremental supply rate (y - y_bar)(u - u_bar)."""
    omega_s, _ = _roots(p, u_bar)
    y_bar = (omega_s - p.omega_star) / omega_s
    return (models.passivity_output(p, omega) - y_bar) * (u - u_bar)


def passivity_defect(p: models.GeneratorParams, omega: Number,
                     u_bar: float = 0.0) -> Number:
    """
    The closed form of dW/dt - (y - y_bar)(u - u_bar).

    This is -D_d (w - w_s)^2 (1 - w_u/w) (w*/w_s), which does not depend on
    the applied input. It is non-positive whenever w >= w_u.
    """
    models.guard_speed(omega)
    omega_s, omega_u = _roots(p, u_bar)
    return (-p.D_d * (omega - omega_s) ** 2 * (1.0 - omega_u / omega)
            * (p.omega_star / omega_s))


def _closed_loop_energy(p: models.GeneratorParams, omega: Number,
                        xi: Number) -> Number:
    xi_bar = p.P_m - p.P_e
    return 0.5 * (xi - xi_bar) ** 2 + 0.5 * p.J * (omega - p.omega_star) ** 2


def _closed_loop_rate(p: models.GeneratorParams, omega: Number,
                      xi: Number) -> Number:
    return -p.D_d * (omega - p.omega_star) ** 2


def u_closed_loop(p: models.GeneratorParams, s: models.SimState) -> float:
    """U = (1/2)(xi - xi_bar)^2 + (1/2) J (w - w*)^2 with
    xi_bar = P_m - P_e."""
    models.check_shape(models.ModelKind.IMPROVED_CLOSED_LOOP, s)
    return _closed_loop_energy(p, s.omega, s.xi)


def udot_closed_loop(p: models.GeneratorParams, s: models.SimState) -> float:
    models.check_shape(models.ModelKind.IMPROVED_CLOSED_LOOP, s)
    return _closed_loop_rate(p, s.omega, s.xi)


def _smib_model(model: models.ModelKind) -> models.ModelKind:
    if not model.smib:
        raise exceptions.ShapeMismatch(
            f'{model.value} is not an infinite-bus model')
    return model


def potential_smib(p: models.GeneratorParams, delta: Number,
                   model: models.ModelKind = models.ModelKind.SMIB_IMPROVED
                   ) -> Number:
    """
    The potential energy -cos(d) + cos(d_bar) - (d - d_bar) sin(d_bar),
    scaled by gamma/w* for the improved model and by gamma for the
    conventional one.
    """
    gamma = p.require_gamma()
    scale = gamma if _smib_model(model).conventional else gamma / p.omega_star
    delta_bar = equilibria.equilibrium_smib(p).delta_bar
    return scale * (-np.cos(delta) + math.cos(delta_bar)
                    - (delta - delta_bar) * math.sin(delta_bar))


def _smib_energy(p: models.GeneratorParams, model: models.ModelKind,
                 delta: Number, omega: Number) -> Number:
    inertia = p.M if model.conventional else p.J
    return (0.5 * inertia * (omega - p.omega_star) ** 2
            + potential_smib(p, delta, model))


def v_smib(p: models.GeneratorParams, s: models.SimState,
           model: models.ModelKind = models.ModelKind.SMIB_IMPROVED
           ) -> float:
    """The kinetic plus potential energy of an infinite-bus model."""
    models.check_shape(_smib_model(model), s)
    return _smib_energy(p, model, s.delta, s.omega)


def _smib_improved_rate(p: models.GeneratorParams, delta: Number,
                        omega: Number) -> Number:
    models.guard_speed(omega)
    gamma = p.require_gamma()
    sin_bar = p.P_m / gamma
    return -(omega - p.omega_star) ** 2 * (
        p.D_d - gamma / (omega * p.omega_star) * (np.sin(delta) - sin_bar))


def _smib_conventional_rate(p: models.GeneratorParams, delta: Number,
                            omega: Number) -> Number:
    return -p.A * (omega - p.omega_star) ** 2


def vdot_smib_improved(p: models.GeneratorParams,
                       s: models.SimState) -> float:
    models.check_shape(models.ModelKind.SMIB_IMPROVED, s)
    return _smib_improved_rate(p, s.delta, s.omega)


def vdot_smib_conventional(p: models.GeneratorParams,
                           s: models.SimState) -> float:
    models.check_shape(models.ModelKind.SMIB_CONVENTIONAL, s)
    return _smib_conventional_rate(p, s.delta, s.omega)


def _check_load_ratio(p: models.GeneratorParams) -> float:
    ratio = p.P_m / p.require_gamma()
    if not 0.0 <= ratio < equilibria.SMIB_LOAD_LIMIT:
        LOG.warning('P_m/gamma = %r is outside [0, 2/pi)', ratio)
        raise exceptions.ConditionViolated(
            CONDITION_LOAD, f'P_m/gamma is {ratio!r}')
    return ratio


def delta_minus(p: models.GeneratorParams,
                model: models.ModelKind = models.ModelKind.SMIB_IMPROVED
                ) -> float:
    """
    Return the lower end of the angle interval confined by V_p <= V_p(pi/2).

    This is the root in [-pi, d_bar) of V_p(d) = V_p(pi/2), equivalently of
    cos(d) = (pi/2 - d) sin(d_bar). V_p decreases monotonically on that
    interval, so bisection finds the unique root.
    """
    _check_load_ratio(p)
    delta_bar = equilibria.equilibrium_smib(p).delta_bar
    c_p = potential_smib(p, math.pi / 2, model)

    def excess(delta: float) -> float:
        return float(potential_smib(p, delta, model)) - c_p

    return float(optimize.bisect(excess, -math.pi, delta_bar,
                                 xtol=DELTA_MINUS_XTOL,
                                 maxiter=DELTA_MINUS_MAXITER))


def smib_constants(p: models.GeneratorParams) -> SmibConstants:
    """
    Return the constants of the improved SMIB region of attraction estimate.

    Raises ConditionViolated if w* <= sqrt(gamma/D_d) or if P_m/gamma is
    outside [0, 2/pi).
    """
    gamma = p.require_gamma()
    if not p.omega_star > math.sqrt(gamma / p.D_d):
        LOG.warning('omega_star %r does not exceed sqrt(gamma/D_d) = %r',
                    p.omega_star, math.sqrt(gamma / p.D_d))
        raise exceptions.ConditionViolated(
            CONDITION_SPEED, f'omega_star is {p.omega_star!r}')
    _check_load_ratio(p)
    delta_bar = equilibria.equilibrium_smib(p).delta_bar
    c_k = 0.5 * p.J * (p.omega_star - gamma / (p.D_d * p.omega_star)) ** 2
    c_p = float(potential_smib(p, math.pi / 2))
    return SmibConstants(c_k, c_p, min(c_k, c_p), delta_minus(p), delta_bar)


def smib_conventional_level(p: models.GeneratorParams) -> float:
    """The level V_p(pi/2) of the conventional SMIB estimate."""
    _check_load_ratio(p)
    return float(potential_smib(p, math.pi / 2,
                                models.ModelKind.SMIB_CONVENTIONAL))


def omega_s_set(p: models.GeneratorParams) -> RoaSet:
    pair = equilibria.equilibria_load(p)
    omega_s, omega_u = _roots(p)
    return RoaSet(RoaKind.OMEGA_S, p, 0.5 * p.J * pair.delta_disc,
                  {'omega_s': omega_s, 'omega_u': omega_u, 'u_bar': 0.0})


def omega_k_set(p: models.GeneratorParams, u_bar: float = 0.0) -> RoaSet:
    pair = equilibria.equilibria_load(p, u_bar)
    omega_s, omega_u = _roots(p, u_bar)
    level = 0.5 * p.J * pair.delta_disc * p.omega_star / omega_s
    return RoaSet(RoaKind.OMEGA_K, p, level,
                  {'omega_s': omega_s, 'omega_u': omega_u, 'u_bar': u_bar})


def oval_set(p: models.GeneratorParams) -> RoaSet:
    return RoaSet(RoaKind.OVAL_O, p, 0.5 * p.J * p.omega_star ** 2,
                  {'J': p.J, 'omega_star': p.omega_star,
                   'xi_bar': p.P_m - p.P_e})


def smib_set(p: models.GeneratorParams) -> RoaSet:
    consts = smib_constants(p)
    return RoaSet(RoaKind.SMIB_LEVEL_SET, p, consts.c,
                  dict(consts._asdict()))


def smib_conventional_set(p: models.GeneratorParams) -> RoaSet:
    level = smib_conventional_level(p)
    return RoaSet(RoaKind.SMIB_CONVENTIONAL_LEVEL_SET, p, level,
                  {'c': level, 'c_p': level,
                   'delta_bar': equilibria.equilibrium_smib(p).delta_bar,
                   'delta_minus': delta_minus(
                       p, models.ModelKind.SMIB_CONVENTIONAL)})


_BUILDERS: Dict[RoaKind, Callable[[models.GeneratorParams], RoaSet]] = {
    RoaKind.OMEGA_S: omega_s_set,
    RoaKind.OVAL_O: oval_set,
    RoaKind.SMIB_LEVEL_SET: smib_set,
    RoaKind.SMIB_CONVENTIONAL_LEVEL_SET: smib_conventional_set,
}


def roa_set(kind: RoaKind, p: models.GeneratorParams,
            u_bar: float = 0.0) -> RoaSet:
    if kind is RoaKind.OMEGA_K:
        return omega_k_set(p, u_bar)
    return _BUILDERS[kind](p)


_MODEL_SETS = {
    models.ModelKind.IMPROVED_LOAD: RoaKind.OMEGA_S,
    models.ModelKind.IMPROVED_LOAD_WITH_LOSSES: RoaKind.OMEGA_S,
    models.ModelKind.IMPROVED_CLOSED_LOOP: RoaKind.OVAL_O,
    models.ModelKind.SMIB_IMPROVED: RoaKind.SMIB_LEVEL_SET,
    models.ModelKind.SMIB_CONVENTIONAL: RoaKind.SMIB_CONVENTIONAL_LEVEL_SET,
}

# Which models each estimate is a statement about
_SET_MODELS = {
    RoaKind.OMEGA_S: (models.ModelKind.IMPROVED_LOAD,
                      models.ModelKind.IMPROVED_LOAD_WITH_LOSSES),
    RoaKind.OMEGA_K: (models.ModelKind.IMPROVED_LOAD,),
    RoaKind.OVAL_O: (models.ModelKind.IMPROVED_CLOSED_LOOP,),
    RoaKind.SMIB_LEVEL_SET: (models.ModelKind.SMIB_IMPROVED,),
    RoaKind.SMIB_CONVENTIONAL_LEVEL_SET: (
        models.ModelKind.SMIB_CONVENTIONAL,),
}


def default_roa_kind(model: models.ModelKind) -> Optional[RoaKind]:
    """Return the estimate that applies to ``model``, if there is one."""
    return _MODEL_SETS.get(model)


def _model_params(model: models.ModelKind,
                  p: models.GeneratorParams) -> models.GeneratorParams:
    if model is models.ModelKind.IMPROVED_LOAD_WITH_LOSSES:
        return equilibria.reduce_losses(p)
    return p


def applies(kind: RoaKind, model: models.ModelKind) -> bool:
    """Return whether estimate ``kind`` is a statement about ``model``."""
    return model in _SET_MODELS[kind]


def _check_applies(kind: RoaKind, model: models.ModelKind) -> None:
    if not applies(kind, model):
        raise exceptions.InvalidConfig(
            f'the {kind.value} estimate does not apply to {model.value}')


def roa_for_model(model: models.ModelKind, p: models.GeneratorParams,
                  kind: Optional[RoaKind] = None) -> Optional[RoaSet]:
    """
    Return the region of attraction estimate for ``model``.

    With mechanical losses the estimate is built on the reduced parameters.
    Returns None if no estimate applies (the conventional load model).
    """
    if kind is None:
        kind = default_roa_kind(model)
        if kind is None:
            return None
    _check_applies(kind, model)
    return roa_set(kind, _model_params(model, p))


def set_energy(roa: RoaSet, *coords: Number) -> Number:
    """Evaluate the energy function of ``roa`` at coordinates given in the
    order of ``roa.columns``."""
    p = roa.params
    if roa.kind is RoaKind.OMEGA_S:
        return v_load(p, coords[0])
    if roa.kind is RoaKind.OMEGA_K:
        return w_storage(p, coords[0], roa.constants['omega_s'])
    if roa.kind is RoaKind.OVAL_O:
        xi, omega = coords
        return _closed_loop_energy(p, omega, xi)
    model = (models.ModelKind.SMIB_CONVENTIONAL
             if roa.kind is RoaKind.SMIB_CONVENTIONAL_LEVEL_SET
             else models.ModelKind.SMIB_IMPROVED)
    delta, omega = coords
    return _smib_energy(p, model, delta, omega)


def _coordinates(roa: RoaSet, state: models.SimState) -> Tuple[float, ...]:
    wants_delta = 'delta' in roa.columns
    wants_xi = 'xi' in roa.columns
    if ((state.delta is not None) != wants_delta
            or (state.xi is not None) != wants_xi):
        raise exceptions.ShapeMismatch(
            f'state {state} does not match the {roa.kind.value} set')
    return tuple(getattr(state, name) for name in roa.columns)


def roa_contains(roa: RoaSet, state: models.SimState) -> bool:
    """
    Return whether ``state`` lies in the set.

    Points on the boundary are inside. The load sets only contain positive
    speeds and the infinite-bus sets only angles in [-pi, pi].
    """
    coords = _coordinates(roa, state)
    if roa.kind in (RoaKind.OMEGA_S, RoaKind.OMEGA_K) and not state.omega > 0:
        return False
    if 'delta' in roa.columns:
        assert state.delta is not None
        if not -math.pi <= state.delta <= math.pi:
            return False
    return bool(set_energy(roa, *coords) <= roa.level)


def is_exceptional(roa: RoaSet, state: models.SimState) -> bool:
    """
    Return whether ``state`` is an initial condition excluded from the
    convergence guarantee of the set.

    These are the unstable equilibrium w_u of the load sets and the point
    (xi, w) = (P_m - P_e, 0) of the oval.
    """
    _coordinates(roa, state)
    if roa.kind in (RoaKind.OMEGA_S, RoaKind.OMEGA_K):
        return math.isclose(state.omega, roa.constants['omega_u'],
                            rel_tol=1e-12, abs_tol=1e-9)
    if roa.kind is RoaKind.OVAL_O:
        assert state.xi is not None
        return (math.isclose(state.xi, roa.constants['xi_bar'],
                             rel_tol=1e-12, abs_tol=1e-9)
                and math.isclose(state.omega, 0.0, abs_tol=1e-9))
    return False


Instrument = Callable[..., Number]


def instrumentation(kind: RoaKind, model: models.ModelKind,
                    p: models.GeneratorParams) -> Tuple[Instrument,
                                                        Instrument]:
    """
    Return the functions (V, dV/dt) of estimate ``kind`` along ``model``.

    Both take the state components in the order of ``model.components`` and
    accept numpy arrays.
    """
    _check_applies(kind, model)
    q = _model_params(model, p)
    if kind is RoaKind.OMEGA_S:
        return (functools.partial(v_load, q),
                functools.partial(vdot_load, q))
    if kind is RoaKind.OMEGA_K:
        omega_s, _ = _roots(q)
        return (lambda omega: w_storage(q, omega, omega_s),
                functools.partial(passivity_defect, q))
    if kind is RoaKind.OVAL_O:
        return (functools.partial(_closed_loop_energy, q),
                functools.partial(_closed_loop_rate, q))
    if kind is RoaKind.SMIB_LEVEL_SET:
        return (functools.partial(_smib_energy, q, model),
                functools.partial(_smib_improved_rate, q))
    return (functools.partial(_smib_energy, q, model),
            functools.partial(_smib_conventional_rate, q))


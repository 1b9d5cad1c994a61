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
Parameters, states and vector fields of the swing-equation models.

Angular speeds are in rad/s throughout; powers are per-unit. Frequencies in
Hz only appear through :meth:`SimState.from_frequency` and
:attr:`SimState.frequency`.

All of the right-hand-side functions are pure. The private field functions
accept either floats or numpy arrays, so the integrator can evaluate many
trajectories at once.
"""

import collections
import dataclasses
import enum
import functools
import math

import typing
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from swingsim import exceptions


__all__ = ['OMEGA_EPSILON', 'ModelKind', 'GeneratorParams', 'SimState',
           'check_shape', 'guard_speed', 'vector_field',
           'rhs_conventional_load', 'rhs_improved_load',
           'rhs_improved_losses', 'rhs_closed_loop', 'rhs_controlled',
           'rhs_smib_improved', 'rhs_smib_conventional',
           'passivity_output', 'power_to_torque', 'torque_to_power',
           'hz_to_rad', 'rad_to_hz']


# The improved models divide by the rotor speed; evaluating them at or below
# this speed is an error rather than a clamp.
OMEGA_EPSILON = 1e-6

Number = Any  # float or numpy array


def hz_to_rad(frequency: Number) -> Number:
    return 2.0 * math.pi * frequency


def rad_to_hz(omega: Number) -> Number:
    return omega / (2.0 * math.pi)


class ModelKind(enum.Enum):
    """The dynamical systems that can be evaluated and integrated."""
    CONVENTIONAL_LOAD = 'conventional-load'
    IMPROVED_LOAD = 'improved-load'
    IMPROVED_LOAD_WITH_LOSSES = 'improved-losses'
    IMPROVED_CLOSED_LOOP = 'closed-loop'
    SMIB_IMPROVED = 'smib-improved'
    SMIB_CONVENTIONAL = 'smib-conventional'

    @property
    def components(self) -> Tuple[str, ...]:
        """The state components, in the order used by the vector field."""
        if self.smib:
            return ('delta', 'omega')
        if self is ModelKind.IMPROVED_CLOSED_LOOP:
            return ('omega', 'xi')
        return ('omega',)

    @property
    def smib(self) -> bool:
        return self in (ModelKind.SMIB_IMPROVED, ModelKind.SMIB_CONVENTIONAL)

    @property
    def conventional(self) -> bool:
        return self in (ModelKind.CONVENTIONAL_LOAD,
                        ModelKind.SMIB_CONVENTIONAL)

    @property
    def divides_by_speed(self) -> bool:
        """Whether the singularity guard applies to this model."""
        return not self.conventional


@dataclasses.dataclass(frozen=True)
class GeneratorParams:
    """
    The physical constants of one machine and its operating scenario.

    ``J`` (kg m^2), ``D_d`` and ``D_m`` (N m s) and ``omega_star`` (rad/s)
    describe the machine. ``P_m`` and ``P_e`` are per-unit powers and
    ``gamma`` is the per-unit coupling to an infinite bus, required only by
    the SMIB models.

    The conventional constants ``M = J omega_star`` and
    ``A = D_d omega_star`` are derived and read-only.
    """
    J: float
    D_d: float
    omega_star: float
    P_m: float = 0.0
    P_e: float = 0.0
    gamma: Optional[float] = None
    D_m: float = 0.0
    M: float = dataclasses.field(init=False, repr=False, compare=False)
    A: float = dataclasses.field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        for name in ('J', 'D_d', 'omega_star', 'P_m', 'P_e', 'D_m'):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise exceptions.InvalidParameters(
                    f'{name} must be a finite number, got {value!r}')
        if self.J <= 0:
            raise exceptions.InvalidParameters(f'J must be positive, '
                                               f'got {self.J!r}')
        if self.D_d <= 0:
            raise exceptions.InvalidParameters(f'D_d must be positive, '
                                               f'got {self.D_d!r}')
        if self.D_m < 0:
            raise exceptions.InvalidParameters(f'D_m must not be negative, '
                                               f'got {self.D_m!r}')
        if self.omega_star <= 0:
            raise exceptions.InvalidParameters(f'omega_star must be positive, '
                                               f'got {self.omega_star!r}')
        if self.gamma is not None and not (
                isinstance(self.gamma, (int, float))
                and math.isfinite(self.gamma) and self.gamma > 0):
            raise exceptions.InvalidParameters(f'gamma must be positive, '
                                               f'got {self.gamma!r}')
        object.__setattr__(self, 'M', self.J * self.omega_star)
        object.__setattr__(self, 'A', self.D_d * self.omega_star)

    @classmethod
    def per_unit(cls, M: float, A: float, omega_star: float,
                 **kwargs: Any) -> 'GeneratorParams':
        """
        Build parameters from the conventional constants M and A.

        J and D_d are derived as M/omega_star and A/omega_star, and M and A
        are kept exactly as given.
        """
        params = cls(J=M / omega_star, D_d=A / omega_star,
                     omega_star=omega_star, **kwargs)
        object.__setattr__(params, 'M', M)
        object.__setattr__(params, 'A', A)
        return params

    def replace(self, **changes: Any) -> 'GeneratorParams':
        return dataclasses.replace(self, **changes)

    def require_gamma(self) -> float:
        if self.gamma is None:
            raise exceptions.InvalidParameters(
                'gamma is required for an infinite-bus model')
        return self.gamma

    def as_dict(self) -> Dict[str, Optional[float]]:
        return {
            'J': self.J,
            'D_d': self.D_d,
            'D_m': self.D_m,
            'omega_star': self.omega_star,
            'P_m': self.P_m,
            'P_e': self.P_e,
            'gamma': self.gamma,
            'M': self.M,
            'A': self.A,
        }


@dataclasses.dataclass(frozen=True)
class SimState:
    """
    A point in the state space of one of the models.

    ``omega`` is the rotor speed (rad/s). ``delta`` is the angle relative to
    the infinite bus (rad), present only for SMIB models, and ``xi`` is the
    integral controller state (per-unit power), present only for the closed
    loop.
    """
    omega: float
    delta: Optional[float] = None
    xi: Optional[float] = None

    @classmethod
    def from_frequency(cls, frequency: float,
                       delta: Optional[float] = None,
                       xi: Optional[float] = None) -> 'SimState':
        return cls(omega=hz_to_rad(frequency), delta=delta, xi=xi)

    @classmethod
    def from_components(cls, model: ModelKind,
                        values: typing.Sequence[float]) -> 'SimState':
        return cls(**{name: float(v)
                      for name, v in zip(model.components, values)})

    @property
    def frequency(self) -> float:
        """The electrical frequency in Hz."""
        return rad_to_hz(self.omega)

    def components(self, model: ModelKind) -> Tuple[float, ...]:
        check_shape(model, self)
        return tuple(getattr(self, name) for name in model.components)


def check_shape(model: ModelKind, state: SimState) -> None:
    """Raise ShapeMismatch unless the state carries exactly what ``model``
    needs."""
    if (state.delta is not None) != model.smib:
        raise exceptions.ShapeMismatch(
            f'{model.value} requires delta to be '
            f'{"present" if model.smib else "absent"}')
    closed_loop = model is ModelKind.IMPROVED_CLOSED_LOOP
    if (state.xi is not None) != closed_loop:
        raise exceptions.ShapeMismatch(
            f'{model.value} requires xi to be '
            f'{"present" if closed_loop else "absent"}')


def guard_speed(omega: Number) -> None:
    """Raise SingularState if any speed is at or below OMEGA_EPSILON."""
    if np.any(np.asarray(omega) <= OMEGA_EPSILON):
        raise exceptions.SingularState(omega)


def _conventional_load(p: GeneratorParams,
                       omega: Number) -> Tuple[Number]:
    return ((p.P_m - p.P_e - p.A * (omega - p.omega_star)) / p.M,)


def _improved_load(p: GeneratorParams, omega: Number,
                   u: Number = 0.0) -> Tuple[Number]:
    # J w dw/dt + D_d w (w - w*) = u + P_m - P_e
    return ((u + p.P_m - p.P_e - p.D_d * omega * (omega - p.omega_star))
            / (p.J * omega),)


def _improved_losses(p: GeneratorParams, omega: Number) -> Tuple[Number]:
    return ((p.P_m - p.P_e - p.D_m * omega * omega
             - p.D_d * omega * (omega - p.omega_star)) / (p.J * omega),)


def _closed_loop(p: GeneratorParams, omega: Number,
                 xi: Number) -> Tuple[Number, Number]:
    (omega_dot,) = _improved_load(p, omega, -xi)
    return omega_dot, (omega - p.omega_star) / omega


def _smib_improved(p: GeneratorParams, delta: Number,
                   omega: Number) -> Tuple[Number, Number]:
    gamma = p.require_gamma()
    return (omega - p.omega_star,
            (p.P_m - gamma * np.sin(delta)
             - p.D_d * omega * (omega - p.omega_star)) / (p.J * omega))


def _smib_conventional(p: GeneratorParams, delta: Number,
                       omega: Number) -> Tuple[Number, Number]:
    gamma = p.require_gamma()
    return (omega - p.omega_star,
            (p.P_m - gamma * np.sin(delta)
             - p.A * (omega - p.omega_star)) / p.M)


_FIELDS: Dict[ModelKind, Callable[..., Tuple[Number, ...]]] = {
    ModelKind.CONVENTIONAL_LOAD: _conventional_load,
    ModelKind.IMPROVED_LOAD: _improved_load,
    ModelKind.IMPROVED_LOAD_WITH_LOSSES: _improved_losses,
    ModelKind.IMPROVED_CLOSED_LOOP: _closed_loop,
    ModelKind.SMIB_IMPROVED: _smib_improved,
    ModelKind.SMIB_CONVENTIONAL: _smib_conventional,
}


def vector_field(model: ModelKind,
                 params: GeneratorParams) -> Callable[...,
                                                      Tuple[Number, ...]]:
    """
    Return the right-hand side of ``model`` as a function of its components.

    The returned function takes the components in the order given by
    ``model.components`` (floats or equally shaped arrays) and returns the
    tuple of their time derivatives. No singularity guard is applied.
    """
    if model.smib:
        params.require_gamma()
    return functools.partial(_FIELDS[model], params)


def rhs_conventional_load(p: GeneratorParams, s: SimState) -> float:
    """dw/dt of the conventional swing equation with a constant load."""
    check_shape(ModelKind.CONVENTIONAL_LOAD, s)
    return _conventional_load(p, s.omega)[0]


def rhs_improved_load(p: GeneratorParams, s: SimState) -> float:
    """dw/dt of the improved swing equation with a constant load."""
    check_shape(ModelKind.IMPROVED_LOAD, s)
    guard_speed(s.omega)
    return _improved_load(p, s.omega)[0]


def rhs_improved_losses(p: GeneratorParams, s: SimState) -> float:
    """dw/dt of the improved swing equation with viscous mechanical
    losses."""
    check_shape(ModelKind.IMPROVED_LOAD_WITH_LOSSES, s)
    guard_speed(s.omega)
    return _improved_losses(p, s.omega)[0]


def rhs_controlled(p: GeneratorParams, s: SimState, u: float) -> float:
    """dw/dt of the improved load model driven by the power input ``u``."""
    check_shape(ModelKind.IMPROVED_LOAD, s)
    guard_speed(s.omega)
    return _improved_load(p, s.omega, u)[0]


def passivity_output(p: GeneratorParams, omega: Number) -> Number:
    """The dimensionless output y = (w - w*)/w of the controlled model."""
    guard_speed(omega)
    return (omega - p.omega_star) / omega


ClosedLoopDerivative = collections.namedtuple('ClosedLoopDerivative', [
        'omega_dot',
        'xi_dot',
    ])

SmibDerivative = collections.namedtuple('SmibDerivative', [
        'delta_dot',
        'omega_dot',
    ])


def rhs_closed_loop(p: GeneratorParams,
                    s: SimState) -> ClosedLoopDerivative:
    """
    Derivatives of the improved load model under integral control.

    The controller integrates the output, d(xi)/dt = (w - w*)/w, and feeds
    back u = -xi.
    """
    check_shape(ModelKind.IMPROVED_CLOSED_LOOP, s)
    guard_speed(s.omega)
    assert s.xi is not None
    return ClosedLoopDerivative(*_closed_loop(p, s.omega, s.xi))


def rhs_smib_improved(p: GeneratorParams, s: SimState) -> SmibDerivative:
    check_shape(ModelKind.SMIB_IMPROVED, s)
    guard_speed(s.omega)
    return SmibDerivative(*_smib_improved(p, s.delta, s.omega))


def rhs_smib_conventional(p: GeneratorParams,
                          s: SimState) -> SmibDerivative:
    check_shape(ModelKind.SMIB_CONVENTIONAL, s)
    return SmibDerivative(*_smib_conventional(p, s.delta, s.omega))


def power_to_torque(power: Number, omega: Number) -> Number:
    """Convert a per-unit power to the torque it exerts at speed omega."""
    guard_speed(omega)
    return power / omega


def torque_to_power(torque: Number, omega: Number) -> Number:
    guard_speed(omega)
    return torque * omega

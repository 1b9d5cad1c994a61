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
Fixed-step fourth-order Runge-Kutta integration of the swing models.

:func:`integrate` follows a single initial state and records a sampled
:class:`Trajectory`. :func:`integrate_batch` advances many initial states in
lock-step on numpy arrays and only reports how each one ended.

Every run ends with one of four verdicts. A run has *converged* once the norm
of the state derivative has stayed below ``conv_tol`` for
:data:`CALM_STEPS` consecutive steps. It has *diverged* once the speed
deviation exceeds the divergence bound (or, for the infinite-bus models, the
angle exceeds ``angle_bound``). It has *hit the singularity* when a model
that divides by the speed reaches a Runge-Kutta stage or step at or below
:data:`swingsim.models.OMEGA_EPSILON`. Otherwise it runs out of time.
"""

import collections
import dataclasses
import enum
import logging
import math

from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np

from swingsim import exceptions
from swingsim import lyapunov
from swingsim import models


__all__ = ['CALM_STEPS', 'Verdict', 'IntegrationConfig', 'Outcome',
           'Sample', 'Trajectory', 'StepCheck', 'integrate',
           'integrate_batch', 'halve_step_check']


LOG = logging.getLogger(__name__)

CALM_STEPS = 100

_DIVERGENCE_FACTOR = 10.0


class Verdict(enum.Enum):
    CONVERGED = 'converged'
    DIVERGED = 'diverged'
    HIT_SINGULARITY = 'hit-singularity'
    MAX_TIME = 'max-time'


_VERDICT_CODES = list(Verdict)


@dataclasses.dataclass(frozen=True)
class IntegrationConfig:
    """
    Settings for one integration.

    ``div_bound`` defaults to 10 w* of the model being integrated.
    ``sample_every`` records every k-th step of :func:`integrate`; the
    initial and final states are always recorded. ``angle_bound`` only
    applies to the infinite-bus models and is off by default.
    """
    dt: float = 1e-4
    t_max: float = 300.0
    conv_tol: float = 1e-4
    div_bound: Optional[float] = None
    lyap_kind: Optional[lyapunov.RoaKind] = None
    sample_every: int = 1
    angle_bound: Optional[float] = None

    def __post_init__(self) -> None:
        for name in ('dt', 't_max', 'conv_tol'):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)
                    and value > 0):
                raise exceptions.InvalidConfig(
                    f'{name} must be a positive number, got {value!r}')
        if self.t_max < self.dt:
            raise exceptions.InvalidConfig(
                f't_max ({self.t_max!r}) must not be less than '
                f'dt ({self.dt!r})')
        for name in ('div_bound', 'angle_bound'):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise exceptions.InvalidConfig(
                    f'{name} must be positive, got {value!r}')
        if (not isinstance(self.sample_every, int)
                or isinstance(self.sample_every, bool)
                or self.sample_every < 1):
            raise exceptions.InvalidConfig(
                f'sample_every must be a positive integer, '
                f'got {self.sample_every!r}')
        if self.lyap_kind is not None and not isinstance(self.lyap_kind,
                                                         lyapunov.RoaKind):
            raise exceptions.InvalidConfig(
                f'lyap_kind must be a RoaKind, got {self.lyap_kind!r}')

    @property
    def n_steps(self) -> int:
        """The number of steps needed to reach t_max."""
        return int(math.floor(self.t_max / self.dt + 1e-9))

    def divergence_bound(self, p: models.GeneratorParams) -> float:
        if self.div_bound is not None:
            return self.div_bound
        return _DIVERGENCE_FACTOR * p.omega_star

    def replace(self, **changes: Any) -> 'IntegrationConfig':
        return dataclasses.replace(self, **changes)


Outcome = collections.namedtuple('Outcome', [
        'verdict',
        'state',
        'time',
    ])
Outcome.__doc__ = """How a run ended: the verdict, the last valid state and
its time."""

Sample = collections.namedtuple('Sample', ['t', 'state', 'V', 'Vdot'])


@dataclasses.dataclass(frozen=True, eq=False)
class Trajectory:
    """
    The recorded samples of one integration and its outcome.

    ``values`` has one row per sample and one column per component of the
    model (in the order of ``model.components``). ``V`` and ``Vdot`` are
    present when the run was instrumented.
    """
    model: models.ModelKind
    times: np.ndarray
    values: np.ndarray
    outcome: Outcome
    V: Optional[np.ndarray] = None
    Vdot: Optional[np.ndarray] = None

    @property
    def verdict(self) -> Verdict:
        return self.outcome.verdict

    @property
    def final(self) -> models.SimState:
        return self.outcome.state

    def __len__(self) -> int:
        return len(self.times)

    def column(self, name: str) -> Optional[np.ndarray]:
        """Return the samples of one component, or None if the model does
        not have it."""
        try:
            index = self.model.components.index(name)
        except ValueError:
            return None
        return self.values[:, index]

    def states(self) -> List[models.SimState]:
        return [models.SimState.from_components(self.model, row)
                for row in self.values]

    def samples(self) -> List[Sample]:
        return [Sample(float(t), state,
                       None if self.V is None else float(self.V[i]),
                       None if self.Vdot is None else float(self.Vdot[i]))
                for i, (t, state) in enumerate(zip(self.times,
                                                   self.states()))]


StepCheck = collections.namedtuple('StepCheck', ['error', 'flagged'])


Field = Callable[..., Tuple[Any, ...]]


def _rk4_scalar(field: Field, y: Tuple[float, ...], k1: Tuple[float, ...],
                dt: float, speed: Optional[int]
                ) -> Optional[Tuple[float, ...]]:
    """Take one step from ``y``. Returns None if a stage or the new speed is
    singular; ``speed`` is the index of the guarded component."""
    half = 0.5 * dt
    y2 = tuple(a + half * k for a, k in zip(y, k1))
    if speed is not None and not y2[speed] > models.OMEGA_EPSILON:
        return None
    k2 = field(*y2)
    y3 = tuple(a + half * k for a, k in zip(y, k2))
    if speed is not None and not y3[speed] > models.OMEGA_EPSILON:
        return None
    k3 = field(*y3)
    y4 = tuple(a + dt * k for a, k in zip(y, k3))
    if speed is not None and not y4[speed] > models.OMEGA_EPSILON:
        return None
    k4 = field(*y4)
    sixth = dt / 6.0
    y_next = tuple(a + sixth * (b + 2.0 * c + 2.0 * d + e)
                   for a, b, c, d, e in zip(y, k1, k2, k3, k4))
    if speed is not None and not y_next[speed] > models.OMEGA_EPSILON:
        return None
    return y_next


def _rk4_lanes(field: Field, y: List[np.ndarray], k1: Tuple[Any, ...],
               dt: float, speed: Optional[int]
               ) -> Tuple[List[np.ndarray], np.ndarray]:
    """Take one step on every lane. Returns the new lanes and the mask of
    lanes for which a stage or the new speed was singular."""
    half = 0.5 * dt
    singular = np.zeros(len(y[0]), dtype=bool)
    ks = [k1]
    for scale in (half, half, dt):
        stage = [a + scale * k for a, k in zip(y, ks[-1])]
        if speed is not None:
            singular |= ~(stage[speed] > models.OMEGA_EPSILON)
        ks.append(field(*stage))
    _, k2, k3, k4 = ks
    sixth = dt / 6.0
    y_next = [a + sixth * (b + 2.0 * c + 2.0 * d + e)
              for a, b, c, d, e in zip(y, k1, k2, k3, k4)]
    if speed is not None:
        singular |= ~(y_next[speed] > models.OMEGA_EPSILON)
    return y_next, singular


def _speed_index(model: models.ModelKind) -> int:
    return model.components.index('omega')


def _initial_components(model: models.ModelKind,
                        s0: models.SimState) -> Tuple[float, ...]:
    values = tuple(float(v) for v in s0.components(model))
    if not all(math.isfinite(v) for v in values):
        raise exceptions.InvalidConfig(f'initial state {s0} is not finite')
    return values


def integrate(model: models.ModelKind, p: models.GeneratorParams,
              s0: models.SimState,
              cfg: IntegrationConfig) -> Trajectory:
    """
    Integrate ``model`` from ``s0`` and return the recorded trajectory.

    Raises ShapeMismatch if ``s0`` does not match the model and
    SingularState if a model that divides by the speed starts at or below
    the singularity guard.
    """
    y = _initial_components(model, s0)
    omega_at = _speed_index(model)
    guarded = model.divides_by_speed
    if guarded:
        models.guard_speed(y[omega_at])
    if cfg.lyap_kind is not None:
        v_func, vdot_func = lyapunov.instrumentation(cfg.lyap_kind, model, p)

    field = models.vector_field(model, p)
    bound = cfg.divergence_bound(p)
    angle_at = model.components.index('delta') if model.smib else None
    angle_bound = cfg.angle_bound if model.smib else None
    speed = omega_at if guarded else None
    failed = Verdict.HIT_SINGULARITY if guarded else Verdict.DIVERGED
    dt = cfg.dt
    n_steps = cfg.n_steps

    times = []
    rows = []
    calm = 0
    step = 0
    verdict = Verdict.MAX_TIME
    with np.errstate(all='ignore'):
        while True:
            if step % cfg.sample_every == 0:
                times.append(step * dt)
                rows.append(y)
            if abs(y[omega_at] - p.omega_star) > bound:
                verdict = Verdict.DIVERGED
                break
            if angle_bound is not None and abs(y[angle_at]) > angle_bound:
                verdict = Verdict.DIVERGED
                break
            k1 = field(*y)
            norm = math.sqrt(sum(float(k) * float(k) for k in k1))
            if not math.isfinite(norm):
                verdict = failed
                break
            calm = calm + 1 if norm < cfg.conv_tol else 0
            if calm >= CALM_STEPS:
                verdict = Verdict.CONVERGED
                break
            if step >= n_steps:
                break
            y_next = _rk4_scalar(field, y, k1, dt, speed)
            if y_next is None or not all(map(math.isfinite, y_next)):
                verdict = failed
                break
            y = y_next
            step += 1

    if not times or times[-1] != step * dt:
        times.append(step * dt)
        rows.append(y)
    outcome = Outcome(verdict, models.SimState.from_components(model, y),
                      step * dt)
    LOG.debug('%s run from %s ended %s at t=%r', model.value, s0,
              verdict.value, outcome.time)

    values = np.array(rows, dtype=float)
    columns = [values[:, i] for i in range(values.shape[1])]
    V = Vdot = None
    if cfg.lyap_kind is not None:
        V = np.asarray(v_func(*columns), dtype=float)
        Vdot = np.asarray(vdot_func(*columns), dtype=float)
    return Trajectory(model, np.array(times, dtype=float), values, outcome,
                      V, Vdot)


def integrate_batch(model: models.ModelKind, p: models.GeneratorParams,
                    states: Sequence[models.SimState],
                    cfg: IntegrationConfig) -> List[Outcome]:
    """
    Integrate every state in ``states`` and return their outcomes in order.

    Each lane ends under the same rules as :func:`integrate`, and its state
    is frozen once it has ended. A lane that starts at or below the
    singularity guard of a model dividing by the speed ends immediately with
    HIT_SINGULARITY rather than raising.
    """
    if not states:
        return []
    start = np.array([_initial_components(model, s) for s in states],
                     dtype=float)
    omega_at = _speed_index(model)
    guarded = model.divides_by_speed
    field = models.vector_field(model, p)
    bound = cfg.divergence_bound(p)
    angle_at = model.components.index('delta') if model.smib else None
    angle_bound = cfg.angle_bound if model.smib else None
    speed = omega_at if guarded else None
    failed = Verdict.HIT_SINGULARITY if guarded else Verdict.DIVERGED
    dt = cfg.dt
    n_steps = cfg.n_steps

    count = len(states)
    codes = np.full(count, -1, dtype=np.int8)
    ended_at = np.zeros(count, dtype=np.int64)
    final = start.copy()

    lanes = np.arange(count)
    y = [start[:, i].copy() for i in range(start.shape[1])]
    calm = np.zeros(count, dtype=np.int64)

    def finish(mask: np.ndarray, verdict: Verdict, step: int) -> None:
        if not mask.any():
            return
        which = lanes[mask]
        codes[which] = _VERDICT_CODES.index(verdict)
        ended_at[which] = step
        for i, column in enumerate(y):
            final[which, i] = column[mask]

    step = 0
    with np.errstate(all='ignore'):
        while len(lanes):
            done = np.zeros(len(lanes), dtype=bool)
            if guarded and step == 0:
                bad = ~(y[omega_at] > models.OMEGA_EPSILON)
                finish(bad, Verdict.HIT_SINGULARITY, step)
                done |= bad
            diverged = np.abs(y[omega_at] - p.omega_star) > bound
            if angle_bound is not None:
                diverged |= np.abs(y[angle_at]) > angle_bound
            diverged &= ~done
            finish(diverged, Verdict.DIVERGED, step)
            done |= diverged

            k1 = tuple(np.broadcast_to(k, y[0].shape) for k in field(*y))
            norm = np.sqrt(sum(k * k for k in k1))
            broken = ~np.isfinite(norm) & ~done
            finish(broken, failed, step)
            done |= broken

            calm = np.where(norm < cfg.conv_tol, calm + 1, 0)
            converged = (calm >= CALM_STEPS) & ~done
            finish(converged, Verdict.CONVERGED, step)
            done |= converged

            if step >= n_steps:
                finish(~done, Verdict.MAX_TIME, step)
                break

            y_next, singular = _rk4_lanes(field, y, k1, dt, speed)
            if not guarded:
                singular = np.zeros(len(lanes), dtype=bool)
            singular |= ~np.all([np.isfinite(c) for c in y_next], axis=0)
            singular &= ~done
            finish(singular, failed, step)
            done |= singular

            keep = ~done
            lanes = lanes[keep]
            calm = calm[keep]
            y = [column[keep] for column in y_next]
            step += 1

    outcomes = [Outcome(_VERDICT_CODES[codes[i]],
                        models.SimState.from_components(model, final[i]),
                        int(ended_at[i]) * dt)
                for i in range(count)]
    LOG.debug('%s batch of %d lanes finished after %d steps', model.value,
              count, step)
    return outcomes


def halve_step_check(model: models.ModelKind, p: models.GeneratorParams,
                     s0: models.SimState, cfg: IntegrationConfig,
                     tolerance: float = 1e-6) -> StepCheck:
    """
    Estimate the discretisation error of ``cfg.dt`` by repeating the run
    with half the step.

    ``error`` is the largest difference between the two runs over the
    samples they share. The check is flagged if the error exceeds
    ``tolerance``, or if the runs end with different verdicts or at
    different times.
    """
    coarse = integrate(model, p, s0,
                       cfg.replace(sample_every=1, lyap_kind=None))
    fine = integrate(model, p, s0,
                     cfg.replace(dt=cfg.dt / 2.0, sample_every=2,
                                 lyap_kind=None))
    n = min(len(coarse), len(fine))
    shared = np.isclose(coarse.times[:n], fine.times[:n],
                        rtol=0.0, atol=cfg.dt * 1e-6)
    diff = np.abs(coarse.values[:n][shared] - fine.values[:n][shared])
    if diff.size == 0:
        error = 0.0
    elif not np.all(np.isfinite(diff)):
        error = math.inf
    else:
        error = float(diff.max())
    flagged = bool(error > tolerance
                   or coarse.verdict is not fine.verdict
                   or abs(coarse.outcome.time - fine.outcome.time) > cfg.dt)
    if flagged:
        LOG.warning('Step size %r for %s looks too coarse: error %r',
                    cfg.dt, model.value, error)
    return StepCheck(error, flagged)

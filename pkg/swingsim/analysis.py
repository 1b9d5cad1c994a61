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
Empirical basins of attraction and sampled boundaries of the analytic
estimates.
"""

import collections
import concurrent.futures
import dataclasses
import logging
import math
import os

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from swingsim import exceptions
from swingsim import integrator
from swingsim import lyapunov
from swingsim import models


__all__ = ['THREADS_ENV', 'GridSpec', 'BasinCell', 'LevelSetSample',
           'worker_count', 'basin_sweep', 'acceptance_failures',
           'check_acceptance', 'raise_for_failures', 'level_set_sample']


LOG = logging.getLogger(__name__)

THREADS_ENV = 'SWINGSIM_THREADS'

MIN_RESOLUTION = 4

_BISECT_XTOL = 1e-12
_MAX_DOUBLINGS = 64


def worker_count(*env_vars: str) -> int:
    """
    Return the number of worker threads to use.

    Each of the specified environment variables is searched in order; the
    first one that is set caps the count. The count never exceeds the
    number of CPUs.
    """
    cpus = os.cpu_count() or 1
    for env_var in env_vars:
        setting = os.getenv(env_var)
        if setting:
            try:
                count = int(setting)
            except ValueError:
                count = 0
            if count < 1:
                raise exceptions.ConfigError(
                    f'expected a positive integer, got "{setting}"',
                    field=env_var)
            return min(count, cpus)
    return cpus


@dataclasses.dataclass(frozen=True)
class GridSpec:
    """
    A rectangular grid of initial states.

    Rows run along the speed (rad/s) and, for two-dimensional models,
    columns along ``column`` (``'delta'`` or ``'xi'``). Cells are ordered
    row-major.
    """
    omega: Tuple[float, float]
    rows: int
    column: Optional[str] = None
    span: Optional[Tuple[float, float]] = None
    columns: int = 1

    def __post_init__(self) -> None:
        if self.rows < 1 or self.columns < 1:
            raise exceptions.InvalidConfig('a grid needs at least one cell')
        if (self.column is None) != (self.span is None):
            raise exceptions.InvalidConfig(
                'a grid column needs both a name and a span')
        if self.column not in (None, 'delta', 'xi'):
            raise exceptions.InvalidConfig(
                f'cannot grid over "{self.column}"')

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.columns)

    def __len__(self) -> int:
        return self.rows * self.columns

    def states(self, model: models.ModelKind) -> List[models.SimState]:
        speeds = np.linspace(self.omega[0], self.omega[1], self.rows)
        if self.column is None:
            cells = [models.SimState(float(w)) for w in speeds]
        else:
            assert self.span is not None
            others = np.linspace(self.span[0], self.span[1], self.columns)
            cells = [models.SimState(float(w), **{self.column: float(x)})
                     for w in speeds for x in others]
        for state in cells[:1]:
            models.check_shape(model, state)
        return cells


BasinCell = collections.namedtuple('BasinCell', [
        'index',
        'state',
        'verdict',
        'final',
        'time',
        'in_set',
        'exceptional',
    ])


def _chunks(count: int, workers: int) -> List[np.ndarray]:
    return [c for c in np.array_split(np.arange(count), min(workers, count))
            if len(c)]


def basin_sweep(model: models.ModelKind, p: models.GeneratorParams,
                grid: GridSpec, cfg: integrator.IntegrationConfig,
                roa: Optional[lyapunov.RoaSet],
                workers: Optional[int] = None) -> List[BasinCell]:
    """
    Integrate every cell of ``grid`` and classify it against ``roa``.

    Contiguous runs of cells are integrated on a thread pool; the result is
    in row-major order. Pass the estimate from
    :func:`swingsim.lyapunov.roa_for_model`, or None when no estimate
    exists, in which case no cell is in the set.
    """
    states = grid.states(model)
    if workers is None:
        workers = worker_count(THREADS_ENV)

    chunks = _chunks(len(states), workers)
    LOG.info('Sweeping %d cells of %s on %d worker(s)', len(states),
             model.value, len(chunks))
    with concurrent.futures.ThreadPoolExecutor(
            max_workers=len(chunks)) as executor:
        batches = executor.map(
            lambda chunk: integrator.integrate_batch(
                model, p, [states[i] for i in chunk], cfg),
            chunks)
        outcomes = [outcome for batch in batches for outcome in batch]

    cells = []
    for index, (state, outcome) in enumerate(zip(states, outcomes)):
        in_set = roa is not None and lyapunov.roa_contains(roa, state)
        exceptional = roa is not None and lyapunov.is_exceptional(roa, state)
        cells.append(BasinCell(index, state, outcome.verdict, outcome.state,
                               outcome.time, in_set, exceptional))
    return cells


def _tolerances(angle_tol: float,
                freq_tol: float) -> Dict[str, float]:
    return {
        'omega': models.hz_to_rad(freq_tol),
        'delta': angle_tol,
        'xi': freq_tol,
    }


def acceptance_failures(cells: Sequence[BasinCell],
                        target: Optional[models.SimState] = None,
                        angle_tol: float = 1e-3,
                        freq_tol: float = 1e-3) -> List[BasinCell]:
    """
    Return the in-set, non-exceptional cells that did not converge.

    If ``target`` is given, a cell that converged further than the
    tolerances from it also fails. ``freq_tol`` is in Hz for the speed and
    in per-unit for the controller state.
    """
    tolerances = _tolerances(angle_tol, freq_tol)
    failures = []
    for cell in cells:
        if not cell.in_set or cell.exceptional:
            continue
        if cell.verdict is not integrator.Verdict.CONVERGED:
            failures.append(cell)
            continue
        if target is None:
            continue
        for name, tol in tolerances.items():
            want = getattr(target, name)
            if want is not None and not abs(getattr(cell.final, name)
                                            - want) <= tol:
                failures.append(cell)
                break
    return failures


def check_acceptance(cells: Sequence[BasinCell],
                     target: Optional[models.SimState] = None,
                     angle_tol: float = 1e-3,
                     freq_tol: float = 1e-3) -> None:
    """Raise AcceptanceViolation if any in-set, non-exceptional cell failed
    to converge to ``target``."""
    raise_for_failures(acceptance_failures(cells, target, angle_tol,
                                           freq_tol))


def raise_for_failures(failures: Sequence[BasinCell]) -> None:
    """Log the first few failed cells and raise AcceptanceViolation if
    there are any."""
    if failures:
        for cell in failures[:10]:
            LOG.warning('Cell %d from %s ended %s at %s', cell.index,
                        cell.state, cell.verdict.value, cell.final)
        raise exceptions.AcceptanceViolation(failures)


LevelSetSample = collections.namedtuple('LevelSetSample', [
        'columns',
        'points',
    ])


def _scales(roa: lyapunov.RoaSet) -> Tuple[float, float]:
    p = roa.params
    if roa.kind is lyapunov.RoaKind.OVAL_O:
        return (math.sqrt(p.J) * p.omega_star, p.omega_star)
    delta_bar = roa.constants['delta_bar']
    inertia = (p.M if roa.kind is lyapunov.RoaKind.SMIB_CONVENTIONAL_LEVEL_SET
               else p.J)
    return (max(math.pi / 2 - delta_bar,
                delta_bar - roa.constants['delta_minus']),
            math.sqrt(2.0 * roa.level / inertia))


def level_set_sample(roa: lyapunov.RoaSet,
                     resolution: int) -> LevelSetSample:
    """
    Sample the boundary {V = level} of ``roa``.

    For the two-dimensional sets, ``resolution`` rays leave the equilibrium
    at equally spaced angles in coordinates scaled by the extent of the set,
    and the boundary is located on each by bisection. The points are in
    order of angle, counterclockwise from the positive first coordinate. The
    one-dimensional sets are intervals and yield their two endpoints, with
    the lower one clipped to positive speeds.
    """
    if resolution < MIN_RESOLUTION:
        raise exceptions.InvalidConfig(
            f'resolution must be at least {MIN_RESOLUTION}, '
            f'got {resolution!r}')

    if len(roa.columns) == 1:
        (center,) = roa.center
        half_width = math.sqrt(2.0 * roa.level / roa.params.J
                               * center / roa.params.omega_star
                               if roa.kind is lyapunov.RoaKind.OMEGA_K
                               else 2.0 * roa.level / roa.params.J)
        points = np.array([[max(center - half_width, 0.0)],
                           [center + half_width]])
        return LevelSetSample(roa.columns, points)

    center = np.array(roa.center, dtype=float)
    scales = np.array(_scales(roa), dtype=float)
    bounded_angle = 'delta' in roa.columns

    def point(r: float, direction: np.ndarray) -> np.ndarray:
        return center + r * scales * direction

    def excess(r: float, direction: np.ndarray) -> float:
        x = point(r, direction)
        if bounded_angle and not -math.pi <= x[0] <= math.pi:
            return roa.level + 1.0
        return float(lyapunov.set_energy(roa, *x)) - roa.level

    points = np.empty((resolution, 2))
    for k in range(resolution):
        theta = 2.0 * math.pi * k / resolution
        direction = np.array([math.cos(theta), math.sin(theta)])
        hi = 1.0
        for _ in range(_MAX_DOUBLINGS):
            if excess(hi, direction) > 0:
                break
            hi *= 2.0
        else:
            raise exceptions.NoEquilibrium(
                f'the {roa.kind.value} set is unbounded along angle '
                f'{theta!r}')
        r = optimize.bisect(excess, 0.0, hi, args=(direction,),
                            xtol=_BISECT_XTOL)
        points[k] = point(r, direction)
    return LevelSetSample(roa.columns, points)

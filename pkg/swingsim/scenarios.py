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
Scenario descriptions, the built-in presets and the scenario runner.

A scenario is described by a JSON document with the top-level sections
``scenario``, ``params``, ``initial``, ``integration`` and ``outputs`` (and
optionally ``roa`` and ``resolution``). The presets are documents of the same
form, and a file may start from one by naming it in ``scenario.preset``.
See README.md for the schema.
"""

import copy
import dataclasses
import enum
import json
import logging
import math
import os

import typing
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from swingsim import analysis
from swingsim import equilibria
from swingsim import exceptions
from swingsim import integrator
from swingsim import lyapunov
from swingsim import models
from swingsim import output


__all__ = ['Output', 'ScenarioSpec', 'ScenarioResult', 'preset_names',
           'preset_document', 'load_preset', 'parse_document',
           'read_document', 'parse_config', 'load_config',
           'spec_from_document', 'scenario_constants', 'run_scenario']


LOG = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = ('t', 'omega', 'delta', 'xi', 'V', 'Vdot')
SWEEP_COLUMNS = ('index', 'omega', 'delta', 'xi', 'verdict', 'time',
                 'final_omega', 'final_delta', 'final_xi', 'in_set',
                 'exceptional')
CONSTANT_KEYS = ('Delta', 'omega_s', 'omega_u', 'c_k', 'c_p', 'c',
                 'delta_minus', 'delta_bar')

DEFAULT_RESOLUTION = 256


class Output(enum.Enum):
    TRAJECTORY = 'trajectory'
    VERDICT_GRID = 'verdict-grid'
    LEVEL_SET = 'level-set'
    CONSTANTS = 'constants'


@dataclasses.dataclass(frozen=True)
class ScenarioSpec:
    """
    Everything needed to run a scenario.

    ``kinds`` is a single model or a comparison pair sharing the same
    parameters and state shape. ``roa`` overrides the region of attraction
    estimate used for instrumentation, sweeps and level sets.
    """
    name: str
    kinds: Tuple[models.ModelKind, ...]
    params: models.GeneratorParams
    initial: Tuple[models.SimState, ...] = ()
    grid: Optional[analysis.GridSpec] = None
    integration: integrator.IntegrationConfig = integrator.IntegrationConfig()
    outputs: Tuple[Output, ...] = (Output.TRAJECTORY,)
    roa: Optional[lyapunov.RoaKind] = None
    resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self) -> None:
        if not self.name or os.sep in self.name:
            raise exceptions.InvalidConfig(
                f'invalid scenario name "{self.name}"')
        if not 1 <= len(self.kinds) <= 2:
            raise exceptions.InvalidConfig(
                'a scenario runs one model or a comparison pair')
        if len({m.components for m in self.kinds}) != 1:
            raise exceptions.InvalidConfig(
                'the models of a comparison pair must share a state shape')
        if not self.outputs:
            raise exceptions.InvalidConfig('no outputs requested')
        if Output.TRAJECTORY in self.outputs and not self.initial:
            raise exceptions.InvalidConfig(
                'trajectory output needs at least one initial state')
        if Output.VERDICT_GRID in self.outputs and self.grid is None:
            raise exceptions.InvalidConfig(
                'verdict-grid output needs an initial grid')
        for state in self.initial:
            models.check_shape(self.kinds[0], state)
        if self.grid is not None:
            self.grid.states(self.kinds[0])
        if self.resolution < analysis.MIN_RESOLUTION:
            raise exceptions.InvalidConfig(
                f'resolution must be at least {analysis.MIN_RESOLUTION}')


OMEGA_STAR = models.hz_to_rad(60.0)

_PARAMETERS = {
    'M': 0.2,
    'A': 0.04,
    'omega_star': OMEGA_STAR,
    'gamma': 2.0,
}

_LOAD_RUN = {
    'dt': 1e-4,
    't_max': 300.0,
    'conv_tol': 1e-4,
    'sample_every': 100,
}

_SMIB_RUN = {
    'dt': 1e-3,
    't_max': 200.0,
    'conv_tol': 1e-4,
    'sample_every': 10,
    'angle_bound': 2.0 * math.pi,
}


def _load_preset(name: str, P_e: float, frequency: float) -> Dict[str, Any]:
    return {
        'scenario': {'name': name,
                     'models': ['conventional-load', 'improved-load']},
        'params': dict(_PARAMETERS, P_m=1.0, P_e=P_e),
        'initial': {'states': [{'frequency': frequency}]},
        'integration': dict(_LOAD_RUN),
        'outputs': ['trajectory', 'constants'],
    }


_PRESETS: Dict[str, Dict[str, Any]] = {
    'example1': _load_preset('example1', 2.0, 60.0),
    'example2': _load_preset('example2', 4.65, 24.0),
    'example3': _load_preset('example3', 4.9, 60.0),
    'smib-compare': {
        'scenario': {'name': 'smib-compare',
                     'models': ['smib-conventional', 'smib-improved']},
        'params': dict(_PARAMETERS, P_m=1.0),
        'integration': dict(_SMIB_RUN),
        'outputs': ['trajectory', 'constants'],
    },
    'smib-roa': {
        'scenario': {'name': 'smib-roa', 'models': ['smib-improved']},
        'params': dict(_PARAMETERS, P_m=1.0),
        'initial': {'grid': {'frequency': [55.0, 65.0, 50],
                             'delta': [-math.pi, math.pi, 50]}},
        'integration': {
            'dt': 1e-2,
            't_max': 200.0,
            'conv_tol': 1e-4,
            'angle_bound': 2.0 * math.pi,
        },
        'outputs': ['verdict-grid', 'level-set', 'constants'],
    },
}


def preset_names() -> List[str]:
    return sorted(_PRESETS)


def preset_document(name: str) -> Dict[str, Any]:
    """Return a copy of the configuration document of a preset."""
    try:
        return copy.deepcopy(_PRESETS[name])
    except KeyError:
        raise exceptions.ConfigError(
            f'unknown preset "{name}" (choose from '
            f'{", ".join(preset_names())})', field='scenario.preset')


_MASS_KEYS = frozenset({'M', 'A', 'J', 'D_d'})


def _merge(base: Dict[str, Any],
           overrides: Mapping[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for section, value in overrides.items():
        current = merged.get(section)
        if (section in ('scenario', 'params', 'integration')
                and isinstance(current, dict) and isinstance(value, dict)):
            current = dict(current)
            if section == 'params' and _MASS_KEYS & set(value):
                for key in _MASS_KEYS:
                    current.pop(key, None)
            current.update(value)
            merged[section] = current
        else:
            merged[section] = value
    return merged


# Document parsing. Every helper takes the dotted path of the value so that
# errors can name the offending field.

def _section(document: Mapping[str, Any], key: str,
             path: str) -> Dict[str, Any]:
    value = document.get(key, {})
    if not isinstance(value, dict):
        raise exceptions.ConfigError('expected an object', field=path)
    return value


def _number(section: Mapping[str, Any], key: str, path: str,
            default: Optional[float] = None,
            required: bool = False) -> Optional[float]:
    if key not in section or section[key] is None:
        if required:
            raise exceptions.ConfigError('a value is required',
                                         field=f'{path}.{key}')
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise exceptions.ConfigError(f'expected a number, got {value!r}',
                                     field=f'{path}.{key}')
    if not math.isfinite(value):
        raise exceptions.ConfigError(f'expected a finite number, '
                                     f'got {value!r}', field=f'{path}.{key}')
    return float(value)


def _check_keys(section: Mapping[str, Any], allowed: typing.Iterable[str],
                path: str) -> None:
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise exceptions.ConfigError(f'unknown key "{unknown[0]}"',
                                     field=f'{path}.{unknown[0]}'
                                     if path else unknown[0])


def _enum_value(enum_type: Any, value: Any, path: str) -> Any:
    try:
        return enum_type(value)
    except ValueError:
        choices = ', '.join(str(e.value) for e in enum_type)
        raise exceptions.ConfigError(
            f'unknown value {value!r} (choose from {choices})', field=path)


def _parse_models(scenario: Mapping[str, Any]) -> Tuple[models.ModelKind,
                                                        ...]:
    names = scenario.get('models')
    if names is None:
        raise exceptions.ConfigError('a value is required',
                                     field='scenario.models')
    if isinstance(names, str):
        names = [names]
    if not isinstance(names, list):
        raise exceptions.ConfigError('expected a list of model names',
                                     field='scenario.models')
    return tuple(_enum_value(models.ModelKind, name, f'scenario.models[{i}]')
                 for i, name in enumerate(names))


def _parse_params(section: Mapping[str, Any]) -> models.GeneratorParams:
    path = 'params'
    _check_keys(section, ('M', 'A', 'J', 'D_d', 'omega_star', 'P_m', 'P_e',
                          'gamma', 'D_m'), path)
    omega_star = _number(section, 'omega_star', path, default=OMEGA_STAR)
    assert omega_star is not None
    extra = {
        'P_m': _number(section, 'P_m', path, default=0.0),
        'P_e': _number(section, 'P_e', path, default=0.0),
        'D_m': _number(section, 'D_m', path, default=0.0),
        'gamma': _number(section, 'gamma', path),
    }
    conventional = {'M', 'A'} & set(section)
    physical = {'J', 'D_d'} & set(section)
    if conventional and physical:
        raise exceptions.ConfigError('give either M and A or J and D_d',
                                     field=path)
    try:
        if physical:
            J = _number(section, 'J', path, required=True)
            D_d = _number(section, 'D_d', path, required=True)
            assert J is not None and D_d is not None
            return models.GeneratorParams(J, D_d, omega_star, **extra)
        M = _number(section, 'M', path, required=True)
        A = _number(section, 'A', path, required=True)
        assert M is not None and A is not None
        return models.GeneratorParams.per_unit(M, A, omega_star, **extra)
    except exceptions.InvalidParameters as exc:
        raise exceptions.ConfigError(str(exc), field=path) from exc


def _parse_state(entry: Any, path: str) -> models.SimState:
    if not isinstance(entry, dict):
        raise exceptions.ConfigError('expected an object', field=path)
    _check_keys(entry, ('omega', 'frequency', 'delta', 'xi'), path)
    if ('omega' in entry) == ('frequency' in entry):
        raise exceptions.ConfigError('give exactly one of omega and '
                                     'frequency', field=path)
    delta = _number(entry, 'delta', path)
    xi = _number(entry, 'xi', path)
    if 'frequency' in entry:
        frequency = _number(entry, 'frequency', path, required=True)
        assert frequency is not None
        return models.SimState.from_frequency(frequency, delta, xi)
    omega = _number(entry, 'omega', path, required=True)
    assert omega is not None
    return models.SimState(omega, delta, xi)


def _parse_range(value: Any, path: str) -> Tuple[float, float, int]:
    if (not isinstance(value, list) or len(value) != 3
            or not all(isinstance(v, (int, float))
                       and not isinstance(v, bool) for v in value)
            or not isinstance(value[2], int) or value[2] < 1):
        raise exceptions.ConfigError(
            'expected [start, stop, count] with a positive integer count',
            field=path)
    return float(value[0]), float(value[1]), value[2]


def _parse_grid(section: Any) -> analysis.GridSpec:
    path = 'initial.grid'
    if not isinstance(section, dict):
        raise exceptions.ConfigError('expected an object', field=path)
    _check_keys(section, ('omega', 'frequency', 'delta', 'xi'), path)
    if ('omega' in section) == ('frequency' in section):
        raise exceptions.ConfigError('give exactly one of omega and '
                                     'frequency', field=path)
    if 'frequency' in section:
        lo, hi, rows = _parse_range(section['frequency'],
                                    f'{path}.frequency')
        lo, hi = models.hz_to_rad(lo), models.hz_to_rad(hi)
    else:
        lo, hi, rows = _parse_range(section['omega'], f'{path}.omega')
    others = [name for name in ('delta', 'xi') if name in section]
    if len(others) > 1:
        raise exceptions.ConfigError('give at most one of delta and xi',
                                     field=path)
    if not others:
        return analysis.GridSpec((lo, hi), rows)
    column = others[0]
    start, stop, columns = _parse_range(section[column],
                                        f'{path}.{column}')
    return analysis.GridSpec((lo, hi), rows, column, (start, stop), columns)


def _parse_initial(section: Mapping[str, Any]
                   ) -> Tuple[Tuple[models.SimState, ...],
                              Optional[analysis.GridSpec]]:
    _check_keys(section, ('states', 'grid'), 'initial')
    states = section.get('states', [])
    if not isinstance(states, list):
        raise exceptions.ConfigError('expected a list of states',
                                     field='initial.states')
    parsed = tuple(_parse_state(entry, f'initial.states[{i}]')
                   for i, entry in enumerate(states))
    grid = _parse_grid(section['grid']) if 'grid' in section else None
    return parsed, grid


def _parse_integration(section: Mapping[str, Any]
                       ) -> integrator.IntegrationConfig:
    path = 'integration'
    _check_keys(section, ('dt', 't_max', 'conv_tol', 'div_bound',
                          'lyap_kind', 'sample_every', 'angle_bound'), path)
    settings: Dict[str, Any] = {}
    for key in ('dt', 't_max', 'conv_tol', 'div_bound', 'angle_bound'):
        value = _number(section, key, path)
        if value is not None:
            settings[key] = value
    if section.get('sample_every') is not None:
        sample_every = section['sample_every']
        if isinstance(sample_every, bool) or not isinstance(sample_every,
                                                             int):
            raise exceptions.ConfigError(
                f'expected an integer, got {sample_every!r}',
                field=f'{path}.sample_every')
        settings['sample_every'] = sample_every
    if section.get('lyap_kind') is not None:
        settings['lyap_kind'] = _enum_value(lyapunov.RoaKind,
                                            section['lyap_kind'],
                                            f'{path}.lyap_kind')
    try:
        return integrator.IntegrationConfig(**settings)
    except exceptions.InvalidConfig as exc:
        raise exceptions.ConfigError(str(exc), field=path) from exc


def spec_from_document(document: Mapping[str, Any]) -> ScenarioSpec:
    """
    Build a scenario from a configuration document.

    If ``scenario.preset`` is set, the document is applied on top of that
    preset: the ``scenario``, ``params`` and ``integration`` sections are
    merged key by key and the other sections are replaced.
    """
    if not isinstance(document, Mapping):
        raise exceptions.ConfigError('expected a JSON object')
    _check_keys(document, ('scenario', 'params', 'initial', 'integration',
                           'outputs', 'roa', 'resolution'), '')
    scenario = _section(document, 'scenario', 'scenario')
    preset = scenario.get('preset')
    if preset is not None:
        overrides = dict(document)
        overrides['scenario'] = {k: v for k, v in scenario.items()
                                 if k != 'preset'}
        document = _merge(preset_document(preset), overrides)
        scenario = _section(document, 'scenario', 'scenario')
    _check_keys(scenario, ('name', 'models', 'preset'), 'scenario')

    name = scenario.get('name')
    if not isinstance(name, str):
        raise exceptions.ConfigError('a name is required',
                                     field='scenario.name')
    kinds = _parse_models(scenario)
    params = _parse_params(_section(document, 'params', 'params'))
    initial, grid = _parse_initial(_section(document, 'initial', 'initial'))
    cfg = _parse_integration(_section(document, 'integration',
                                      'integration'))

    requested = document.get('outputs', ['trajectory'])
    if not isinstance(requested, list):
        raise exceptions.ConfigError('expected a list', field='outputs')
    outputs = tuple(_enum_value(Output, value, f'outputs[{i}]')
                    for i, value in enumerate(requested))

    roa = None
    if document.get('roa') is not None:
        roa = _enum_value(lyapunov.RoaKind, document['roa'], 'roa')
    resolution = document.get('resolution', DEFAULT_RESOLUTION)
    if isinstance(resolution, bool) or not isinstance(resolution, int):
        raise exceptions.ConfigError(
            f'expected an integer, got {resolution!r}', field='resolution')

    if Output.TRAJECTORY in outputs and not initial:
        raise exceptions.ConfigError(
            'initial states are required for trajectory output',
            field='initial.states')
    if Output.VERDICT_GRID in outputs and grid is None:
        raise exceptions.ConfigError(
            'an initial grid is required for verdict-grid output',
            field='initial.grid')
    try:
        return ScenarioSpec(name, kinds, params, initial, grid, cfg,
                            outputs, roa, resolution)
    except exceptions.ShapeMismatch as exc:
        raise exceptions.ConfigError(str(exc), field='initial') from exc
    except exceptions.InvalidConfig as exc:
        if isinstance(exc, exceptions.ConfigError):
            raise
        raise exceptions.ConfigError(str(exc), field='scenario') from exc


def load_preset(name: str) -> ScenarioSpec:
    return spec_from_document(preset_document(name))


def parse_document(text: str) -> Any:
    """Parse the text of a JSON configuration document."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise exceptions.ConfigError(exc.msg, line=exc.lineno,
                                     column=exc.colno) from exc


def read_document(path: str) -> Any:
    try:
        with open(path, encoding='utf-8') as f:
            text = f.read()
    except OSError as exc:
        raise exceptions.ConfigError(
            f'cannot read {path}: {exc.strerror}') from exc
    LOG.debug('Loaded scenario file %s', path)
    return parse_document(text)


def parse_config(text: str) -> ScenarioSpec:
    """Build a scenario from the text of a JSON configuration document."""
    return spec_from_document(parse_document(text))


def load_config(path: str) -> ScenarioSpec:
    return spec_from_document(read_document(path))


def _nullable(func: typing.Callable[[], Any]) -> Any:
    try:
        return func()
    except ArithmeticError as exc:
        LOG.warning('%s', exc)
        return None


def scenario_constants(spec: ScenarioSpec) -> Dict[str, Optional[float]]:
    """
    Return the analytic constants of a scenario.

    The keys are those of :data:`CONSTANT_KEYS`; a value is None where it
    does not apply to the scenario's models or does not exist for its
    parameters.
    """
    p = spec.params
    constants: Dict[str, Optional[float]] = dict.fromkeys(CONSTANT_KEYS)
    if spec.kinds[0].smib:
        smib = _nullable(lambda: equilibria.equilibrium_smib(p))
        if smib is not None:
            constants['delta_bar'] = smib.delta_bar
        if models.ModelKind.SMIB_IMPROVED in spec.kinds:
            found = _nullable(lambda: lyapunov.smib_constants(p))
            if found is not None:
                constants.update(c_k=found.c_k, c_p=found.c_p, c=found.c,
                                 delta_minus=found.delta_minus)
        else:
            level = _nullable(lambda: lyapunov.smib_conventional_level(p))
            if level is not None:
                constants.update(c_p=level, c=level,
                                 delta_minus=lyapunov.delta_minus(
                                     p, models.ModelKind.SMIB_CONVENTIONAL))
        return constants

    if models.ModelKind.IMPROVED_LOAD_WITH_LOSSES in spec.kinds:
        p = equilibria.reduce_losses(p)
    pair = equilibria.equilibria_load(p)
    constants.update(Delta=pair.delta_disc, omega_s=pair.omega_s,
                     omega_u=pair.omega_u)
    if not pair.exists:
        LOG.warning('Discriminant %r is not positive; the improved load '
                    'model has no equilibrium', pair.delta_disc)
    return constants


@dataclasses.dataclass
class ScenarioResult:
    """What a scenario run produced."""
    spec: ScenarioSpec
    files: List[str] = dataclasses.field(default_factory=list)
    trajectories: List[Tuple[models.ModelKind,
                             integrator.Trajectory]] = dataclasses.field(
                                 default_factory=list)
    cells: Dict[models.ModelKind,
                List[analysis.BasinCell]] = dataclasses.field(
                    default_factory=dict)
    level_set: Optional[analysis.LevelSetSample] = None
    constants: Optional[Dict[str, Optional[float]]] = None

    def summary_lines(self) -> List[str]:
        """A human-readable summary, with speeds in Hz."""
        lines = []
        for model, trajectory in self.trajectories:
            outcome = trajectory.outcome
            lines.append(f'{self.spec.name} {model.value}: '
                         f'{outcome.verdict.value} at t={outcome.time:.6g} s,'
                         f' final frequency '
                         f'{outcome.state.frequency:.4f} Hz')
        for model, cells in self.cells.items():
            converged = sum(c.verdict is integrator.Verdict.CONVERGED
                            for c in cells)
            in_set = sum(c.in_set for c in cells)
            lines.append(f'{self.spec.name} {model.value}: {converged} of '
                         f'{len(cells)} cells converged, {in_set} in the '
                         f'region of attraction estimate')
        if self.level_set is not None:
            lines.append(f'{self.spec.name}: {len(self.level_set.points)} '
                         f'level set points')
        return lines


def _roa_kind(spec: ScenarioSpec,
              model: models.ModelKind) -> Optional[lyapunov.RoaKind]:
    if spec.roa is not None:
        return spec.roa if lyapunov.applies(spec.roa, model) else None
    return lyapunov.default_roa_kind(model)


def _build_roa(model: models.ModelKind, p: models.GeneratorParams,
               kind: Optional[lyapunov.RoaKind]
               ) -> Optional[lyapunov.RoaSet]:
    if kind is None:
        return None
    return _nullable(lambda: lyapunov.roa_for_model(model, p, kind))


def _roa(spec: ScenarioSpec,
         model: models.ModelKind) -> Optional[lyapunov.RoaSet]:
    return _build_roa(model, spec.params, _roa_kind(spec, model))


def _instrumented(spec: ScenarioSpec,
                  model: models.ModelKind) -> integrator.IntegrationConfig:
    cfg = spec.integration
    kind = cfg.lyap_kind
    if kind is None or not lyapunov.applies(kind, model):
        kind = _roa_kind(spec, model)
    if _build_roa(model, spec.params, kind) is None:
        kind = None
    return cfg.replace(lyap_kind=kind)


def _cell(value: Any) -> Optional[float]:
    return None if value is None else float(value)


def _trajectory_rows(trajectory: integrator.Trajectory
                     ) -> List[List[Optional[float]]]:
    columns = [trajectory.column(name) for name in ('omega', 'delta', 'xi')]
    rows = []
    for i, t in enumerate(trajectory.times):
        row = [float(t)]
        row.extend(None if c is None else float(c[i]) for c in columns)
        row.append(None if trajectory.V is None else float(trajectory.V[i]))
        row.append(None if trajectory.Vdot is None
                   else float(trajectory.Vdot[i]))
        rows.append(row)
    return rows


def _state_dict(state: models.SimState) -> Dict[str, Optional[float]]:
    return {'omega': state.omega, 'delta': state.delta, 'xi': state.xi}


def _sweep_rows(cells: Sequence[analysis.BasinCell]) -> List[List[Any]]:
    return [[cell.index, cell.state.omega, _cell(cell.state.delta),
             _cell(cell.state.xi), cell.verdict.value, float(cell.time),
             cell.final.omega, _cell(cell.final.delta),
             _cell(cell.final.xi), bool(cell.in_set),
             bool(cell.exceptional)]
            for cell in cells]


def _stem(spec: ScenarioSpec, *parts: str) -> str:
    return '_'.join((spec.name,) + parts)


def run_scenario(spec: ScenarioSpec, out_dir: str,
                 writer: output.WriterType = 'csv') -> ScenarioResult:
    """
    Run a scenario and write the requested outputs to ``out_dir``.

    Trajectories are written to ``<name>_<model>`` (with an index suffix when
    there are several initial states), verdict grids to ``<name>_sweep``,
    level sets to ``<name>_levelset`` and constants to
    ``<name>_constants.json``. Raises AcceptanceViolation after writing the
    verdict grids if any cell inside the estimate failed to converge.
    """
    table = output.get_writer(writer)
    os.makedirs(out_dir, exist_ok=True)
    result = ScenarioResult(spec)
    LOG.info('Running scenario %s', spec.name)

    if Output.TRAJECTORY in spec.outputs:
        for model in spec.kinds:
            cfg = _instrumented(spec, model)
            for i, s0 in enumerate(spec.initial):
                LOG.info('Integrating %s from %s', model.value, s0)
                trajectory = integrator.integrate(model, spec.params, s0,
                                                  cfg)
                result.trajectories.append((model, trajectory))
                suffix = (model.value,) if len(spec.initial) == 1 else (
                    model.value, str(i))
                metadata = {
                    'scenario': spec.name,
                    'model': model.value,
                    'lyap_kind': (cfg.lyap_kind.value
                                  if cfg.lyap_kind is not None else None),
                    'verdict': trajectory.verdict.value,
                    'final_time': trajectory.outcome.time,
                    'final': _state_dict(trajectory.final),
                }
                path = table.write_file(out_dir, _stem(spec, *suffix),
                                        TRAJECTORY_COLUMNS,
                                        _trajectory_rows(trajectory),
                                        metadata)
                LOG.info('Wrote %s', path)
                result.files.append(path)

    if Output.CONSTANTS in spec.outputs:
        result.constants = scenario_constants(spec)
        path = output.write_json_file(
            os.path.join(out_dir, f'{_stem(spec, "constants")}.json'),
            dict(result.constants, params=spec.params.as_dict()))
        LOG.info('Wrote %s', path)
        result.files.append(path)

    if Output.LEVEL_SET in spec.outputs:
        roa = next(filter(None, (_roa(spec, m) for m in spec.kinds)), None)
        if roa is None:
            LOG.warning('No region of attraction estimate applies to '
                        'scenario %s', spec.name)
        else:
            result.level_set = analysis.level_set_sample(roa,
                                                         spec.resolution)
            path = table.write_file(
                out_dir, _stem(spec, 'levelset'), result.level_set.columns,
                result.level_set.points.tolist(),
                {'scenario': spec.name, 'kind': roa.kind.value,
                 'level': roa.level, 'constants': roa.constants})
            LOG.info('Wrote %s', path)
            result.files.append(path)

    failures: List[analysis.BasinCell] = []
    if Output.VERDICT_GRID in spec.outputs:
        assert spec.grid is not None
        for model in spec.kinds:
            roa = _roa(spec, model)
            cells = analysis.basin_sweep(model, spec.params, spec.grid,
                                         spec.integration, roa)
            result.cells[model] = cells
            suffix = ('sweep',) if len(spec.kinds) == 1 else (model.value,
                                                               'sweep')
            path = table.write_file(
                out_dir, _stem(spec, *suffix), SWEEP_COLUMNS,
                _sweep_rows(cells),
                {'scenario': spec.name, 'model': model.value,
                 'shape': list(spec.grid.shape),
                 'kind': roa.kind.value if roa is not None else None})
            LOG.info('Wrote %s', path)
            result.files.append(path)
            if roa is not None:
                target = models.SimState(**dict(zip(roa.columns,
                                                    roa.center)))
                failures.extend(analysis.acceptance_failures(cells, target))

    analysis.raise_for_failures(failures)
    return result

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
A toolkit for simulating and analysing the improved swing equation of a
synchronous generator, J w dw/dt + D_d w (w - w*) = P_m - P_e, alongside the
conventional swing equation.
"""

from swingsim.exceptions import (  # noqa: F401
    SwingSimError, InvalidParameters, ShapeMismatch, InvalidConfig,
    ConfigError, SingularState, NoEquilibrium, ConditionViolated,
    AcceptanceViolation)
from swingsim.models import (  # noqa: F401
    ModelKind, GeneratorParams, SimState)
from swingsim.equilibria import (  # noqa: F401
    EquilibriumPair, equilibria_load, equilibrium_smib, reduce_losses)
from swingsim.lyapunov import RoaKind, RoaSet  # noqa: F401
from swingsim.integrator import (  # noqa: F401
    IntegrationConfig, Trajectory, Verdict, integrate)
from swingsim.scenarios import ScenarioSpec, run_scenario  # noqa: F401


__all__ = ['SwingSimError', 'InvalidParameters', 'ShapeMismatch',
           'InvalidConfig', 'ConfigError', 'SingularState', 'NoEquilibrium',
           'ConditionViolated', 'AcceptanceViolation',
           'ModelKind', 'GeneratorParams', 'SimState',
           'EquilibriumPair', 'equilibria_load', 'equilibrium_smib',
           'reduce_losses', 'RoaKind', 'RoaSet',
           'IntegrationConfig', 'Trajectory', 'Verdict', 'integrate',
           'ScenarioSpec', 'run_scenario']

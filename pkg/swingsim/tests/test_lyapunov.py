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

import math
import unittest

import numpy as np

from typing import Any, Callable, List, Tuple

from swingsim.tests import machines

from swingsim import equilibria
from swingsim import exceptions
from swingsim import integrator
from swingsim import lyapunov
from swingsim import models


OMEGA_STAR = machines.OMEGA_STAR

_Kind = lyapunov.RoaKind
_Model = models.ModelKind


def _close(test: unittest.TestCase, expected: float, actual: float,
           rel: float = 1e-9) -> None:
    test.assertLessEqual(abs(expected - actual),
                         rel * max(1.0, abs(expected)),
                         f'{expected!r} != {actual!r}')


class LoadEnergyTest(unittest.TestCase):
    def setUp(self) -> None:
        self.p = machines.load(P_e=2.0)
        self.pair = equilibria.equilibria_load(self.p)

    def test_level_at_unstable_root(self) -> None:
        roa = lyapunov.omega_s_set(self.p)
        self.assertAlmostEqual(
            1.0, lyapunov.v_load(self.p, self.pair.omega_u) / roa.level,
            places=9)
        self.assertAlmostEqual(0.5 * self.p.J * self.pair.delta_disc,
                               roa.level, places=12)

    def test_zero_at_stable_root(self) -> None:
        self.assertEqual(0.0, lyapunov.v_load(self.p, self.pair.omega_s))
        self.assertEqual(0.0, lyapunov.vdot_load(self.p, self.pair.omega_s))

    def test_derivative_matches_chain_rule(self) -> None:
        rng = np.random.default_rng(11)
        for omega in rng.uniform(10.0, 600.0, 50):
            omega = float(omega)
            omega_dot = models.rhs_improved_load(self.p,
                                                 models.SimState(omega))
            chain = self.p.J * (omega - self.pair.omega_s) * omega_dot
            _close(self, chain, lyapunov.vdot_load(self.p, omega))

    def test_decreasing_above_unstable_root(self) -> None:
        omegas = np.linspace(self.pair.omega_u + 1.0, 800.0, 200)
        self.assertTrue(np.all(lyapunov.vdot_load(self.p, omegas) <= 0.0))

    def test_accepts_arrays(self) -> None:
        omegas = np.array([100.0, 200.0, 300.0])
        values = lyapunov.v_load(self.p, omegas)
        for omega, value in zip(omegas, values):
            self.assertAlmostEqual(lyapunov.v_load(self.p, float(omega)),
                                   value, places=12)

    def test_singular_speed(self) -> None:
        self.assertRaises(exceptions.SingularState,
                          lyapunov.vdot_load, self.p, 0.0)

    def test_no_equilibrium(self) -> None:
        self.assertRaises(exceptions.NoEquilibrium,
                          lyapunov.v_load, machines.load(4.9), 300.0)


class StorageTest(unittest.TestCase):
    u_bar = 0.3

    def setUp(self) -> None:
        self.p = machines.load(P_e=2.0)
        self.pair = equilibria.equilibria_load(self.p, self.u_bar)

    def test_dissipation_equality(self) -> None:
        rng = np.random.default_rng(5)
        omegas = rng.uniform(self.pair.omega_u + 1.0, 600.0, 40)
        inputs = rng.uniform(-2.0, 2.0, 40)
        for omega, u in zip(omegas, inputs):
            omega, u = float(omega), float(u)
            wdot = lyapunov.wdot_storage(self.p, omega, u, self.u_bar)
            supply = lyapunov.supply_rate(self.p, omega, u, self.u_bar)
            defect = lyapunov.passivity_defect(self.p, omega, self.u_bar)
            _close(self, defect, wdot - supply)

    def test_defect_non_positive(self) -> None:
        omegas = np.linspace(self.pair.omega_u, 900.0, 300)
        defect = lyapunov.passivity_defect(self.p, omegas, self.u_bar)
        self.assertTrue(np.all(defect <= 0.0))

    def test_omega_k_level(self) -> None:
        roa = lyapunov.omega_k_set(self.p, self.u_bar)
        self.assertEqual(self.u_bar, roa.constants['u_bar'])
        boundary = lyapunov.w_storage(self.p, self.pair.omega_u,
                                      self.pair.omega_s)
        self.assertAlmostEqual(1.0, boundary / roa.level, places=9)

    def test_scaled_from_load_energy(self) -> None:
        p = machines.load(P_e=2.0)
        omega_s = equilibria.equilibria_load(p).omega_s
        self.assertAlmostEqual(
            lyapunov.v_load(p, 300.0) * OMEGA_STAR / omega_s,
            lyapunov.w_storage(p, 300.0, omega_s), places=12)

    def test_requires_positive_equilibrium(self) -> None:
        self.assertRaises(exceptions.NoEquilibrium,
                          lyapunov.w_storage, self.p, 300.0, 0.0)


class ClosedLoopEnergyTest(unittest.TestCase):
    def setUp(self) -> None:
        self.p = machines.load(P_e=2.0)
        self.xi_bar = self.p.P_m - self.p.P_e

    def test_minimum_at_equilibrium(self) -> None:
        s = models.SimState(OMEGA_STAR, xi=self.xi_bar)
        self.assertEqual(0.0, lyapunov.u_closed_loop(self.p, s))
        self.assertEqual(0.0, lyapunov.udot_closed_loop(self.p, s))

    def test_derivative_matches_chain_rule(self) -> None:
        rng = np.random.default_rng(3)
        for omega, xi in zip(rng.uniform(50.0, 700.0, 40),
                             rng.uniform(-5.0, 5.0, 40)):
            s = models.SimState(float(omega), xi=float(xi))
            d = models.rhs_closed_loop(self.p, s)
            chain = ((s.xi - self.xi_bar) * d.xi_dot
                     + self.p.J * (s.omega - OMEGA_STAR) * d.omega_dot)
            _close(self, chain, lyapunov.udot_closed_loop(self.p, s))
            self.assertAlmostEqual(
                -self.p.D_d * (s.omega - OMEGA_STAR) ** 2,
                lyapunov.udot_closed_loop(self.p, s), places=12)

    def test_oval(self) -> None:
        roa = lyapunov.oval_set(self.p)
        self.assertEqual(('xi', 'omega'), roa.columns)
        self.assertEqual((self.xi_bar, OMEGA_STAR), roa.center)
        self.assertEqual(0.5 * self.p.J * OMEGA_STAR ** 2, roa.level)
        corner = models.SimState(0.0, xi=self.xi_bar)
        self.assertTrue(lyapunov.roa_contains(roa, corner))
        self.assertTrue(lyapunov.is_exceptional(roa, corner))
        self.assertFalse(lyapunov.roa_contains(
            roa, models.SimState(OMEGA_STAR, xi=self.xi_bar + 60.0)))
        inside = models.SimState(OMEGA_STAR / 2, xi=self.xi_bar + 1.0)
        self.assertTrue(lyapunov.roa_contains(roa, inside))
        self.assertFalse(lyapunov.is_exceptional(roa, inside))

    def test_shape(self) -> None:
        self.assertRaises(exceptions.ShapeMismatch,
                          lyapunov.u_closed_loop, self.p,
                          models.SimState(OMEGA_STAR))


class SmibEnergyTest(unittest.TestCase):
    def setUp(self) -> None:
        self.p = machines.smib()

    def test_potential_zero_at_equilibrium(self) -> None:
        self.assertAlmostEqual(
            0.0, lyapunov.potential_smib(self.p, math.pi / 6), places=15)

    def test_improved_derivative_matches_chain_rule(self) -> None:
        rng = np.random.default_rng(2)
        gamma = machines.GAMMA
        sin_bar = self.p.P_m / gamma
        for delta, omega in zip(rng.uniform(-math.pi, math.pi, 40),
                                rng.uniform(300.0, 450.0, 40)):
            s = models.SimState(float(omega), delta=float(delta))
            d = models.rhs_smib_improved(self.p, s)
            chain = (self.p.J * (s.omega - OMEGA_STAR) * d.omega_dot
                     + gamma / OMEGA_STAR * (math.sin(s.delta) - sin_bar)
                     * d.delta_dot)
            _close(self, chain, lyapunov.vdot_smib_improved(self.p, s))

    def test_conventional_derivative_matches_chain_rule(self) -> None:
        rng = np.random.default_rng(4)
        gamma = machines.GAMMA
        sin_bar = self.p.P_m / gamma
        model = _Model.SMIB_CONVENTIONAL
        for delta, omega in zip(rng.uniform(-math.pi, math.pi, 40),
                                rng.uniform(300.0, 450.0, 40)):
            s = models.SimState(float(omega), delta=float(delta))
            d = models.rhs_smib_conventional(self.p, s)
            chain = (self.p.M * (s.omega - OMEGA_STAR) * d.omega_dot
                     + gamma * (math.sin(s.delta) - sin_bar) * d.delta_dot)
            _close(self, chain, lyapunov.vdot_smib_conventional(self.p, s))
            self.assertGreater(
                lyapunov.v_smib(self.p, s, model) + 1e-12, 0.0)

    def test_conventional_energy_is_scaled(self) -> None:
        s = models.SimState(370.0, delta=0.3)
        improved = lyapunov.v_smib(self.p, s)
        conventional = lyapunov.v_smib(self.p, s, _Model.SMIB_CONVENTIONAL)
        self.assertAlmostEqual(1.0, conventional / (OMEGA_STAR * improved),
                               places=12)
        self.assertAlmostEqual(
            1.0, (lyapunov.smib_conventional_level(self.p)
                  / (OMEGA_STAR * lyapunov.smib_constants(self.p).c_p)),
            places=12)

    def test_not_an_infinite_bus_model(self) -> None:
        self.assertRaises(exceptions.ShapeMismatch,
                          lyapunov.v_smib, self.p,
                          models.SimState(370.0, delta=0.3),
                          _Model.IMPROVED_LOAD)


class SmibConstantsTest(unittest.TestCase):
    def test_potential_limits_the_level(self) -> None:
        consts = lyapunov.smib_constants(machines.smib())
        self.assertEqual(consts.c_p, consts.c)
        self.assertLess(consts.c_p, consts.c_k)
        self.assertAlmostEqual(math.pi / 6, consts.delta_bar, places=12)
        self.assertAlmostEqual(
            2.0 / OMEGA_STAR * (math.cos(math.pi / 6) - math.pi / 6),
            consts.c_p, places=12)

    def test_kinetic_constant(self) -> None:
        p = machines.smib()
        consts = lyapunov.smib_constants(p)
        self.assertAlmostEqual(
            1.0,
            consts.c_k / (0.5 * p.J * (OMEGA_STAR - 50.0) ** 2),
            places=9)

    def test_delta_minus_light_load(self) -> None:
        p = machines.smib(P_m=0.2)
        d = lyapunov.delta_minus(p)
        self.assertGreater(d, -0.42 * math.pi)
        self.assertLess(d, -0.40 * math.pi)
        self.assertAlmostEqual(math.cos(d), (math.pi / 2 - d) * 0.1,
                               places=8)

    def test_delta_minus_no_load(self) -> None:
        self.assertAlmostEqual(-math.pi / 2,
                               lyapunov.delta_minus(machines.smib(P_m=0.0)),
                               places=9)

    def test_delta_minus_same_for_both_models(self) -> None:
        p = machines.smib()
        self.assertAlmostEqual(
            lyapunov.delta_minus(p),
            lyapunov.delta_minus(p, _Model.SMIB_CONVENTIONAL), places=8)

    def test_speed_condition(self) -> None:
        p = models.GeneratorParams(J=1.0, D_d=1.0, omega_star=1.0,
                                   P_m=0.5, gamma=2.0)
        with self.assertLogs('swingsim.lyapunov', 'WARNING'):
            with self.assertRaises(exceptions.ConditionViolated) as cm:
                lyapunov.smib_constants(p)
        self.assertEqual(lyapunov.CONDITION_SPEED, cm.exception.condition)

    def test_load_condition(self) -> None:
        for P_m in (1.5, -0.5):
            with self.assertLogs('swingsim.lyapunov', 'WARNING'):
                with self.assertRaises(exceptions.ConditionViolated) as cm:
                    lyapunov.smib_constants(machines.smib(P_m=P_m))
            self.assertEqual(lyapunov.CONDITION_LOAD, cm.exception.condition)

    def test_conventional_set_needs_load_condition_only(self) -> None:
        p = models.GeneratorParams(J=1.0, D_d=1.0, omega_star=1.0,
                                   P_m=0.5, gamma=2.0)
        roa = lyapunov.smib_conventional_set(p)
        self.assertEqual(roa.constants['c_p'], roa.level)


class SmibSetTest(unittest.TestCase):
    def setUp(self) -> None:
        self.roa = lyapunov.smib_set(machines.smib())

    def test_contains_equilibrium(self) -> None:
        self.assertTrue(lyapunov.roa_contains(
            self.roa, models.SimState(OMEGA_STAR, delta=math.pi / 6)))

    def test_excludes_beyond_saddle(self) -> None:
        self.assertFalse(lyapunov.roa_contains(
            self.roa, models.SimState(OMEGA_STAR, delta=math.pi / 2 + 0.1)))

    def test_angle_range(self) -> None:
        self.assertFalse(lyapunov.roa_contains(
            self.roa, models.SimState(OMEGA_STAR,
                                      delta=math.pi / 6 + 2 * math.pi)))

    def test_lower_angle_limit(self) -> None:
        d = self.roa.constants['delta_minus']
        self.assertTrue(lyapunov.roa_contains(
            self.roa, models.SimState(OMEGA_STAR, delta=d + 1e-6)))
        self.assertFalse(lyapunov.roa_contains(
            self.roa, models.SimState(OMEGA_STAR, delta=d - 1e-6)))

    def test_never_exceptional(self) -> None:
        self.assertFalse(lyapunov.is_exceptional(
            self.roa, models.SimState(OMEGA_STAR, delta=0.0)))

    def test_shape(self) -> None:
        self.assertRaises(exceptions.ShapeMismatch, lyapunov.roa_contains,
                          self.roa, models.SimState(OMEGA_STAR))


class LoadSetTest(unittest.TestCase):
    def setUp(self) -> None:
        self.p = machines.load(P_e=4.65)
        self.roa = lyapunov.omega_s_set(self.p)

    def test_low_frequency_start(self) -> None:
        self.assertFalse(lyapunov.roa_contains(
            self.roa, models.SimState.from_frequency(24.0)))
        self.assertTrue(lyapunov.roa_contains(
            self.roa, models.SimState.from_frequency(26.0)))

    def test_only_positive_speeds(self) -> None:
        self.assertFalse(lyapunov.roa_contains(self.roa,
                                               models.SimState(-1.0)))

    def test_unstable_root_is_exceptional(self) -> None:
        omega_u = self.roa.constants['omega_u']
        self.assertTrue(lyapunov.is_exceptional(
            self.roa, models.SimState(omega_u)))
        self.assertFalse(lyapunov.is_exceptional(
            self.roa, models.SimState(self.roa.constants['omega_s'])))

    def test_center(self) -> None:
        self.assertEqual(('omega',), self.roa.columns)
        self.assertEqual((self.roa.constants['omega_s'],), self.roa.center)


class RoaForModelTest(unittest.TestCase):
    def test_defaults(self) -> None:
        self.assertIsNone(lyapunov.default_roa_kind(_Model.CONVENTIONAL_LOAD))
        self.assertIs(_Kind.OMEGA_S,
                      lyapunov.default_roa_kind(_Model.IMPROVED_LOAD))
        self.assertIs(_Kind.OVAL_O,
                      lyapunov.default_roa_kind(_Model.IMPROVED_CLOSED_LOOP))
        self.assertIs(_Kind.SMIB_LEVEL_SET,
                      lyapunov.default_roa_kind(_Model.SMIB_IMPROVED))

    def test_conventional_load_has_none(self) -> None:
        self.assertIsNone(lyapunov.roa_for_model(_Model.CONVENTIONAL_LOAD,
                                                 machines.load(2.0)))

    def test_losses_use_reduced_parameters(self) -> None:
        p = machines.load(P_e=2.0, D_m=2e-5)
        roa = lyapunov.roa_for_model(_Model.IMPROVED_LOAD_WITH_LOSSES, p)
        self.assertEqual(equilibria.reduce_losses(p), roa.params)

    def test_explicit_kind(self) -> None:
        p = machines.load(P_e=2.0)
        roa = lyapunov.roa_for_model(_Model.IMPROVED_LOAD, p, _Kind.OMEGA_K)
        self.assertIs(_Kind.OMEGA_K, roa.kind)

    def test_mismatched_kind(self) -> None:
        self.assertFalse(lyapunov.applies(_Kind.OMEGA_S,
                                          _Model.SMIB_IMPROVED))
        self.assertRaises(exceptions.InvalidConfig, lyapunov.roa_for_model,
                          _Model.SMIB_IMPROVED, machines.smib(),
                          _Kind.OMEGA_S)

    def test_roa_set_dispatch(self) -> None:
        p = machines.smib()
        self.assertEqual(lyapunov.smib_set(p),
                         lyapunov.roa_set(_Kind.SMIB_LEVEL_SET, p))


class InstrumentationTest(unittest.TestCase):
    def test_load(self) -> None:
        p = machines.load(P_e=2.0)
        v, vdot = lyapunov.instrumentation(_Kind.OMEGA_S,
                                           _Model.IMPROVED_LOAD, p)
        omegas = np.array([200.0, 350.0, 500.0])
        np.testing.assert_array_equal(lyapunov.v_load(p, omegas), v(omegas))
        np.testing.assert_array_equal(lyapunov.vdot_load(p, omegas),
                                      vdot(omegas))

    def test_closed_loop_component_order(self) -> None:
        p = machines.load(P_e=2.0)
        v, vdot = lyapunov.instrumentation(_Kind.OVAL_O,
                                           _Model.IMPROVED_CLOSED_LOOP, p)
        s = models.SimState(300.0, xi=0.5)
        self.assertEqual(lyapunov.u_closed_loop(p, s), v(s.omega, s.xi))
        self.assertEqual(lyapunov.udot_closed_loop(p, s),
                         vdot(s.omega, s.xi))

    def test_smib(self) -> None:
        p = machines.smib()
        s = models.SimState(370.0, delta=0.2)
        v, vdot = lyapunov.instrumentation(_Kind.SMIB_LEVEL_SET,
                                           _Model.SMIB_IMPROVED, p)
        self.assertEqual(lyapunov.v_smib(p, s), v(s.delta, s.omega))
        self.assertEqual(lyapunov.vdot_smib_improved(p, s),
                         vdot(s.delta, s.omega))


class OvalGridTest(unittest.TestCase):
    def test_membership_matches_inequality(self) -> None:
        p = machines.load(P_e=2.0)
        roa = lyapunov.oval_set(p)
        xi_bar = p.P_m - p.P_e
        reach = math.sqrt(2.0 * roa.level)
        for xi in np.linspace(xi_bar - 1.2 * reach, xi_bar + 1.2 * reach,
                              101):
            for omega in np.linspace(-0.2 * OMEGA_STAR, 2.2 * OMEGA_STAR,
                                     101):
                energy = (0.5 * (xi - xi_bar) ** 2
                          + 0.5 * p.J * (omega - OMEGA_STAR) ** 2)
                if math.isclose(energy, roa.level, rel_tol=1e-9):
                    continue
                s = models.SimState(float(omega), xi=float(xi))
                self.assertEqual(bool(energy < roa.level),
                                 lyapunov.roa_contains(roa, s), str(s))


class ConfinementTest(unittest.TestCase):
    def test_potential_confined_between_delta_minus_and_saddle(self) -> None:
        for P_m in np.linspace(0.0, 1.2, 13):
            p = machines.smib(P_m=float(P_m))
            consts = lyapunov.smib_constants(p)
            deltas = np.linspace(consts.delta_minus, math.pi / 2, 2001)
            potential = lyapunov.potential_smib(p, deltas)
            outside = lyapunov.potential_smib(
                p, np.array([consts.delta_minus - 1e-3,
                             math.pi / 2 + 1e-3]))
            with self.subTest(P_m=P_m):
                self.assertGreater(consts.delta_minus, -math.pi / 2 - 1e-9)
                self.assertTrue(np.all(potential <= consts.c_p + 1e-11))
                self.assertTrue(np.all(np.diff(potential, 2) >= -1e-15))
                self.assertTrue(np.all(outside > consts.c_p))


def _central_rate(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    return (values[2:] - values[:-2]) / (times[2:] - times[:-2])


class AlongTrajectoryTest(unittest.TestCase):
    cfg = integrator.IntegrationConfig(dt=1e-2, t_max=20.0, conv_tol=1e-12)

    def setUp(self) -> None:
        self.p = machines.load(P_e=2.0)

    def _assert_rate(self, expected: np.ndarray, values: np.ndarray,
                     times: np.ndarray) -> None:
        np.testing.assert_allclose(
            _central_rate(values, times), expected[1:-1], rtol=0,
            atol=1e-4 * float(np.max(np.abs(expected))))

    def test_closed_loop_energy_dissipates(self) -> None:
        xi_bar = self.p.P_m - self.p.P_e
        for omega, xi in ((0.9 * OMEGA_STAR, xi_bar + 1.0),
                          (1.2 * OMEGA_STAR, xi_bar - 2.0),
                          (0.6 * OMEGA_STAR, xi_bar)):
            traj = integrator.integrate(_Model.IMPROVED_CLOSED_LOOP, self.p,
                                        models.SimState(omega, xi=xi),
                                        self.cfg)
            energy = np.array([lyapunov.u_closed_loop(self.p, s)
                               for s in traj.states()])
            omegas = traj.column('omega')
            assert omegas is not None
            with self.subTest(omega=omega, xi=xi):
                self.assertIs(integrator.Verdict.MAX_TIME, traj.verdict)
                self._assert_rate(-self.p.D_d * (omegas - OMEGA_STAR) ** 2,
                                  energy, traj.times)
                self.assertTrue(np.all(np.diff(energy) <= 1e-12))

    def test_storage_rate_under_constant_input(self) -> None:
        u_bar = 0.3
        omega_s = equilibria.equilibria_load(self.p, u_bar).omega_s
        for u in (-0.5, u_bar, 1.0):
            driven = self.p.replace(P_m=self.p.P_m + u)
            traj = integrator.integrate(_Model.IMPROVED_LOAD, driven,
                                        models.SimState.from_frequency(58.0),
                                        self.cfg)
            omegas = traj.column('omega')
            assert omegas is not None
            storage = lyapunov.w_storage(self.p, omegas, omega_s)
            defect = lyapunov.passivity_defect(self.p, omegas, u_bar)
            supply = lyapunov.supply_rate(self.p, omegas, u, u_bar)
            with self.subTest(u=u):
                self._assert_rate(defect + supply, storage, traj.times)
                self.assertTrue(np.all(defect <= 0.0))


def _chain_rule(v: lyapunov.Instrument,
                field: Callable[..., Tuple[Any, ...]],
                coords: List[np.ndarray],
                steps: List[float]) -> np.ndarray:
    """grad V . f, with the gradient taken by central differences."""
    derivatives = field(*coords)
    rate = np.zeros_like(coords[0])
    for i, h in enumerate(steps):
        up = list(coords)
        down = list(coords)
        up[i] = coords[i] + h
        down[i] = coords[i] - h
        rate = rate + (v(*up) - v(*down)) / (2 * h) * derivatives[i]
    return rate


class InSetRateTest(unittest.TestCase):
    """The analytic dV/dt against the chain rule on states drawn from
    inside each estimate."""

    count = 1000

    def setUp(self) -> None:
        self.rng = np.random.default_rng(31)

    def _check(self, kind: lyapunov.RoaKind, model: models.ModelKind,
               p: models.GeneratorParams,
               box: List[Tuple[float, float]],
               steps: List[float]) -> None:
        roa = lyapunov.roa_for_model(model, p, kind)
        assert roa is not None
        v, vdot = lyapunov.instrumentation(kind, model, p)
        samples: List[np.ndarray] = []
        while sum(len(s) for s in samples) < self.count:
            batch = np.column_stack([self.rng.uniform(low, high, self.count)
                                     for low, high in box])
            samples.append(batch[v(*batch.T) <= roa.level])
        coords = list(np.concatenate(samples)[:self.count].T)
        analytic = vdot(*coords)
        chain = _chain_rule(v, models.vector_field(model, p), coords, steps)
        np.testing.assert_allclose(
            chain, analytic, rtol=1e-6,
            atol=1e-8 * float(np.max(np.abs(analytic))))

    def test_load_set(self) -> None:
        p = machines.load(P_e=2.0)
        pair = equilibria.equilibria_load(p)
        self._check(_Kind.OMEGA_S, _Model.IMPROVED_LOAD, p,
                    [(pair.omega_u, 2 * pair.omega_s - pair.omega_u)],
                    [1e-3])

    def test_oval(self) -> None:
        p = machines.load(P_e=2.0)
        reach = math.sqrt(p.J) * OMEGA_STAR
        xi_bar = p.P_m - p.P_e
        self._check(_Kind.OVAL_O, _Model.IMPROVED_CLOSED_LOOP, p,
                    [(0.05 * OMEGA_STAR, 2 * OMEGA_STAR),
                     (xi_bar - reach, xi_bar + reach)],
                    [1e-3, 1e-3])

    def test_smib_level_set(self) -> None:
        p = machines.smib()
        consts = lyapunov.smib_constants(p)
        reach = math.sqrt(2 * consts.c / p.J)
        self._check(_Kind.SMIB_LEVEL_SET, _Model.SMIB_IMPROVED, p,
                    [(consts.delta_minus, math.pi / 2),
                     (OMEGA_STAR - reach, OMEGA_STAR + reach)],
                    [1e-6, 1e-3])

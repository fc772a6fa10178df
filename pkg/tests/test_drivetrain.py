import math

import pytest
from hypothesis import given, settings, strategies as st

from hydrotrade.components import MotorModel
from hydrotrade.drivetrain import (
    INERTIA, SPEED, OperatingPointLoss, TaskRequirement, motor_loss, operating_point,
    rated_joule_loss, ratio_limits, solve_ratio,
)
from hydrotrade.errors import CapabilityError, DomainError, InfeasibleError, SolverError
from hydrotrade.scaling import INERTIA as INERTIA_Q, SPEED as SPEED_Q, TORQUE, MASS, ScalingLaw

from oracles import closed_form_motor_torque, grid_search_ratio, random_instances

MOTOR = MotorModel()
ENVELOPE = TaskRequirement(100.0, 9.4, 0.035)


def motor_from(inst):
    return MotorModel(
        ScalingLaw(inst["k_mass"], inst["a_mass"], TORQUE, MASS),
        ScalingLaw(inst["k_speed"], inst["a_speed"], TORQUE, SPEED_Q),
        ScalingLaw(inst["k_inertia"], inst["a_inertia"], TORQUE, INERTIA_Q),
    )


def test_envelope_point_is_inertia_bound():
    sol = solve_ratio(ENVELOPE, MOTOR, 0.9)
    assert sol.binding == INERTIA
    assert 3.4 <= sol.ratio <= 3.6
    assert 31 <= sol.motor_torque <= 33
    assert 3.4 <= sol.speed_limit <= 4.0
    assert sol.converged and sol.residual <= 1e-9
    tau, branch = closed_form_motor_torque(100, 9.4, 0.035, 0.9, 309, -0.64, 2.1e-5, 1.42)
    assert branch == "inertia"
    assert sol.motor_torque == pytest.approx(tau, rel=1e-8)


def test_quantized_ratio_matches_half_step():
    sol = solve_ratio(ENVELOPE, MOTOR, 0.9, ratio_step=0.1)
    assert sol.ratio == pytest.approx(3.5)
    assert sol.motor_torque == pytest.approx(100 / (0.9 * 3.5))
    assert sol.inertia_limit >= sol.ratio and sol.speed_limit >= sol.ratio


def test_no_inertia_bound_is_speed_bound():
    req = TaskRequirement(100.0, 9.4, None)
    sol = solve_ratio(req, MOTOR, 0.9)
    assert sol.binding == SPEED
    assert sol.ratio == pytest.approx(MOTOR.nominal_speed(sol.motor_torque) / 9.4, rel=1e-8)
    assert math.isinf(sol.inertia_limit)


def test_walking_point_closed_form():
    req = TaskRequirement(33.3, 9.4, 0.035)
    sol = solve_ratio(req, MOTOR, 0.9)
    c = 33.3 * 9.4 / (0.9 * 309)
    assert sol.binding == SPEED
    assert sol.motor_torque == pytest.approx(c ** (1 / (1 - 0.64)), rel=1e-8)
    assert sol.motor_torque == pytest.approx(1.39, abs=0.01)
    n, tau = grid_search_ratio(33.3, 9.4, 0.035, 0.9, 0.3, 0.71, 309, -0.64, 2.1e-5, 1.42)
    assert sol.ratio == pytest.approx(n, rel=0.005)
    assert sol.motor_torque == pytest.approx(tau, rel=0.005)


@pytest.mark.parametrize("inst", random_instances(100), ids=lambda i: f"T{i['torque']:.0f}")
def test_solver_matches_grid_search(inst):
    motor = motor_from(inst)
    req = TaskRequirement(inst["torque"], inst["speed"], inst["inertia_bound"])
    sol = solve_ratio(req, motor, inst["eta"])
    n, tau = grid_search_ratio(inst["torque"], inst["speed"], inst["inertia_bound"], inst["eta"],
                               inst["k_mass"], inst["a_mass"], inst["k_speed"], inst["a_speed"],
                               inst["k_inertia"], inst["a_inertia"])
    assert sol.ratio == pytest.approx(n, rel=0.005)
    assert sol.motor_torque == pytest.approx(tau, rel=0.005)


@settings(max_examples=100, deadline=None)
@given(st.floats(1.0, 300.0), st.floats(0.5, 30.0),
       st.one_of(st.none(), st.floats(1e-3, 0.5)), st.floats(0.5, 1.0))
def test_binding_branch_is_the_minimum(torque, speed, inertia, eta):
    sol = solve_ratio(TaskRequirement(torque, speed, inertia), MOTOR, eta)
    inertia_n, speed_n = ratio_limits(TaskRequirement(torque, speed, inertia), MOTOR,
                                      sol.motor_torque)
    binding, other = (inertia_n, speed_n) if sol.binding == INERTIA else (speed_n, inertia_n)
    assert other >= binding * (1 - 1e-12)
    assert sol.ratio == pytest.approx(binding, rel=1e-8)
    assert sol.reflected_inertia <= (inertia or math.inf) * (1 + 1e-8)


@given(st.floats(1.0, 300.0), st.floats(0.5, 30.0), st.floats(0.5, 1.0))
def test_doubling_torque_scales_by_closed_form(torque, speed, eta):
    tau1 = solve_ratio(TaskRequirement(torque, speed), MOTOR, eta).motor_torque
    tau2 = solve_ratio(TaskRequirement(2 * torque, speed), MOTOR, eta).motor_torque
    assert tau2 / tau1 == pytest.approx(2 ** (1 / (1 - 0.64)), rel=1e-7)


def test_solver_error_carries_residual():
    with pytest.raises(SolverError) as info:
        solve_ratio(ENVELOPE, MOTOR, 0.9, max_iter=3)
    assert info.value.iterations == 3
    assert info.value.residual > 1e-9


def test_solver_preconditions():
    with pytest.raises(DomainError):
        solve_ratio(TaskRequirement(0.0, 1.0), MOTOR)
    with pytest.raises(DomainError):
        solve_ratio(TaskRequirement(10.0, 0.0), MOTOR)
    with pytest.raises(DomainError):
        solve_ratio(ENVELOPE, MOTOR, 1.5)


def test_no_positive_fixed_point_is_infeasible():
    # an exponent >= 1 on the speed branch has no attracting fixed point
    motor = MotorModel(speed_law=ScalingLaw(1e-3, -1.5, TORQUE, SPEED_Q))
    with pytest.raises((InfeasibleError, SolverError)):
        solve_ratio(TaskRequirement(10.0, 5.0), motor, 0.9)


def test_peak_torque_halves_continuous_requirement():
    walk = TaskRequirement(100 / 3, 9.4, 0.035)
    sol = solve_ratio(walk, MOTOR, 0.9, peak_torque=100.0)
    direct = solve_ratio(TaskRequirement(50.0, 9.4, 0.035), MOTOR, 0.9)
    assert sol.motor_torque == pytest.approx(direct.motor_torque)


# -- losses -------------------------------------------------------------------

def test_rated_point_efficiency():
    tau = 32.0
    omega = MOTOR.nominal_speed(tau)
    loss = motor_loss(MOTOR, tau, tau, omega)
    assert tau * omega / (tau * omega + loss) == pytest.approx(0.85, rel=1e-12)


def test_zero_torque_zero_loss():
    assert motor_loss(MOTOR, 32.0, 0.0) == 0.0


def test_holding_loss():
    expected = (1 / 0.85 - 1) * 32 * (309 * 32**-0.64)
    assert motor_loss(MOTOR, 32.0, 32.0, 0.0) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(190, abs=1.0)


def test_loss_above_peak_rejected():
    assert motor_loss(MOTOR, 10.0, 20.0) == pytest.approx(4 * rated_joule_loss(MOTOR, 10.0))
    with pytest.raises(CapabilityError):
        motor_loss(MOTOR, 10.0, 20.1)


@given(st.floats(0.1, 200.0), st.floats(0.0, 2.0), st.floats(0.0, 2.0))
def test_loss_positive_and_increasing(tc, f1, f2):
    lo, hi = sorted((f1 * tc, f2 * tc))
    l_lo, l_hi = motor_loss(MOTOR, tc, lo), motor_loss(MOTOR, tc, hi)
    assert l_lo >= 0
    if hi > lo * (1 + 1e-9) and hi > 1e-6:
        assert l_hi > l_lo
    assert motor_loss(MOTOR, tc, -hi) == l_hi


def test_holding_operating_point():
    sol = solve_ratio(ENVELOPE, MOTOR, 0.9, ratio_step=0.1)
    op = operating_point(TaskRequirement(100.0, 0.0), sol, MOTOR, 0.9)
    assert op.efficiency == 0.0
    assert op.mechanical_power == 0.0
    assert op.total_loss == op.joule_loss
    assert op.joule_loss == pytest.approx(rated_joule_loss(MOTOR, sol.motor_torque))


def test_walking_point_on_own_drivetrain():
    req = TaskRequirement(100 / 3, 9.4, 0.035)
    sol = solve_ratio(req, MOTOR, 0.9)
    op = operating_point(req, sol, MOTOR, 0.9)
    assert op.efficiency == pytest.approx(0.85 * 0.9, rel=1e-6)


def test_baseline_at_slow_point_loses_more():
    lam = 3.0
    slow = TaskRequirement(100.0, 9.4 / lam)
    base = solve_ratio(ENVELOPE, MOTOR, 0.9, ratio_step=0.1)
    own = solve_ratio(slow, MOTOR, 0.9, ratio_step=0.1)
    op_base = operating_point(slow, base, MOTOR, 0.9)
    op_own = operating_point(slow, own, MOTOR, 0.9)
    assert op_base.efficiency < op_own.efficiency - 0.1
    # N = 3.5 drive, quadratic loss at 100/(0.9*3.5) N*m on a 100/(0.9*3.5) N*m motor
    tau = 100 / (0.9 * 3.5)
    expected_joule = (1 / 0.85 - 1) * tau * 309 * tau**-0.64
    assert op_base.joule_loss == pytest.approx(expected_joule, rel=1e-9)
    extra = op_base.total_loss - op_own.total_loss
    assert 1.0 <= extra * 2 / 150 <= 2.0


def test_overspeed_rejected():
    sol = solve_ratio(ENVELOPE, MOTOR, 0.9)
    with pytest.raises(CapabilityError):
        operating_point(TaskRequirement(100.0, 30.0), sol, MOTOR, 0.9)


@given(st.floats(0.0, 1e4), st.floats(0.0, 1e3), st.floats(0.0, 1e3), st.floats(0.0, 1e3))
def test_power_balance(mech, joule, trans, pump):
    op = OperatingPointLoss.from_parts(mech, joule, trans, pump)
    assert op.total_input_power == pytest.approx(mech + op.total_loss)
    assert 0.0 <= op.efficiency <= 1.0


def test_requirement_invariants():
    with pytest.raises(DomainError):
        TaskRequirement(-1.0, 1.0)
    with pytest.raises(DomainError):
        TaskRequirement(1.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        TaskRequirement(1.0, 1.0, duty=1.5)

import math

import numpy as np
import pytest

from qmle.likelihood import Frequencies, Likelihood
from qmle.measurements import pauli6_register, product_pom, tetrahedron_register
from qmle.operators import add_white_noise, haar_random_pure, pure_to_density, random_density, state_distance
from qmle.sampling import SamplingPlan, born_probs, simulate
from qmle.solvers import (ALGORITHMS, CONVERGED, MAX_ITER, STALLED, TIME_OUT, SolverConfig, solve)
from qmle.solvers.apg import apg_solve
from qmle.solvers.base import SolverTrace, TraceRecord, check_termination
from qmle.solvers.cg import line_search
from qmle.solvers.hybrid import cg_apg_solve

from contracts import APGAuditor


def noisy_problem(n, seed, mode="exact", reg=None):
    pom = product_pom(reg or pauli6_register(), n)
    rho = add_white_noise(pure_to_density(haar_random_pure(pom.dim, seed)), 0.1)
    return pom, rho, simulate(rho, pom, SamplingPlan(mode, 100, None, seed))


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(algorithm="newton")
    with pytest.raises(ValueError):
        SolverConfig(beta=1.0)
    with pytest.raises(ValueError):
        SolverConfig(alpha=1.0)
    with pytest.raises(ValueError):
        SolverConfig(time_budget=0)


def trace_of(values):
    return SolverTrace([TraceRecord(i + 1, 0.1 * i, f, 1.0, False, "X") for i, f in enumerate(values)])


def test_termination_priority():
    cfg = SolverConfig(f_target=1.0, stall_window=2, max_iter=3, time_budget=0.05)
    # target beats every other reason
    assert check_termination(trace_of([2.0, 2.0, 0.5]), cfg) == CONVERGED
    assert check_termination(trace_of([2.0, 2.0, 2.0]), cfg) == STALLED
    assert check_termination(trace_of([3.0, 2.5, 2.0]), cfg) == MAX_ITER
    assert check_termination(trace_of([3.0, 2.5]), cfg) == TIME_OUT
    assert check_termination(trace_of([3.0]), cfg) is None


def test_stall_uses_best_so_far_and_phase_start():
    cfg = SolverConfig(stall_window=2)
    # an overshoot after an improvement is not progress
    assert check_termination(trace_of([3.0, 2.0, 5.0, 4.0]), cfg) == STALLED
    assert check_termination(trace_of([3.0, 2.0, 1.5, 1.0]), cfg) is None
    assert check_termination(trace_of([1.0, 1.0, 1.0, 0.9]), cfg, since=2) is None


def test_line_search_on_parabola():
    phi = lambda s: ((s - 3.0) ** 2, s)
    s, f, payload = line_search(phi, 9.0, 0.1)
    assert abs(s - 3.0) < 1e-9 and payload == s
    s, _, _ = line_search(phi, 9.0, 100.0)
    assert abs(s - 3.0) < 1e-6
    s, _, _ = line_search(phi, 9.0, 0.1, s_max=1.0)
    assert s == 1.0
    assert line_search(lambda s: (1.0 + s, None), 1.0, 0.1, max_evals=5) is None


@pytest.mark.parametrize("alg", ALGORITHMS)
def test_qubit_solution(alg):
    pom = product_pom(pauli6_register(), 1)
    truth = np.diag([0.7, 0.3]).astype(complex)
    freq = Frequencies.exact(born_probs(truth, pom))
    res = solve(freq, pom, SolverConfig(algorithm=alg, stall_tol=1e-15, max_iter=20000))
    assert np.linalg.norm(res.rho - truth) < 1e-6
    assert res.F >= freq.entropy() - 1e-12


@pytest.mark.parametrize("alg", ALGORITHMS)
def test_solvers_reach_target(alg):
    pom, rho, freq = noisy_problem(2, 7)
    target = freq.entropy() - math.log(0.999) / (100 * 9)
    res = solve(freq, pom, SolverConfig(algorithm=alg, f_target=target))
    assert res.status == CONVERGED
    assert res.F <= target
    assert res.trace.first_reaching(target).iteration == len(res.trace)
    assert state_distance(res.rho, rho).trace_distance < 0.05


def test_best_iterate_is_returned():
    pom, _, freq = noisy_problem(2, 3, mode="per_setting")
    res = solve(freq, pom, SolverConfig(algorithm="apg", max_iter=200))
    assert res.F <= res.trace.F.min()
    lik = Likelihood(freq, pom)
    assert lik.value(lik.probs(res.rho)) == pytest.approx(res.F, rel=1e-14)


@pytest.mark.parametrize("alg", ALGORITHMS)
def test_deterministic(alg):
    pom, _, freq = noisy_problem(2, 11, mode="per_setting")
    cfg = SolverConfig(algorithm=alg, max_iter=60)
    a, b = solve(freq, pom, cfg), solve(freq, pom, cfg)
    assert np.array_equal(a.trace.F, b.trace.F)
    assert np.array_equal(a.rho, b.rho)


def test_max_iter_and_time_out():
    pom, _, freq = noisy_problem(3, 2, mode="per_setting")
    res = solve(freq, pom, SolverConfig(algorithm="dg", max_iter=5))
    assert res.status == MAX_ITER and len(res.trace) == 5
    res = solve(freq, pom, SolverConfig(algorithm="dg", time_budget=1e-9))
    assert res.status == TIME_OUT and len(res.trace) == 1


def test_apg_contracts_pauli():
    pom, _, freq = noisy_problem(3, 5, mode="per_setting")
    cfg = SolverConfig(algorithm="apg", max_iter=300)
    audit = APGAuditor(Likelihood(freq, pom), cfg.gamma)
    apg_solve(freq, pom, cfg, monitor=audit)
    assert audit.steps > 10
    assert audit.violations == []


def test_apg_contracts_tetrahedron():
    pom = product_pom(tetrahedron_register(), 3)
    truth = add_white_noise(pure_to_density(haar_random_pure(8, 5)), 0.1)
    freq = simulate(truth, pom, SamplingPlan("global", total_shots=3000, seed=5))
    cfg = SolverConfig(algorithm="apg", max_iter=300)
    audit = APGAuditor(Likelihood(freq, pom), cfg.gamma)
    apg_solve(freq, pom, cfg, monitor=audit)
    assert audit.steps > 10
    assert audit.violations == []


def test_restart_fires_with_strict_gamma():
    pom, _, freq = noisy_problem(3, 5, mode="per_setting")
    cfg = SolverConfig(algorithm="apg", gamma=0.999, max_iter=100)
    audit = APGAuditor(Likelihood(freq, pom), cfg.gamma)
    res = apg_solve(freq, pom, cfg, monitor=audit)
    assert audit.restarts > 0 and audit.violations == []
    assert any(r.restarted for r in res.trace.records)


def test_dg_is_monotone():
    pom, _, freq = noisy_problem(2, 4, mode="per_setting")
    res = solve(freq, pom, SolverConfig(algorithm="dg", max_iter=300))
    assert np.all(np.diff(res.trace.F) <= 0)


def test_cg_is_monotone():
    pom, _, freq = noisy_problem(3, 4, mode="per_setting")
    res = solve(freq, pom, SolverConfig(algorithm="cg", max_iter=300))
    assert np.all(np.diff(res.trace.F) < 0)


def test_switch_immediately_with_wide_angle():
    pom, _, freq = noisy_problem(3, 8, mode="per_setting")
    res = cg_apg_solve(freq, pom, SolverConfig(phi=math.pi, max_iter=200))
    phases = res.trace.phases
    assert phases[0] == "CG" and phases[1] == "APG"
    assert set(phases[1:]) == {"APG"}


def test_no_angle_switch_with_zero_angle():
    pom, _, freq = noisy_problem(2, 8, mode="per_setting")
    hybrid = cg_apg_solve(freq, pom, SolverConfig(phi=0.0, max_iter=3000))
    cg = solve(freq, pom, SolverConfig(algorithm="cg", max_iter=3000))
    n_cg = hybrid.trace.phases.count("CG")
    # with cos(phi) = 1 only a CG stall hands over, so the CG phase replays plain CG
    assert cg.status == STALLED
    assert n_cg == len(cg.trace)
    assert np.array_equal(hybrid.trace.F[:n_cg], cg.trace.F)
    assert hybrid.trace.phases[n_cg:] and set(hybrid.trace.phases[n_cg:]) == {"APG"}


def test_product_and_dense_kernels_agree():
    pom, _, freq = noisy_problem(3, 9, mode="per_setting")
    a = solve(freq, pom, SolverConfig(algorithm="apg", max_iter=50))
    b = solve(freq, pom, SolverConfig(algorithm="apg", max_iter=50, product_kernel=False))
    assert np.allclose(a.trace.F, b.trace.F, rtol=1e-9)


def test_custom_start_state():
    pom, _, freq = noisy_problem(2, 1)
    rho0 = random_density(4, 2)
    res = solve(freq, pom, SolverConfig(algorithm="dg", max_iter=1, rho0=rho0))
    lik = Likelihood(freq, pom)
    assert res.trace.F[0] < lik.value(lik.probs(rho0)) + 1e-15
    with pytest.raises(ValueError):
        solve(freq, pom, SolverConfig(algorithm="apg", rho0=np.eye(2) / 2))

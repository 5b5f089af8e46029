"""Acceptance criteria 1-10, each at its stated tolerance and runtime budget."""

import pytest

from entropy_pf import suites


@pytest.fixture(scope="module")
def eps_sweep():
    return suites.eps_convergence_suites()


def check(result, record):
    record(result)
    assert result.passed, result.line()


def test_criterion_01_regularized_log(record_acceptance):
    check(suites.yosida_suite(), record_acceptance)


def test_criterion_02_mollified_beta(record_acceptance):
    check(suites.beta_suite(), record_acceptance)


@pytest.mark.slow
def test_criterion_03_phase_maximum_principle(record_acceptance):
    check(suites.max_principle_suite(), record_acceptance)


@pytest.mark.slow
def test_criterion_04_temperature_positivity(record_acceptance):
    check(suites.positivity_suite(), record_acceptance)


@pytest.mark.slow
def test_criterion_05_eps_convergence(eps_sweep, record_acceptance):
    check(eps_sweep[0], record_acceptance)


@pytest.mark.slow
def test_criterion_06_energy_monitors(eps_sweep, record_acceptance):
    check(eps_sweep[1], record_acceptance)


def test_criterion_07_moser_weights(record_acceptance):
    check(suites.moser_suite(), record_acceptance)


@pytest.mark.slow
def test_criterion_08_oracle_equivalence(record_acceptance):
    check(suites.oracle_suite(), record_acceptance)


@pytest.mark.slow
def test_criterion_09_lipschitz_stability(record_acceptance):
    check(suites.stability_suite(), record_acceptance)


def test_criterion_10_steady_states(record_acceptance):
    check(suites.steady_state_suite(), record_acceptance)

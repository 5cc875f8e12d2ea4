import math

import numpy as np
import pytest

from weylscale import (
    F_function,
    F_h_function,
    Phi_function,
    Phi_h_function,
    WeylWord,
    covariance_from_hamiltonian,
    default_time_grid,
    evolve_word,
    inf_spectrum,
    j_h_function,
    kms_boundary_residuals,
    kms_model,
    make_operator,
    modular_operator,
    op_norm,
    quadratic_form,
    rescaled_kms_residuals,
    rescaled_modular,
    time_evolution,
    two_point_function,
)
from weylscale.errors import (
    DomainViolation,
    NonPositiveBeta,
    NonPositiveHamiltonian,
    OutOfRange,
    OutsideStrip,
)
from weylscale.spectral import INF, OperatorSpec, apply_function, spectral_distance

from conftest import random_vector

LOG2 = math.log(2.0)


@pytest.fixture
def scalar_model():
    return kms_model(make_operator([[LOG2]]), beta=1.0)


@pytest.fixture
def two_mode_model():
    return kms_model(make_operator(np.diag([0.5, 1.5])), beta=2.0)


class TestCovariance:
    def test_scalar_log_two(self):
        covariance = covariance_from_hamiltonian(make_operator([[LOG2]]), 1.0)
        assert inf_spectrum(covariance) == pytest.approx(3.0, abs=1e-14)

    def test_ground_state_limit(self):
        covariance = covariance_from_hamiltonian(make_operator([[5.0]]), 20.0)
        assert inf_spectrum(covariance) == pytest.approx(1.0, abs=1e-12)

    def test_norm_formula(self, scalar_model):
        epsilon, beta = scalar_model.epsilon, scalar_model.beta
        expected = (math.exp(beta * epsilon) + 1) / (math.exp(beta * epsilon) - 1)
        assert op_norm(scalar_model.covariance) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(3.0, abs=1e-14)

    def test_rejects_bad_inputs(self):
        with pytest.raises(NonPositiveHamiltonian):
            covariance_from_hamiltonian(make_operator([[-0.5]]), 1.0)
        with pytest.raises(NonPositiveBeta):
            covariance_from_hamiltonian(make_operator([[1.0]]), 0.0)


class TestModularOperator:
    def test_scalar_values(self):
        a3 = make_operator([[3.0]])
        assert inf_spectrum(modular_operator(a3, 1.0)) == pytest.approx(2.0)
        assert inf_spectrum(modular_operator(a3, 2.0)) == pytest.approx(math.sqrt(2.0))

    def test_singular_at_one(self):
        with pytest.raises(DomainViolation):
            modular_operator(make_operator(np.diag([1.0, 3.0])), 1.0)

    def test_exponential_identity(self, two_mode_model):
        # the modular operator is the exponential of the hamiltonian
        exponential = apply_function(two_mode_model.hamiltonian, math.exp)
        assert spectral_distance(two_mode_model.modular, exponential) <= 1e-10

    def test_functional_calculus_route_back(self, two_mode_model):
        # ((A+1)/(A-1))^(1/beta) rebuilt from the covariance agrees with e^h
        rebuilt = apply_function(
            two_mode_model.covariance,
            lambda lam: ((lam + 1) / (lam - 1)) ** (1 / two_mode_model.beta),
        )
        exponential = apply_function(two_mode_model.hamiltonian, math.exp)
        assert spectral_distance(rebuilt, exponential) <= 1e-10


class TestTimeEvolution:
    def test_zero_time_identity(self, scalar_model):
        assert np.allclose(time_evolution(scalar_model.modular, 0.0), np.eye(1))

    def test_group_law(self, two_mode_model, rng):
        for _ in range(5):
            s, t = rng.uniform(-3, 3, 2)
            left = time_evolution(two_mode_model.modular, s) @ time_evolution(
                two_mode_model.modular, t
            )
            right = time_evolution(two_mode_model.modular, s + t)
            assert np.max(np.abs(left - right)) <= 1e-12

    def test_scalar_half_period(self):
        modular = make_operator([[2.0]])
        value = time_evolution(modular, math.pi / LOG2)[0, 0]
        assert value == pytest.approx(-1.0, abs=1e-12)

    def test_form_invariance(self, two_mode_model, rng):
        covariance = two_mode_model.covariance
        for _ in range(5):
            t = float(rng.uniform(-4, 4))
            transport = time_evolution(two_mode_model.modular, t)
            f, g = random_vector(rng, 2), random_vector(rng, 2)
            assert abs(
                quadratic_form(covariance, transport @ f, transport @ g)
                - quadratic_form(covariance, f, g)
            ) <= 1e-12

    def test_evolve_word(self, two_mode_model):
        t = 0.7
        transport = time_evolution(two_mode_model.modular, t)
        f = np.array([1.0, 1j])
        evolved = evolve_word(WeylWord.generator(f, 2.0), two_mode_model.modular, t)
        assert evolved.coefficient(transport @ f) == pytest.approx(2.0)


class TestFAndPhi:
    def test_scalar_at_time_zero(self, scalar_model):
        f = np.array([1.0])
        value = F_function(scalar_model.covariance, scalar_model.modular, f, f, 0.0)
        assert value == pytest.approx(3.0)  # (1/2)(A+1) + (1/2)(A-1) = A

    def test_orthogonal_eigenvectors_vanish(self, two_mode_model):
        f = np.array([1.0, 0.0])
        g = np.array([0.0, 1.0])
        assert abs(F_function(two_mode_model.covariance, two_mode_model.modular, f, g, 0.3)) <= 1e-14

    def test_conjugation_symmetry(self, two_mode_model, rng):
        f = random_vector(rng, 2)
        for t in (-1.3, 0.4, 2.6):
            forward = F_function(two_mode_model.covariance, two_mode_model.modular, f, f, t)
            backward = F_function(two_mode_model.covariance, two_mode_model.modular, f, f, -t)
            assert backward == pytest.approx(np.conj(forward), abs=1e-13)

    def test_phi_on_real_axis_equals_f(self, two_mode_model, rng):
        f, g = random_vector(rng, 2), random_vector(rng, 2)
        for t in (-2.0, 0.0, 1.5):
            phi_val = Phi_function(
                two_mode_model.covariance, two_mode_model.modular, two_mode_model.beta, f, g, t
            )
            f_val = F_function(two_mode_model.covariance, two_mode_model.modular, f, g, t)
            assert abs(phi_val - f_val) <= 1e-12

    def test_scalar_at_top_boundary(self, scalar_model):
        f = np.array([1.0])
        value = Phi_function(
            scalar_model.covariance, scalar_model.modular, 1.0, f, f, 1j
        )
        # (1/2) 4 Delta^{-1} + (1/2) 2 Delta = 1 + 2 = 3 = F(f, f; 0)
        assert value == pytest.approx(3.0, abs=1e-12)

    def test_outside_strip_rejected(self, scalar_model):
        f = np.array([1.0])
        with pytest.raises(OutsideStrip):
            Phi_function(scalar_model.covariance, scalar_model.modular, 1.0, f, f, -0.1j)
        with pytest.raises(OutsideStrip):
            Phi_function(scalar_model.covariance, scalar_model.modular, 1.0, f, f, 1.5j)

    def test_strip_bound(self, scalar_model):
        f = np.array([1.0])
        report = kms_boundary_residuals(scalar_model, f, f)
        # |Phi| <= ||A + I|| on the strip for this model
        assert report.strip_sup <= 4.0 + 1e-12


class TestBoundaryResiduals:
    def test_scalar_model(self, scalar_model):
        f = np.array([1.0])
        report = kms_boundary_residuals(scalar_model, f, f, np.arange(-5.0, 5.5, 0.5))
        assert report.max_residual <= 1e-10

    def test_zero_vector_exact(self, scalar_model):
        report = kms_boundary_residuals(scalar_model, np.zeros(1), np.ones(1))
        assert report.max_residual == 0.0

    def test_two_mode_random_pair(self, two_mode_model, rng):
        f, g = random_vector(rng, 2), random_vector(rng, 2)
        report = kms_boundary_residuals(two_mode_model, f, g)
        assert report.max_residual <= 1e-10
        assert np.all(report.r0 >= 0) and np.all(report.r_beta >= 0)

    def test_grid_must_increase(self, scalar_model):
        with pytest.raises(OutOfRange):
            kms_boundary_residuals(scalar_model, np.ones(1), np.ones(1), [0.0, -1.0])

    def test_default_grid(self):
        grid = default_time_grid()
        assert len(grid) == 21
        assert grid[0] == -5.0 and grid[-1] == 5.0


class TestJh:
    def test_worked_value(self):
        assert j_h_function(2.0, 1.0 / 3.0, 1.0) == pytest.approx(1.25)

    def test_h_one_is_identity(self):
        for lam in (1.0, 2.5, 7.0):
            assert j_h_function(lam, 1.0, 2.0) == pytest.approx(lam)

    def test_agrees_with_rescaled_covariance_route(self):
        # (A_h + 1)/(A_h - 1) at A = 3, h = 1/3 gives 10/8
        assert j_h_function(2.0, 1.0 / 3.0, 1.0) == pytest.approx(10.0 / 8.0)

    def test_strictly_increasing(self):
        for h in np.arange(0.1, 1.0, 0.1):
            for beta in (0.5, 1.0, 2.0):
                grid = np.linspace(1.0, 100.0, 200)
                values = [j_h_function(lam, h, beta) for lam in grid]
                assert np.all(np.diff(values) > 0)

    def test_bounded_above_one(self):
        for h in (0.2, 0.5, 0.9):
            assert j_h_function(1.0, h, 1.0) == pytest.approx(1.0)
            assert j_h_function(1.3, h, 1.0) > 1.0

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            j_h_function(0.5, 0.5, 1.0)
        with pytest.raises(OutOfRange):
            j_h_function(1.0, 0.5, 0.0)
        with pytest.raises(OutOfRange):
            j_h_function(1.0, -0.5, 1.0)
        # beyond the pole in the restriction regime h > 1
        with pytest.raises(OutOfRange):
            j_h_function(2.5, 3.0, 1.0)


class TestRescaledModular:
    def test_scalar_worked_case(self, scalar_model):
        rescaled = rescaled_modular(scalar_model, 1.0 / 3.0)
        assert inf_spectrum(rescaled.modular_h) == pytest.approx(1.25)
        assert rescaled.delta_bottom == pytest.approx(math.log(1.25))
        assert rescaled.two_route_residual <= 1e-12

    def test_degenerate_at_one(self, scalar_model):
        rescaled = rescaled_modular(scalar_model, 1.0)
        assert spectral_distance(rescaled.modular_h, scalar_model.modular) <= 1e-12

    def test_bottom_matches_generator_spectrum_exactly(self, two_mode_model):
        for h in (0.25, 0.5, 0.75):
            rescaled = rescaled_modular(two_mode_model, h)
            assert inf_spectrum(rescaled.generator_h) == rescaled.delta_bottom
            assert rescaled.delta_bottom > 0

    def test_two_route_agreement(self, two_mode_model):
        for h in (0.25, 0.5, 0.75):
            assert rescaled_modular(two_mode_model, h).two_route_residual <= 1e-12

    def test_out_of_range(self, scalar_model):
        with pytest.raises(OutOfRange):
            rescaled_modular(scalar_model, 0.0)
        with pytest.raises(OutOfRange):
            rescaled_modular(scalar_model, 1.5)

    def test_unbounded_declaration(self):
        model = kms_model(
            OperatorSpec.from_atoms([(LOG2, 1)]), beta=1.0, unbounded_above=True
        )
        assert inf_spectrum(model.covariance) == 1.0
        assert op_norm(model.modular) == INF
        rescaled = rescaled_modular(model, 0.5)
        # A/h keeps spectrum above 1/h >= 1 in the rescaling regime
        assert all(atom.value >= 1.0 for atom in rescaled.covariance_h.atoms)


class TestRescaledBoundary:
    def test_scalar_value_at_zero(self, scalar_model):
        rescaled = rescaled_modular(scalar_model, 1.0 / 3.0)
        f = np.array([1.0])
        # (1/2)(A_h + 1) + (1/2)(A_h - 1) = A_h = 9
        assert Phi_h_function(rescaled, f, f, 0.0) == pytest.approx(9.0)
        assert F_h_function(rescaled, f, f, 0.0) == pytest.approx(9.0)

    def test_residuals_small(self, scalar_model, two_mode_model, rng):
        for model in (scalar_model, two_mode_model):
            dim = model.covariance.matrix.shape[0]
            f, g = random_vector(rng, dim), random_vector(rng, dim)
            for h in (0.25, 0.5, 0.75):
                report = rescaled_kms_residuals(rescaled_modular(model, h), f, g)
                assert report.max_residual <= 1e-10

    def test_h_one_degenerates_to_unrescaled(self, two_mode_model, rng):
        f, g = random_vector(rng, 2), random_vector(rng, 2)
        rescaled_report = rescaled_kms_residuals(rescaled_modular(two_mode_model, 1.0), f, g)
        plain_report = kms_boundary_residuals(two_mode_model, f, g)
        assert np.max(np.abs(rescaled_report.F_values - plain_report.F_values)) <= 1e-12
        assert np.max(np.abs(rescaled_report.Phi_lower - plain_report.Phi_lower)) <= 1e-12


class TestTwoPoint:
    def test_equal_vectors_flags_discrepancy(self):
        covariance = make_operator([[3.0]])
        modular = modular_operator(covariance, 1.0)
        f = np.array([1.0])
        report = two_point_function(covariance, modular, f, f, 0.0)
        # closed-form prefactor cancels at f = g, leaving exp(-F/2) = exp(-3/2)
        assert report.formula_value == pytest.approx(np.exp(-1.5))
        # the simulator sees omega(W_f W_f) = phi(2f) = exp(-<f,Af>)
        assert abs(report.oracle_value - np.exp(-3.0)) <= 1e-5
        assert not report.formula_matches_oracle

    def test_zero_first_vector_agrees(self):
        covariance = make_operator([[3.0]])
        modular = modular_operator(covariance, 1.0)
        g = np.array([0.8])
        report = two_point_function(covariance, modular, np.zeros(1), g, 1.2)
        assert abs(report.formula_value - np.exp(-0.25 * 3.0 * 0.64)) <= 1e-12
        assert report.formula_matches_oracle

    def test_oracle_matches_direct_closed_form(self, rng):
        covariance = make_operator([[2.0]])
        modular = modular_operator(covariance, 1.0)
        f = random_vector(rng, 1) * 0.6
        g = random_vector(rng, 1) * 0.6
        t = 0.9
        report = two_point_function(covariance, modular, f, g, t)
        moved = time_evolution(modular, t) @ g
        phase = np.exp(-0.5j * np.vdot(f, moved).imag)
        direct = phase * np.exp(-0.25 * quadratic_form(covariance, f + moved, f + moved).real)
        assert abs(report.oracle_value - direct) <= 1e-5


def test_unbounded_declaration_propagates_through_rescaling():
    model = kms_model(
        OperatorSpec.from_atoms([(LOG2, 1)]), beta=1.0, unbounded_above=True
    )
    rescaled = rescaled_modular(model, 0.5)
    # spectrum of A accumulates at 1, so A/h accumulates at 1/h
    assert inf_spectrum(rescaled.covariance_h) == 2.0
    # j_h maps the unbounded top of Delta to the finite limit (1+h)/(1-h)
    assert op_norm(rescaled.modular_h) == pytest.approx(3.0)
    assert op_norm(rescaled.generator_h) == pytest.approx(math.log(3.0))

"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the verdict lines.
Tolerances are pinned inline; nothing is deferred to later calibration.
"""

import math
import time

import numpy as np
import pytest
import yaml

from weylscale import (
    GnsModel,
    INF,
    MixtureMeasure,
    RescaledFockState,
    WeylWord,
    check_sigma_h_positivity,
    commutant_residual,
    evaluate_state,
    gamma_iso,
    gns_expectation,
    gram_matrix,
    inf_spectrum,
    is_quasi_equivalent_to_fock,
    kms_boundary_residuals,
    kms_model,
    lambda_star,
    make_operator,
    nonregular_extension,
    one_particle_number_expectation,
    quasi_free_functional,
    rescale_functional,
    rescaled_kms_residuals,
    rescaled_modular,
    restricted_kms_residuals,
    restricted_model,
    scan_for_gram_violation,
    spectral_correspondence_check,
    spectral_distance,
    trace_state,
    two_point_criterion,
    universally_invariant_functional,
    weyl_adjoint,
    weyl_multiply,
)
from weylscale.cli import main as cli_main
from weylscale.fock import c_parameter
from weylscale.restriction import check_trace_property
from weylscale.spectral import apply_function
from weylscale.weyl import word_distance

from conftest import random_covariance, random_vector, random_word, words_close

LOG2 = math.log(2.0)


def _verdict(number: int, description: str, ok: bool, detail: str = ""):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {description}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


def test_criterion_1_positivity_threshold():
    started = time.perf_counter()
    covariance = make_operator(np.diag([1.5, 2.0, 4.0]))
    phi = quasi_free_functional(covariance)
    rng = np.random.default_rng(101)
    ok = True
    for h in np.linspace(0.5, 1.5, 11):
        for _ in range(20):
            vectors = [random_vector(rng, 3) for _ in range(6)]
            report = check_sigma_h_positivity(phi, vectors, float(h))
            ok = ok and report.min_eigenvalue >= -1e-10
    lowest = covariance.eigenvectors[:, 0]
    for h in (1.6, 2.0):
        check = two_point_criterion(covariance, lowest, 1j * lowest, h)
        witness = scan_for_gram_violation(covariance, h)
        ok = ok and (not check.verdict)
        ok = ok and witness is not None and witness.min_eigenvalue < -1e-8
    elapsed = time.perf_counter() - started
    ok = ok and elapsed < 5.0
    _verdict(
        1,
        "PSD kernels up to the spectral bottom, witnessed failure beyond",
        ok,
        f"{elapsed:.2f}s",
    )


def test_criterion_2_rescaling_kernel_identity():
    rng = np.random.default_rng(202)
    worst = 0.0
    for _ in range(50):
        dim = int(rng.integers(1, 4))
        covariance = random_covariance(rng, dim, low=1.0, high=3.0)
        phi = quasi_free_functional(covariance)
        h = float(rng.uniform(0.1, inf_spectrum(covariance)))
        vectors = [random_vector(rng, dim) for _ in range(int(rng.integers(2, 6)))]
        lhs = gram_matrix(phi, vectors, h)
        rhs = gram_matrix(rescale_functional(phi, h), [np.sqrt(h) * f for f in vectors], 1.0)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    _verdict(2, "scale-h kernel equals scale-1 kernel of the rescaled functional", worst <= 1e-14, f"worst {worst:.2e}")


def test_criterion_3_isomorphism_laws():
    rng = np.random.default_rng(303)
    ok = True
    for _ in range(100):
        u, v = random_word(rng, 2), random_word(rng, 2)
        h = float(rng.uniform(0.2, 3.0))
        product_image = gamma_iso(weyl_multiply(u, v, h), h, "forward")
        image_product = weyl_multiply(gamma_iso(u, h, "forward"), gamma_iso(v, h, "forward"), 1.0)
        ok = ok and words_close(product_image, image_product, 1e-12)
        adjoint_image = gamma_iso(weyl_adjoint(u), h, "forward")
        image_adjoint = weyl_adjoint(gamma_iso(u, h, "forward"))
        ok = ok and words_close(adjoint_image, image_adjoint, 1e-12)
        round_one = gamma_iso(gamma_iso(u, h, "forward"), h, "inverse")
        round_two = gamma_iso(gamma_iso(u, h, "inverse"), h, "forward")
        ok = ok and words_close(round_one, u, 1e-12) and words_close(round_two, u, 1e-12)
    _verdict(3, "scaling map is a *-homomorphism and inverts as a word map", ok)


def test_criterion_4_rescaled_fock():
    rng = np.random.default_rng(404)
    ok = True
    unit = np.array([1.0])
    for h in np.round(np.arange(0.1, 1.0, 0.1), 12):
        covariance = make_operator([(1.0 / h, INF)])
        occupation = one_particle_number_expectation(covariance, unit)
        ok = ok and abs(occupation - (1 - h) / (2 * h)) <= 1e-12
        ok = ok and is_quasi_equivalent_to_fock(covariance) is False
        c = c_parameter(float(h))
        mixture = universally_invariant_functional(MixtureMeasure(((c, 1.0),)))
        functional = RescaledFockState(float(h))
        for _ in range(20):
            f = random_vector(rng, 2)
            ok = ok and abs(functional.value(f) - mixture.value(f)) <= 1e-14
    ok = ok and is_quasi_equivalent_to_fock(make_operator([(1.0, INF)])) is True
    ok = ok and is_quasi_equivalent_to_fock(make_operator([(1.0, INF), (5.0, 3)])) is True
    _verdict(4, "rescaled Fock occupation, quasi-equivalence flags, mixture match", ok)


def test_criterion_5_gns_oracle():
    started = time.perf_counter()
    rng = np.random.default_rng(505)
    ok = True
    for a_value in (1.0, 1.5, 2.0, 3.0):
        covariance = make_operator([[a_value]])
        model = GnsModel(covariance, cutoff=40)
        phi = quasi_free_functional(covariance)
        for _ in range(3):
            f = random_vector(rng, 1)
            f = f / max(1.0, float(np.linalg.norm(f)))
            word = WeylWord.generator(f)
            deviation = abs(gns_expectation(model, word) - evaluate_state(phi, word))
            ok = ok and deviation <= 1e-5
        for f, g in (([1.0], [1j]), ([0.6], [0.8])):
            from weylscale import weyl_relation_residual

            ok = ok and weyl_relation_residual(model, f, g) <= 1e-5
            ok = ok and commutant_residual(model, f, g) <= 1e-5
    elapsed = time.perf_counter() - started
    ok = ok and elapsed < 30.0
    _verdict(5, "truncated simulator reproduces closed forms and commutation", ok, f"{elapsed:.2f}s")


def test_criterion_6_kms_boundary_identities():
    rng = np.random.default_rng(606)
    models = (
        kms_model(make_operator([[LOG2]]), beta=1.0),
        kms_model(make_operator(np.diag([0.5, 1.5])), beta=2.0),
    )
    grid = np.linspace(-5.0, 5.0, 21)
    ok = True
    for model in models:
        dim = model.covariance.matrix.shape[0]
        exp_residual = spectral_distance(model.modular, apply_function(model.hamiltonian, math.exp))
        ok = ok and exp_residual <= 1e-10
        f, g = random_vector(rng, dim), random_vector(rng, dim)
        for h in (1.0, 0.5, 0.25):
            if h == 1.0:
                report = kms_boundary_residuals(model, f, g, grid)
            else:
                rescaled = rescaled_modular(model, h)
                report = rescaled_kms_residuals(rescaled, f, g, grid)
                ok = ok and rescaled.two_route_residual <= 1e-12
                ok = ok and inf_spectrum(rescaled.generator_h) == rescaled.delta_bottom
            ok = ok and report.max_residual <= 1e-10
    _verdict(6, "KMS boundary rows hold for unrescaled and rescaled dynamics", ok)


def test_criterion_7_restriction_regime():
    rng = np.random.default_rng(707)
    base = kms_model(make_operator([[LOG2]]), beta=1.0)  # h_star = 3
    ok = True
    for h in (1.5, 2.0, 2.5):
        model = restricted_model(base.covariance, h, beta=1.0)
        ok = ok and inf_spectrum(model.rescaled_covariance) >= 1 - 1e-12
        ok = ok and model.lam_star == (h + 1.0) / (h - 1.0)
        ok = ok and spectral_correspondence_check(base.covariance, base.hamiltonian, 1.0, h)
        f = np.array([1.0])
        for rescaled in (False, True):
            report = restricted_kms_residuals(model, f, f, rescaled=rescaled)
            ok = ok and report.max_residual <= 1e-10
    extension = nonregular_extension(make_operator(np.diag([1.0, 3.0])), 2.0)
    excluded = np.array([1.0, 0.0])
    values = [extension.value(t * excluded) for t in (0.0, 0.5, 1.0)]
    ok = ok and values == [1.0, 0.0, 0.0]
    pairs = [(random_word(rng, 2), random_word(rng, 2)) for _ in range(100)]
    deviation = check_trace_property(trace_state(), pairs)
    ok = ok and deviation == 0.0
    _verdict(7, "restriction regime: subspace bounds, residuals, dichotomy, trace", ok)


ACCEPTANCE_CONFIGS = {
    "positivity-scan": """
operator:
  matrix: [[1.5, 0, 0], [0, 2, 0], [0, 0, 4]]
vectors:
  random: {count: 6, sets: 5, seed: 808}
h_values: [0.5, 1.0, 1.5, 1.6, 2.0]
""",
    "kms-verify": """
operator:
  kms:
    matrix: [["ln2"]]
    beta: 1
vectors:
  random: {count: 2, seed: 808}
h_values: [0.25, 0.5, 1.0, 2.0]
""",
    "gns-check": """
operator:
  matrix: [[2.0]]
vectors:
  random: {count: 2, seed: 808}
cutoff: 30
""",
    "rescale-fock": """
space: {dimension: 2}
vectors:
  random: {count: 5, seed: 808}
h_values: [0.25, 0.5, 0.75]
""",
    "restrict-scan": """
operator:
  kms:
    matrix: [["ln2", 0], [0, "ln(4)"]]
    beta: 1
vectors:
  random: {count: 20, seed: 808}
h_values: [1.8, 2.2, 2.6]
""",
}


def test_criterion_8_reproducibility(tmp_path, capsys):
    ok = True
    details = []
    for suite, text in ACCEPTANCE_CONFIGS.items():
        config_path = tmp_path / f"{suite}.yaml"
        config_path.write_text(text)
        first = tmp_path / f"{suite}-a.json"
        second = tmp_path / f"{suite}-b.json"
        code_a = cli_main([suite, "--config", str(config_path), "--out", str(first)])
        code_b = cli_main([suite, "--config", str(config_path), "--out", str(second)])
        identical = first.read_bytes() == second.read_bytes()
        ok = ok and code_a == 0 and code_b == 0 and identical
        if not (code_a == 0 and code_b == 0 and identical):
            details.append(f"{suite}: exit {code_a}/{code_b}, identical={identical}")
    capsys.readouterr()
    with capsys.disabled():
        _verdict(8, "byte-identical reports across repeated runs of every suite", ok, "; ".join(details))

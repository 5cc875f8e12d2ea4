"""Experiment suites: named scans over parameter grids, one report each.

Every suite resolves its inputs from an ExperimentConfig, walks the grid in
deterministic order, marks each cell with an ``ok`` verdict against the
module contracts, and returns a ReportRecord.  Random draws always come from
the configured seed, so repeated runs are byte-identical.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .config import ExperimentConfig, random_complex_vectors
from .errors import ConfigInvalid, ScaleOutOfRange, WeylscaleError
from .fock import (
    GnsModel,
    MixtureMeasure,
    c_parameter,
    commutant_residual,
    gns_expectation,
    h_of_c,
    is_quasi_equivalent_to_fock,
    one_particle_number_expectation,
    universally_invariant_functional,
    weyl_relation_residual,
)
from .kms import (
    covariance_from_hamiltonian,
    kms_boundary_residuals,
    kms_model,
    rescaled_kms_residuals,
    rescaled_modular,
)
from .report import ReportRecord
from .restriction import (
    check_trace_property,
    nonregular_extension,
    restricted_kms_residuals,
    restricted_model,
    spectral_correspondence_check,
    trace_state,
)
from .spectral import (
    INF,
    OperatorSpec,
    apply_function,
    inf_spectrum,
    op_norm,
    spectral_distance,
)
from .states import (
    RescaledFockState,
    check_sigma_h_positivity,
    evaluate_state,
    h_max,
    quasi_free_functional,
    scan_for_gram_violation,
    two_point_criterion,
)
from .weyl import WeylWord


def _operator_echo(op: OperatorSpec | None) -> dict | None:
    if op is None:
        return None
    echo = {
        "variant": op.variant,
        "spectrum": [
            [a.value, "INF" if a.infinite else int(a.multiplicity)] for a in op.atoms
        ],
    }
    if op.is_matrix:
        echo["dimension"] = op.matrix.shape[0]
        echo["entries"] = [[complex(x) for x in row] for row in op.matrix.tolist()]
    return echo


def _config_echo(config: ExperimentConfig) -> dict:
    vectors: dict | None = None
    if config.vectors_explicit is not None:
        vectors = {"explicit_count": len(config.vectors_explicit)}
    elif config.random_count is not None:
        vectors = {
            "random_count": config.random_count,
            "random_sets": config.random_sets,
            "seed": config.seed,
        }
    return {
        "operator": _operator_echo(config.operator),
        "hamiltonian": _operator_echo(config.hamiltonian),
        "beta": config.beta,
        "vectors": vectors,
        "h_values": list(config.h_values),
        "t_grid": config.t_grid.tolist(),
        "cutoff": config.cutoff,
        "tolerances": dict(config.tolerances),
        "format": config.output_format,
    }


def _require(condition: bool, message: str):
    if not condition:
        raise ConfigInvalid(message)


def _matrix_covariance(config: ExperimentConfig) -> OperatorSpec:
    if config.operator is not None:
        op = config.operator
    elif config.hamiltonian is not None:
        _require(config.beta is not None, "operator.kms.beta: required")
        op = covariance_from_hamiltonian(config.hamiltonian, config.beta)
    else:
        raise ConfigInvalid("operator: required")
    _require(op.is_matrix, "operator: this suite needs the matrix variant")
    return op


def _vector_sets(config: ExperimentConfig, dim: int) -> list[list[np.ndarray]]:
    if config.vectors_explicit is not None:
        for vec in config.vectors_explicit:
            _require(vec.shape == (dim,), f"vectors.explicit: expected dimension {dim}")
        return [list(config.vectors_explicit)]
    _require(config.random_count is not None, "vectors: required for this suite")
    rng = config.rng()
    return [
        random_complex_vectors(rng, config.random_count, dim)
        for _ in range(config.random_sets)
    ]


# ---------------------------------------------------------------------------
# positivity-scan


def run_positivity_scan(config: ExperimentConfig) -> ReportRecord:
    """Gram-kernel PSD verdicts and the two-point criterion across an h grid."""
    started = time.perf_counter()
    covariance = _matrix_covariance(config)
    _require(len(config.h_values) > 0, "h_values: required")
    try:
        admissible_bound = h_max(covariance)
    except WeylscaleError as exc:
        raise ConfigInvalid(f"operator: {exc}") from exc
    sets = _vector_sets(config, covariance.matrix.shape[0])
    phi = quasi_free_functional(covariance)
    lowest = covariance.eigenvectors[:, 0]
    gram_tol = config.tolerance("gram")

    record = ReportRecord("positivity-scan", _config_echo(config))
    threshold = None
    first_failing = None
    witness_summary = None
    for h in config.h_values:
        reports = [check_sigma_h_positivity(phi, vecs, h, gram_tol) for vecs in sets]
        all_psd = all(r.verdict for r in reports)
        min_eig = min(r.min_eigenvalue for r in reports)
        check = two_point_criterion(covariance, lowest, 1j * lowest, h)
        admissible = h <= admissible_bound + 1e-12
        witness = None
        if not admissible:
            witness = scan_for_gram_violation(covariance, h)
        if admissible:
            ok = all_psd and check.verdict
        else:
            ok = (not check.verdict) and witness is not None
        cell = {
            "h": float(h),
            "regime": "admissible" if admissible else "beyond",
            "gram_all_psd": all_psd,
            "gram_min_eigenvalue": min_eig,
            "two_point_lhs": check.lhs,
            "two_point_rhs": check.rhs,
            "two_point_pass": check.verdict,
            "witness_scale": None if witness is None else witness.scale,
            "witness_min_eigenvalue": None if witness is None else witness.min_eigenvalue,
            "ok": ok,
        }
        record.cells.append(cell)
        if all_psd and check.verdict:
            threshold = float(h) if threshold is None else max(threshold, float(h))
        elif first_failing is None:
            first_failing = float(h)
            if witness is not None:
                witness_summary = {
                    "h": float(h),
                    "scale": witness.scale,
                    "min_eigenvalue": witness.min_eigenvalue,
                }
    record.summary = {
        "h_max": admissible_bound,
        "empirical_threshold": threshold,
        "first_failing_h": first_failing,
        "witness": witness_summary,
    }
    record.timing_seconds = time.perf_counter() - started
    return record


# ---------------------------------------------------------------------------
# kms-verify


def _vector_pairs(config: ExperimentConfig, dim: int) -> list[tuple[np.ndarray, np.ndarray]]:
    if config.vectors_explicit is not None:
        vectors = list(config.vectors_explicit)
        _require(len(vectors) % 2 == 0, "vectors.explicit: need an even count to form pairs")
        for vec in vectors:
            _require(vec.shape == (dim,), f"vectors.explicit: expected dimension {dim}")
        return [(vectors[i], vectors[i + 1]) for i in range(0, len(vectors), 2)]
    _require(config.random_count is not None, "vectors: required for this suite")
    rng = config.rng()
    return [
        tuple(random_complex_vectors(rng, 2, dim)) for _ in range(config.random_count)
    ]


def run_kms_verify(config: ExperimentConfig) -> ReportRecord:
    """Boundary residuals of the KMS condition across scales (and regimes)."""
    started = time.perf_counter()
    _require(config.hamiltonian is not None, "operator.kms: required for kms-verify")
    _require(config.hamiltonian.is_matrix, "operator.kms: matrix hamiltonian required")
    try:
        model = kms_model(config.hamiltonian, config.beta)
    except WeylscaleError as exc:
        raise ConfigInvalid(f"operator.kms: {exc}") from exc
    _require(len(config.h_values) > 0, "h_values: required")
    dim = config.hamiltonian.matrix.shape[0]
    pairs = _vector_pairs(config, dim)
    tol = config.tolerance("residual")
    two_route_tol = config.tolerance("two_route")
    h_star = op_norm(model.covariance)

    record = ReportRecord("kms-verify", _config_echo(config))
    for h in config.h_values:
        for index, (f, g) in enumerate(pairs):
            cell = {"h": float(h), "pair": index}
            if h <= 0:
                cell.update({"path": "invalid", "error": "scale must be positive", "ok": False})
                record.cells.append(cell)
                continue
            if h > 1:
                try:
                    rmodel = restricted_model(model.covariance, h, beta=model.beta)
                except ScaleOutOfRange as exc:
                    cell.update({"path": "restricted", "error": str(exc), "ok": False})
                    record.cells.append(cell)
                    continue
                f_sub = rmodel.projection.apply(f)
                g_sub = rmodel.projection.apply(g)
                base_rep = restricted_kms_residuals(rmodel, f_sub, g_sub, config.t_grid)
                resc_rep = restricted_kms_residuals(
                    rmodel, f_sub, g_sub, config.t_grid, rescaled=True
                )
                bounded = op_norm(rmodel.restricted_modular) <= rmodel.lam_star + 1e-12
                ok = (
                    base_rep.max_residual <= tol
                    and resc_rep.max_residual <= tol
                    and rmodel.two_route_residual <= two_route_tol
                    and bounded
                )
                cell.update(
                    {
                        "path": "restricted",
                        "max_r0": float(np.max(base_rep.r0)),
                        "max_rbeta": float(np.max(base_rep.r_beta)),
                        "rescaled_max_r0": float(np.max(resc_rep.r0)),
                        "rescaled_max_rbeta": float(np.max(resc_rep.r_beta)),
                        "lambda_star": rmodel.lam_star,
                        "modular_bounded": bounded,
                        "two_route_residual": rmodel.two_route_residual,
                        "ok": ok,
                    }
                )
            elif h == 1:
                report = kms_boundary_residuals(model, f, g, config.t_grid)
                cell.update(
                    {
                        "path": "unrescaled",
                        "max_r0": float(np.max(report.r0)),
                        "max_rbeta": float(np.max(report.r_beta)),
                        "strip_sup": report.strip_sup,
                        "ok": report.max_residual <= tol,
                    }
                )
            else:
                rmodel = rescaled_modular(model, h)
                report = rescaled_kms_residuals(rmodel, f, g, config.t_grid)
                bottom_exact = inf_spectrum(rmodel.generator_h) == rmodel.delta_bottom
                ok = (
                    report.max_residual <= tol
                    and rmodel.two_route_residual <= two_route_tol
                    and bottom_exact
                )
                cell.update(
                    {
                        "path": "rescaled",
                        "max_r0": float(np.max(report.r0)),
                        "max_rbeta": float(np.max(report.r_beta)),
                        "strip_sup": report.strip_sup,
                        "two_route_residual": rmodel.two_route_residual,
                        "delta_bottom": rmodel.delta_bottom,
                        "delta_bottom_exact": bottom_exact,
                        "ok": ok,
                    }
                )
            record.cells.append(cell)

    exp_residual = spectral_distance(model.modular, apply_function(model.hamiltonian, math.exp))
    record.summary = {
        "epsilon": model.epsilon,
        "h_star": h_star,
        "modular_exponential_residual": exp_residual,
        "modular_exponential_ok": exp_residual <= tol,
        "max_residual": max(
            (
                cell.get(key, 0.0)
                for cell in record.cells
                for key in ("max_r0", "max_rbeta", "rescaled_max_r0", "rescaled_max_rbeta")
            ),
            default=0.0,
        ),
    }
    record.timing_seconds = time.perf_counter() - started
    return record


# ---------------------------------------------------------------------------
# gns-check


def run_gns_check(config: ExperimentConfig) -> ReportRecord:
    """Truncated GNS simulator against the Gaussian closed form."""
    started = time.perf_counter()
    covariance = _matrix_covariance(config)
    try:
        model = GnsModel(covariance, config.cutoff)
    except WeylscaleError as exc:
        raise ConfigInvalid(f"operator/cutoff: {exc}") from exc
    doubled_axis = model.slot_dimension ** 2
    _require(
        doubled_axis <= 10_000,
        f"cutoff: doubled Fock space axis {doubled_axis} exceeds the 10000 cap; "
        f"lower the cutoff or mode count",
    )
    phi = quasi_free_functional(covariance)
    tol = config.tolerance("gns")
    vectors = _vector_sets(config, covariance.matrix.shape[0])[0]
    clipped = []
    for vec in vectors:
        norm = float(np.linalg.norm(vec))
        clipped.append(vec / norm if norm > 1 else vec)

    record = ReportRecord("gns-check", _config_echo(config))
    for index, f in enumerate(clipped):
        word = WeylWord.generator(f)
        deviation = abs(gns_expectation(model, word) - evaluate_state(phi, word))
        record.cells.append(
            {
                "kind": "expectation",
                "index": index,
                "closed_form_deviation": deviation,
                "ok": deviation <= tol,
            }
        )
    pair_list = (
        [(i, (i + 1) % len(clipped)) for i in range(len(clipped))]
        if len(clipped) > 1
        else [(0, 0)]
    )
    for i, j in pair_list:
        f = clipped[i]
        g = clipped[j] if i != j else 1j * clipped[i]
        relation = weyl_relation_residual(model, f, g)
        commutant = commutant_residual(model, f, g)
        record.cells.append(
            {
                "kind": "relation",
                "index": i,
                "weyl_relation_residual": relation,
                "commutant_residual": commutant,
                "ok": relation <= tol and commutant <= tol,
            }
        )
    doubling = float(
        np.max(np.abs(model.T1 @ model.T1 - model.T2 @ model.T2 - np.eye(model.modes)))
    )
    record.summary = {
        "doubling_identity_residual": doubling,
        "doubling_identity_ok": doubling <= 1e-10,
        "max_closed_form_deviation": max(
            (c["closed_form_deviation"] for c in record.cells if c["kind"] == "expectation"),
            default=0.0,
        ),
    }
    record.timing_seconds = time.perf_counter() - started
    return record


# ---------------------------------------------------------------------------
# rescale-fock


def run_rescale_fock(config: ExperimentConfig) -> ReportRecord:
    """Rescaled Fock family: occupation expectation, quasi-equivalence, mixture match."""
    started = time.perf_counter()
    _require(len(config.h_values) > 0, "h_values: required")
    arithmetic_tol = config.tolerance("arithmetic")
    pointwise_tol = config.tolerance("pointwise")
    dim = config.space_dimension() if (config.random_count or config.vectors_explicit) else 1
    if config.vectors_explicit is not None:
        vectors = list(config.vectors_explicit)
    elif config.random_count is not None:
        vectors = random_complex_vectors(config.rng(), config.random_count, dim)
    else:
        vectors = []
    unit = np.zeros(dim, dtype=complex)
    unit[0] = 1.0

    record = ReportRecord("rescale-fock", _config_echo(config))
    for h in config.h_values:
        if not 0 < h <= 1:
            record.cells.append(
                {"h": float(h), "error": "scale outside (0, 1]", "ok": False}
            )
            continue
        spectral_cov = OperatorSpec.from_atoms([(1.0 / h, INF)])
        occupation = one_particle_number_expectation(spectral_cov, unit)
        occupation_dev = abs(occupation - (1.0 - h) / (2.0 * h))
        quasi = is_quasi_equivalent_to_fock(spectral_cov)
        quasi_expected = h == 1
        c = c_parameter(h)
        roundtrip_dev = abs(h_of_c(c) - h)
        exponent_dev = abs((1.0 + c) / (1.0 - c) - 1.0 / h)
        functional = RescaledFockState(h)
        mixture = universally_invariant_functional(MixtureMeasure(((c, 1.0),)))
        pointwise_dev = 0.0
        for vec in vectors:
            pointwise_dev = max(
                pointwise_dev, abs(functional.value(vec) - mixture.value(vec))
            )
        ok = (
            occupation_dev <= arithmetic_tol
            and quasi == quasi_expected
            and roundtrip_dev <= 1e-14
            and exponent_dev <= 1e-14
            and pointwise_dev <= pointwise_tol
        )
        record.cells.append(
            {
                "h": float(h),
                "occupation_expectation": occupation,
                "occupation_deviation": occupation_dev,
                "quasi_equivalent_to_fock": quasi,
                "c": c,
                "roundtrip_deviation": roundtrip_dev,
                "exponent_deviation": exponent_dev,
                "mixture_pointwise_deviation": pointwise_dev,
                "ok": ok,
            }
        )
    identity_flag = is_quasi_equivalent_to_fock(OperatorSpec.from_atoms([(1.0, INF)]))
    finite_rank_flag = is_quasi_equivalent_to_fock(
        OperatorSpec.from_atoms([(1.0, INF), (5.0, 3)])
    )
    record.summary = {
        "identity_quasi_equivalent": identity_flag,
        "identity_quasi_equivalent_ok": identity_flag is True,
        "finite_rank_quasi_equivalent": finite_rank_flag,
        "finite_rank_quasi_equivalent_ok": finite_rank_flag is True,
    }
    record.timing_seconds = time.perf_counter() - started
    return record


# ---------------------------------------------------------------------------
# restrict-scan


def _random_word(rng: np.random.Generator, dim: int) -> WeylWord:
    count = int(rng.integers(1, 4))
    word = WeylWord(dim)
    for vec, coeff in zip(
        random_complex_vectors(rng, count, dim), random_complex_vectors(rng, count, 1)
    ):
        word = word + WeylWord.generator(vec, complex(coeff[0]))
    return word


def run_restrict_scan(config: ExperimentConfig) -> ReportRecord:
    """Spectral restriction across (1, h_star): subspaces, residuals, trace limit."""
    started = time.perf_counter()
    covariance = _matrix_covariance(config)
    _require(len(config.h_values) > 0, "h_values: required")
    _require(config.random_count is not None, "vectors.random: required for this suite")
    rng = config.rng()
    dim = covariance.matrix.shape[0]
    tol = config.tolerance("residual")
    h_star = op_norm(covariance)
    has_kms = config.hamiltonian is not None and config.beta is not None

    record = ReportRecord("restrict-scan", _config_echo(config))
    previous: tuple[float, tuple[int, ...]] | None = None
    for h in config.h_values:
        try:
            rmodel = restricted_model(
                covariance, h, beta=config.beta if has_kms else None
            )
        except ScaleOutOfRange as exc:
            record.cells.append({"h": float(h), "error": str(exc), "ok": False})
            continue
        selection = rmodel.projection.selected_indices
        if previous is None:
            nested = True
        else:
            # subspaces shrink as the scale grows, whichever way the grid runs
            prev_h, prev_selection = previous
            if h >= prev_h:
                nested = set(selection) <= set(prev_selection)
            else:
                nested = set(prev_selection) <= set(selection)
        previous = (float(h), selection)
        bottom = inf_spectrum(rmodel.rescaled_covariance)
        cell = {
            "h": float(h),
            "subspace_dimension": int(rmodel.subspace_dimension),
            "rescaled_bottom": bottom,
            "rescaled_dominates_identity": bottom >= 1 - 1e-12,
            "nested": nested,
        }
        checks = [cell["rescaled_dominates_identity"], nested]
        excluded = [i for i in range(dim) if i not in selection]
        if excluded:
            functional = nonregular_extension(covariance, h)
            direction = covariance.eigenvectors[:, excluded[0]]
            values = [functional.value(t * direction) for t in (0.0, 0.5, 1.0)]
            dichotomy = values[0] == 1.0 and values[1] == 0.0 and values[2] == 0.0
            cell["dichotomy_exact"] = dichotomy
            checks.append(dichotomy)
        else:
            cell["dichotomy_exact"] = None
        if has_kms:
            cell["lambda_star"] = rmodel.lam_star
            correspondence = spectral_correspondence_check(
                covariance, config.hamiltonian, config.beta, h
            )
            cell["spectral_correspondence"] = correspondence
            checks.append(correspondence)
            f, g = _vector_pairs_from_rng(rng, rmodel)
            base_rep = restricted_kms_residuals(rmodel, f, g, config.t_grid)
            resc_rep = restricted_kms_residuals(rmodel, f, g, config.t_grid, rescaled=True)
            cell["max_r0"] = float(np.max(base_rep.r0))
            cell["max_rbeta"] = float(np.max(base_rep.r_beta))
            cell["rescaled_max_r0"] = float(np.max(resc_rep.r0))
            cell["rescaled_max_rbeta"] = float(np.max(resc_rep.r_beta))
            checks.append(base_rep.max_residual <= tol)
            checks.append(resc_rep.max_residual <= tol)
        cell["ok"] = all(checks)
        record.cells.append(cell)

    pairs = [
        (_random_word(rng, dim), _random_word(rng, dim))
        for _ in range(config.random_count)
    ]
    deviation = check_trace_property(trace_state(), pairs)
    record.summary = {
        "h_star": h_star,
        "trace_property_deviation": deviation,
        "trace_property_ok": deviation == 0.0,
    }
    record.timing_seconds = time.perf_counter() - started
    return record


def _vector_pairs_from_rng(rng: np.random.Generator, rmodel) -> tuple[np.ndarray, np.ndarray]:
    dim = rmodel.covariance.matrix.shape[0]
    f, g = random_complex_vectors(rng, 2, dim)
    return rmodel.projection.apply(f), rmodel.projection.apply(g)


SUITES = {
    "positivity-scan": run_positivity_scan,
    "kms-verify": run_kms_verify,
    "gns-check": run_gns_check,
    "rescale-fock": run_rescale_fock,
    "restrict-scan": run_restrict_scan,
}

"""Acceptance suite: ten gates, one test (and one printed pass/fail line) each.

Run with `pytest tests/test_acceptance.py -v`. Heavy Monte-Carlo stages share
module-scoped fixtures so each expensive sweep runs once.
"""

import time

import numpy as np
import pytest

from spherecon.dynamics import (find_nonconsensus_fixed_point,
                                fixed_point_residual, iterate)
from spherecon.experiments import (ExperimentConfig, cmd_consensus_sweep,
                                   cmd_jg_rank, cmd_pentagon_demo,
                                   cmd_rank_table, cmd_stability_audit,
                                   cmd_theorem2_probe,
                                   collect_descent_fixed_points)
from spherecon.fixedpoint_rank import (assemble_Jg, build_fixed_point_system,
                                       duplication_matrix, matrix_rank,
                                       skew_null_vectors,
                                       symmetric_rank_deficiency_check, vech)
from spherecon.graph import complete_graph, random_strongly_connected
from spherecon.stability import (determinant_nonzero_check,
                                 differential_report, instability_certificate,
                                 projected_jacobian, reduced_matrix,
                                 trace_formula_check)
from spherecon.state import (Configuration, consensus_configuration,
                             random_configuration, tangent_basis)
from spherecon.weights import left_scale_normalize, sample_sdd

MASTER_SEED = 20260826


def _report(num, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"\n[{status}] criterion {num}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def sweep_10k():
    cfg = ExperimentConfig(seed=MASTER_SEED, trials=10_000)
    start = time.time()
    _, summary = cmd_consensus_sweep(cfg)
    summary["elapsed"] = time.time() - start
    return summary


def test_criterion_01_pentagon_fixed_point():
    start = time.time()
    report = cmd_pentagon_demo()
    elapsed = time.time() - start
    ok = (report["residual"] < 1e-12
          and abs(report["spectral_radius"] - 1.0) <= 1e-9
          and elapsed < 1.0)
    _report(1, ok, f"pentagon residual {report['residual']:.2e}, "
                   f"spectral radius {report['spectral_radius']:.12f}, "
                   f"{elapsed:.3f}s")


def test_criterion_02_consensus_neutrality():
    start = time.time()
    rng = np.random.default_rng(MASTER_SEED)
    worst_dev = 0.0
    worst_excess = 0.0
    for k in range(1000):
        n = int(rng.integers(3, 9))
        d = int(rng.choice([2, 3, 4]))
        g = random_strongly_connected(n, 0.5, int(rng.integers(2 ** 32)))
        a = sample_sdd(g, 0.1, False, int(rng.integers(2 ** 32)))
        xbar = rng.standard_normal(d)
        xbar /= np.linalg.norm(xbar)
        c = consensus_configuration(n, xbar)
        eig = np.linalg.eigvals(reduced_matrix(a, c))
        mags = np.abs(eig)
        worst_dev = max(worst_dev, abs(mags.max() - 1.0))
        worst_excess = max(worst_excess, mags.max() - 1.0)
    elapsed = time.time() - start
    ok = worst_dev <= 1e-9 and worst_excess <= 1e-9 and elapsed < 60.0
    _report(2, ok, f"1000 consensus triples, max |rho - 1| = {worst_dev:.2e}, "
                   f"{elapsed:.1f}s")


def test_criterion_03_consensus_sweep(sweep_10k):
    ok = (sweep_10k["consensus_fraction"] == 1.0
          and not sweep_10k["errors"]
          and sweep_10k["elapsed"] < 600.0)
    _report(3, ok, f"10^4 trials, consensus fraction "
                   f"{sweep_10k['consensus_fraction']}, "
                   f"{sweep_10k['elapsed']:.0f}s")


def test_criterion_04_monotone_potential(sweep_10k):
    delta = sweep_10k["min_potential_delta"]
    ok = delta is not None and delta >= -1e-10
    _report(4, ok, f"min per-step potential change over symmetric trials "
                   f"= {delta:.2e}")


def test_criterion_05_rank_table_rows():
    start = time.time()
    freqs = {}
    for n, d in [(3, 2), (6, 2)]:
        cfg = ExperimentConfig(seed=12345, trials=10_000, n=n, d=d,
                               graph="er", edge_prob=0.57, symmetric=True)
        _, summary = cmd_rank_table(cfg)
        freqs[(n, d)] = summary["rank_frequencies"]
    elapsed = time.time() - start
    target = {(3, 2): (0.7571, 0.2429), (6, 2): (0.3528, 0.6472)}
    ok = elapsed < 900.0
    detail = []
    for key, (t1, t2) in target.items():
        f1 = freqs[key].get("1", 0.0)
        f2 = freqs[key].get("2", 0.0)
        ok = ok and abs(f1 - t1) <= 0.05 and abs(f2 - t2) <= 0.05
        detail.append(f"{key}: rank-1 {f1:.4f} (target {t1}), "
                      f"rank-2 {f2:.4f} (target {t2})")
    _report(5, ok, "; ".join(detail) + f"; {elapsed:.0f}s")


def test_criterion_06_nonsymmetric_limits_rank_one():
    cfg = ExperimentConfig(seed=MASTER_SEED, trials=10_000, symmetric=False)
    _, summary = cmd_theorem2_probe(cfg)
    ok = summary["rank_ge2_count"] == 0 and not summary["errors"]
    _report(6, ok, f"10^4 non-symmetric descent trials, rank>=2 limits: "
                   f"{summary['rank_ge2_count']} "
                   f"({summary['nonconverged']} non-converged cycles)")


def test_criterion_07_sqrt2_determinant_suite():
    rng = np.random.default_rng(MASTER_SEED + 7)
    min_rel_det = np.inf
    bound_ok = True
    for k in range(1000):
        n = int(rng.integers(2, 6))
        d = int(rng.integers(2, 5))
        a = sample_sdd(complete_graph(n), 0.45, bool(k % 2),
                       int(rng.integers(2 ** 32)))
        norm = left_scale_normalize(a)
        ai = norm.entries.sum(axis=1) - 1.0
        floor = np.sqrt(1.0 - ai ** 2)
        for j in range(10):
            c = random_configuration(n, d, int(rng.integers(2 ** 32)))
            chk = determinant_nonzero_check(a, c)
            if not (chk.sqrt2_condition and chk.bound_satisfied):
                bound_ok = False
            min_rel_det = min(min_rel_det, abs(chk.det) / chk.scale)
            y = iterate(norm, c)
            dots = np.einsum("ij,ij->i", c.rows, y.rows)
            if np.any(dots < floor - 1e-12):
                bound_ok = False
    ok = bound_ok and min_rel_det > 1e-12
    _report(7, ok, f"10^3 sqrt(2)-condition matrices x 10 configurations, "
                   f"min relative |det| = {min_rel_det:.2e}, "
                   f"alignment bound held: {bound_ok}")


def test_criterion_08_instability_certificates():
    cfg = ExperimentConfig(seed=MASTER_SEED + 8, trials=10_000, n=4, d=3,
                           symmetric=True)
    points = collect_descent_fixed_points(cfg, count=100, require_rank_ge=2)
    assert len(points) == 100
    certified = 0
    trace_ok = 0
    min_rho = np.inf
    for a, c, _ in points:
        cert = instability_certificate(a, c, fp_tol=1e-8)
        if (cert.label == "unstable-certified"
                and cert.certificate_eigenvalue > 0):
            certified += 1
        min_rho = min(min_rho, cert.spectral_radius)
        if trace_formula_check(a, c).match:
            trace_ok += 1
    ok = certified == 100 and trace_ok == 100 and min_rho > 1.0 + 1e-7
    _report(8, ok, f"100 descent-found d=3 fixed points: {certified} "
                   f"unstable-certified, {trace_ok} trace matches, "
                   f"min spectral radius {min_rho:.6f}")


def test_criterion_09_differential_correctness():
    rng = np.random.default_rng(MASTER_SEED + 9)
    max_fd_err = 0.0
    for k in range(100):
        n = int(rng.integers(2, 6))
        d = int(rng.integers(2, 5))
        a = sample_sdd(complete_graph(n), 0.1, bool(k % 2),
                       int(rng.integers(2 ** 32)))
        c = random_configuration(n, d, int(rng.integers(2 ** 32)))
        j = projected_jacobian(a, c)
        v = tangent_basis(c).block_diagonal() @ rng.standard_normal(n * (d - 1))
        v /= np.linalg.norm(v)
        jv = j @ v
        h = 1e-6
        plus = iterate(a, Configuration((c.vector + h * v).reshape(n, d)))
        minus = iterate(a, Configuration((c.vector - h * v).reshape(n, d)))
        fd = (plus.vector - minus.vector) / (2.0 * h)
        max_fd_err = max(max_fd_err,
                         np.linalg.norm(jv - fd) / np.linalg.norm(jv))

    # eigenvalue multiset at fixed points (where the full and reduced spectra
    # provably coincide)
    cfg = ExperimentConfig(seed=MASTER_SEED + 9, trials=10_000, n=3, d=2,
                           symmetric=True)
    points = collect_descent_fixed_points(cfg, count=20, require_rank_ge=1,
                                          a_residual_tol=1e-11)
    max_eig_err = 0.0
    for a, c, _ in points:
        ej = np.linalg.eigvals(projected_jacobian(a, c))
        ej = ej[np.abs(ej) > 1e-10]
        em = list(np.linalg.eigvals(reduced_matrix(a, c)))
        assert len(ej) == len(em)
        for lam in ej:
            idx = int(np.argmin(np.abs(np.asarray(em) - lam)))
            max_eig_err = max(max_eig_err, abs(em[idx] - lam))
            em.pop(idx)

    # determinant invariance under orientation-preserving basis changes
    from spherecon.state import TangentBasis
    max_det_dev = 0.0
    for k in range(20):
        n, d = 3, 4
        a = sample_sdd(complete_graph(n), 0.2, True, int(rng.integers(2 ** 32)))
        c = random_configuration(n, d, int(rng.integers(2 ** 32)))
        base = differential_report(a, c)

        def rotate(basis):
            blocks = []
            for b in basis.blocks:
                q, r = np.linalg.qr(rng.standard_normal((d - 1, d - 1)))
                q *= np.sign(np.diag(r))
                if np.linalg.det(q) < 0:
                    q[:, 0] *= -1.0
                blocks.append(b @ q)
            return TangentBasis(tuple(blocks))

        red = reduced_matrix(a, c, rotate(base.basis_x), rotate(base.basis_y))
        dev = abs(np.linalg.det(red) - base.det) / (1.0 + abs(base.det))
        max_det_dev = max(max_det_dev, dev)

    ok = max_fd_err < 1e-6 and max_eig_err < 1e-8 and max_det_dev < 1e-9
    _report(9, ok, f"100 finite-difference checks, max rel err "
                   f"{max_fd_err:.2e}; eigen multiset at fixed points, max "
                   f"dev {max_eig_err:.2e}; det basis invariance, max dev "
                   f"{max_det_dev:.2e}")


def test_criterion_10_parametric_jacobian_ranks():
    cfg = ExperimentConfig(seed=MASTER_SEED + 10, trials=10_000, n=4, d=3,
                           symmetric=True, graph="complete")
    summary = cmd_jg_rank(cfg, count=50)
    full_rank_ok = (summary["fixed_points"] == 50
                    and summary["nonsym_full_rank"] == 50)
    sym_ok = (summary["rank_ge2_points"] >= 1
              and summary["sym_deficiency_satisfied"] == summary["rank_ge2_points"]
              and summary["max_null_residual"] < 1e-8)

    rng = np.random.default_rng(MASTER_SEED + 10)
    dup_ok = True
    for n in range(2, 7):
        dn = duplication_matrix(n)
        for _ in range(100):
            b = rng.standard_normal((n, n))
            cmat = b + b.T
            if not np.array_equal(dn @ vech(cmat), cmat.reshape(-1, order="F")):
                dup_ok = False
    ok = full_rank_ok and sym_ok and dup_ok
    _report(10, ok, f"50/50 non-symmetric full rank; "
                    f"{summary['sym_deficiency_satisfied']}/"
                    f"{summary['rank_ge2_points']} symmetric deficiency checks "
                    f"with max null residual {summary['max_null_residual']:.2e}; "
                    f"duplication identity exact: {dup_ok}")

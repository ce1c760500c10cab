"""Tests for the cone-program IR and the operator-splitting solver.

The solver is exercised against a set of problems with closed-form
optima; every objective must land within 1e-5 (absolute or relative)
and constraint violations must stay at solver tolerance.
"""

import numpy as np
import pytest

from isacbeam import conic, linalg
from isacbeam.conic import ConeProgram

OBJ_TOL = 1e-5


def random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return linalg.as_hermitian(0.5 * (a + a.conj().T))


def assert_optimal(prog, res, expected):
    assert res.status == "optimal"
    assert abs(res.objective - expected) <= OBJ_TOL * max(1.0, abs(expected))
    assert conic.max_violation(prog, res) <= 1e-5


class TestVecHermitian:
    def test_trace_isometry(self):
        rng = np.random.default_rng(0)
        for n in (1, 2, 5, 9):
            a, b = random_hermitian(rng, n), random_hermitian(rng, n)
            lhs = np.trace(a @ b).real
            rhs = conic.vec_hermitian(a) @ conic.vec_hermitian(b)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    def test_roundtrip(self):
        rng = np.random.default_rng(1)
        a = random_hermitian(rng, 6)
        v = conic.vec_hermitian(a)
        assert v.shape == (36,)
        assert np.allclose(conic.mat_hermitian(v, 6), a, atol=1e-14)


class TestProgramValidation:
    def test_duplicate_block(self):
        prog = ConeProgram()
        prog.add_hermitian_block("X", 2)
        with pytest.raises(conic.ProgramError):
            prog.add_scalar_block("X")

    def test_unknown_block_in_terms(self):
        prog = ConeProgram()
        prog.add_hermitian_block("X", 2)
        with pytest.raises(conic.ProgramError):
            prog.add_eq({"Y": np.eye(2)}, 1.0)

    def test_coefficient_shape_mismatch(self):
        prog = ConeProgram()
        prog.add_hermitian_block("X", 3)
        with pytest.raises(conic.ProgramError):
            prog.add_ineq({"X": np.eye(2)}, 1.0)

    def test_psd_on_scalar_block_rejected(self):
        prog = ConeProgram()
        prog.add_scalar_block("t")
        with pytest.raises(conic.ProgramError):
            prog.add_psd({"t": 1.0})

    def test_psd_dimension_mix_rejected(self):
        prog = ConeProgram()
        prog.add_hermitian_block("X", 2)
        prog.add_hermitian_block("Y", 3)
        with pytest.raises(conic.ProgramError):
            prog.add_psd({"X": 1.0, "Y": -1.0})

    def test_empty_program_rejected(self):
        with pytest.raises(conic.ProgramError):
            ConeProgram().compile()

    def test_negative_ball_radius_rejected(self):
        prog = ConeProgram()
        prog.add_hermitian_block("X", 2)
        with pytest.raises(conic.ProgramError):
            prog.add_fro_ball("X", np.eye(2), -1.0)


class TestAnalyticProblems:
    def test_lambda_max_complex(self):
        c = random_hermitian(np.random.default_rng(2), 3)
        prog = ConeProgram()
        prog.add_hermitian_block("X", 3)
        prog.set_objective({"X": c})
        prog.add_eq({"X": np.eye(3)}, 1.0)
        prog.add_psd({"X": 1.0})
        res = conic.solve(prog)
        assert_optimal(prog, res, np.linalg.eigvalsh(c).max())

    def test_lambda_max_real(self):
        rng = np.random.default_rng(3)
        c = rng.standard_normal((5, 5))
        c = linalg.as_hermitian(0.5 * (c + c.T))
        prog = ConeProgram()
        prog.add_hermitian_block("X", 5)
        prog.set_objective({"X": c})
        prog.add_eq({"X": np.eye(5)}, 1.0)
        prog.add_psd({"X": 1.0})
        res = conic.solve(prog)
        assert_optimal(prog, res, np.linalg.eigvalsh(c).max())

    def test_soc_epigraph(self):
        prog = ConeProgram()
        prog.add_scalar_block("s")
        prog.set_objective({"s": 1.0})
        prog.add_square_le("s", {}, 4.0)
        res = conic.solve(prog)
        assert_optimal(prog, res, 2.0)

    def test_soc_with_pinned_scalar(self):
        prog = ConeProgram()
        prog.add_scalar_block("s")
        prog.add_scalar_block("t")
        prog.set_objective({"s": 1.0})
        prog.add_eq({"t": 1.0}, 9.0)
        prog.add_square_le("s", {"t": 1.0})
        res = conic.solve(prog)
        assert_optimal(prog, res, 3.0)

    def test_frobenius_ball(self):
        rng = np.random.default_rng(4)
        b = random_hermitian(rng, 3)
        x0 = linalg.as_hermitian(np.diag([1.0, 2.0, 3.0]))
        prog = ConeProgram()
        prog.add_hermitian_block("X", 3)
        prog.set_objective({"X": b})
        prog.add_fro_ball("X", x0, 0.7)
        res = conic.solve(prog)
        expected = np.trace(b @ x0).real + 0.7 * np.linalg.norm(b)
        assert_optimal(prog, res, expected)
        # optimizer sits at the closed-form point X0 + r B/||B||
        x_star = x0 + 0.7 * b / np.linalg.norm(b)
        assert np.linalg.norm(res.values["X"] - x_star) <= 1e-4

    def test_linear_program(self):
        prog = ConeProgram()
        prog.add_scalar_block("x1")
        prog.add_scalar_block("x2")
        prog.set_objective({"x1": 1.0, "x2": 2.0})
        prog.add_ineq({"x1": 1.0}, 1.0)
        prog.add_ineq({"x2": 1.0}, 2.0)
        prog.add_ineq({"x1": -1.0}, 0.0)
        prog.add_ineq({"x2": -1.0}, 0.0)
        res = conic.solve(prog)
        assert_optimal(prog, res, 5.0)

    def test_diagonal_capped_quadratic(self):
        # max a^H X a subject to X PSD and per-diagonal caps p has
        # optimum p * (sum |a_m|)^2 at the equal-phase rank-one X
        rng = np.random.default_rng(5)
        a = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        p = 0.5
        prog = ConeProgram()
        prog.add_hermitian_block("X", 3)
        prog.set_objective({"X": linalg.as_hermitian(np.outer(a, a.conj()))})
        prog.add_psd({"X": 1.0})
        for m in range(3):
            e = np.zeros((3, 3))
            e[m, m] = 1.0
            prog.add_ineq({"X": e}, p)
        res = conic.solve(prog)
        assert_optimal(prog, res, p * np.sum(np.abs(a)) ** 2)

    def test_sqrt_lambda_max_via_soc(self):
        rng = np.random.default_rng(6)
        b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        c = linalg.as_hermitian(b @ b.conj().T / 3)
        prog = ConeProgram()
        prog.add_hermitian_block("X", 3)
        prog.add_scalar_block("s")
        prog.set_objective({"s": 1.0})
        prog.add_eq({"X": np.eye(3)}, 1.0)
        prog.add_psd({"X": 1.0})
        prog.add_square_le("s", {"X": c})
        res = conic.solve(prog)
        assert_optimal(prog, res, np.sqrt(np.linalg.eigvalsh(c).max()))

    def test_psd_ordering_interval(self):
        # max trace(C R) over 0 <= R <= I picks out the positive eigenvalues
        c = random_hermitian(np.random.default_rng(7), 4)
        prog = ConeProgram()
        prog.add_hermitian_block("R", 4)
        prog.set_objective({"R": c})
        prog.add_psd({"R": 1.0})
        prog.add_psd({"R": -1.0}, offset=np.eye(4))
        res = conic.solve(prog)
        w = np.linalg.eigvalsh(c)
        assert_optimal(prog, res, np.sum(np.maximum(w, 0.0)))

    def test_min_trace_under_quadratic_floor(self):
        rng = np.random.default_rng(8)
        h = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        prog = ConeProgram()
        prog.add_hermitian_block("R", 3)
        prog.set_objective({"R": -np.eye(3)})
        prog.add_psd({"R": 1.0})
        prog.add_ineq({"R": -linalg.as_hermitian(np.outer(h, h.conj()))}, -1.0)
        res = conic.solve(prog)
        assert_optimal(prog, res, -1.0 / np.linalg.norm(h) ** 2)

    def test_scalar_ball(self):
        prog = ConeProgram()
        prog.add_hermitian_block("X", 1)
        prog.set_objective({"X": np.eye(1)})
        prog.add_fro_ball("X", 3.0 * np.eye(1), 2.0)
        res = conic.solve(prog)
        assert_optimal(prog, res, 5.0)

    def test_objective_constant_carried(self):
        prog = ConeProgram()
        prog.add_scalar_block("x")
        prog.set_objective({"x": 1.0}, constant=10.0)
        prog.add_ineq({"x": 1.0}, 1.0)
        prog.add_ineq({"x": -1.0}, 0.0)
        res = conic.solve(prog)
        assert_optimal(prog, res, 11.0)


class TestStatuses:
    def test_infeasible_detected(self):
        prog = ConeProgram()
        prog.add_hermitian_block("X", 2)
        prog.set_objective({"X": np.eye(2)})
        prog.add_eq({"X": np.eye(2)}, 1.0)
        prog.add_eq({"X": np.eye(2)}, 3.0)
        prog.add_psd({"X": 1.0})
        res = conic.solve(prog, max_iters=30000)
        assert res.status == "infeasible"

    def test_max_iters_reports_residuals(self):
        c = random_hermitian(np.random.default_rng(9), 3)
        prog = ConeProgram()
        prog.add_hermitian_block("X", 3)
        prog.set_objective({"X": c})
        prog.add_eq({"X": np.eye(3)}, 1.0)
        prog.add_psd({"X": 1.0})
        res = conic.solve(prog, eps=1e-14, max_iters=5)
        assert res.status == "max_iters"
        assert res.iterations == 5
        assert np.isfinite(res.primal_residual)
        assert np.isfinite(res.dual_residual)


class TestBackendsAndDeterminism:
    def build(self, seed=10):
        c = random_hermitian(np.random.default_rng(seed), 4)
        prog = ConeProgram()
        prog.add_hermitian_block("X", 4)
        prog.set_objective({"X": c})
        prog.add_eq({"X": np.eye(4)}, 1.0)
        prog.add_psd({"X": 1.0})
        return prog

    def test_complex_and_real_paths_agree(self):
        for seed in range(10, 15):
            prog = self.build(seed)
            r_real = conic.solve(prog, psd_backend="real")
            r_cplx = conic.solve(prog, psd_backend="complex")
            assert abs(r_real.objective - r_cplx.objective) <= 1e-6

    def test_bitwise_deterministic(self):
        prog = self.build()
        r1 = conic.solve(prog)
        r2 = conic.solve(prog)
        assert r1.iterations == r2.iterations
        assert np.array_equal(r1.state.x, r2.state.x)
        assert np.array_equal(r1.state.u, r2.state.u)

    def test_unknown_backend_rejected(self):
        with pytest.raises(conic.ProgramError):
            conic.solve(self.build(), psd_backend="quaternion")


class TestWarmStartAndCache:
    def test_warm_start_reduces_iterations(self):
        c = random_hermitian(np.random.default_rng(11), 4)
        base = ConeProgram()
        base.add_hermitian_block("X", 4)
        base.set_objective({"X": c})
        base.add_eq({"X": np.eye(4)}, 1.0)
        base.add_psd({"X": 1.0})
        first = conic.solve(base)

        shifted = ConeProgram()
        shifted.add_hermitian_block("X", 4)
        shifted.set_objective({"X": c + 0.01 * np.eye(4)})
        shifted.add_eq({"X": np.eye(4)}, 1.0)
        shifted.add_psd({"X": 1.0})
        cold = conic.solve(shifted)
        warm = conic.solve(shifted, warm_start=first.state, kkt_cache=first.kkt_cache)
        expected = np.linalg.eigvalsh(c + 0.01 * np.eye(4)).max()
        assert warm.status == "optimal"
        assert abs(warm.objective - expected) <= OBJ_TOL
        assert warm.iterations < cold.iterations

    def test_stale_cache_is_ignored_safely(self):
        prog_a = ConeProgram()
        prog_a.add_hermitian_block("X", 3)
        prog_a.set_objective({"X": np.eye(3)})
        prog_a.add_eq({"X": np.eye(3)}, 1.0)
        prog_a.add_psd({"X": 1.0})
        res_a = conic.solve(prog_a)

        prog_b = ConeProgram()
        prog_b.add_hermitian_block("X", 3)
        prog_b.set_objective({"X": np.diag([1.0, 2.0, 3.0])})
        prog_b.add_eq({"X": np.eye(3)}, 1.0)
        prog_b.add_psd({"X": 1.0})
        # constraint matrix matches, so reuse is legitimate; now break it
        prog_b.add_ineq({"X": np.eye(3)}, 5.0)
        res_b = conic.solve(prog_b, kkt_cache=res_a.kkt_cache)
        assert res_b.status == "optimal"
        assert abs(res_b.objective - 3.0) <= OBJ_TOL * 3


class TestVerify:
    def test_residual_report_on_optimal(self):
        c = random_hermitian(np.random.default_rng(12), 3)
        prog = ConeProgram()
        prog.add_hermitian_block("X", 3)
        prog.set_objective({"X": c})
        prog.add_eq({"X": np.eye(3)}, 1.0, name="unit-trace")
        prog.add_psd({"X": 1.0}, name="psd")
        res = conic.solve(prog)
        report = conic.verify(prog, res)
        assert {r.name for r in report} == {"unit-trace", "psd"}
        assert all(r.residual <= 1e-5 for r in report)

    def test_perturbed_point_flagged_with_magnitude(self):
        prog = ConeProgram()
        prog.add_hermitian_block("X", 2)
        prog.set_objective({"X": np.eye(2)})
        prog.add_eq({"X": np.eye(2)}, 1.0, name="unit-trace")
        prog.add_psd({"X": 1.0}, name="psd")
        res = conic.solve(prog)
        res.values["X"] = np.diag([1.3, -0.2]).astype(complex)
        report = {r.name: r.residual for r in conic.verify(prog, res)}
        assert report["unit-trace"] == pytest.approx(0.1, abs=1e-12)
        assert report["psd"] == pytest.approx(0.2, abs=1e-12)

    def test_soc_and_ball_residuals(self):
        prog = ConeProgram()
        prog.add_hermitian_block("X", 2)
        prog.add_scalar_block("s")
        prog.set_objective({"s": 1.0})
        prog.add_square_le("s", {}, 4.0, name="cap")
        prog.add_fro_ball("X", np.zeros((2, 2)), 1.0, name="ball")
        res = conic.solve(prog)
        res.values["s"] = 3.0
        res.values["X"] = 2.0 * np.eye(2)
        report = {r.name: r.residual for r in conic.verify(prog, res)}
        # ||(2s, t-1)|| - (t+1) at s=3, t=4
        assert report["cap"] == pytest.approx(np.hypot(6.0, 3.0) - 5.0, abs=1e-12)
        assert report["ball"] == pytest.approx(2.0 * np.sqrt(2.0) - 1.0, abs=1e-12)

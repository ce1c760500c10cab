"""Transmit covariance design: fractional objective, SDR subproblem, extraction.

For a fixed receive filter the sensing objective is a ratio of two linear
functionals of the transmit covariance R. The ratio is lifted with an
auxiliary scalar y (closed-form update) so that each inner step is a
concave maximization over (R, R_1..R_K) under PSD-ordering, per-antenna
power, waveform-similarity and per-user QoS constraints; that subproblem
is handed to the cone solver. After convergence the per-user covariances
are collapsed to rank one (which provably preserves the objective and the
QoS values) and the sensing beamformers are factored out of the residual.

Internally the subproblem is assembled in power-normalized units (R
divided by the total budget) so the solver sees O(1) data regardless of
the configured transmit power; the objective value is normalization-free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import conic, linalg, scenario, taper


class QoSInfeasibleError(RuntimeError):
    """The per-user SINR floor cannot be met with the available power."""


class TightnessViolationError(RuntimeError):
    """Residual sensing covariance is indefinite beyond tolerance."""

    def __init__(self, msg: str, min_eigenvalue: float):
        super().__init__(msg)
        self.min_eigenvalue = min_eigenvalue


class NumericalError(RuntimeError):
    """Inner solver stalled without an acceptable iterate."""


@dataclass
class TransmitDesign:
    """Result of the covariance-design stage, in physical (mW) units."""

    covariance: np.ndarray  # R
    user_covariances: list  # R_k, one per user
    y: float
    qt_trace: list  # (inner iteration, objective g)
    w_comm: np.ndarray | None = None  # filled by finalize_design
    w_sense: np.ndarray | None = None

    @property
    def beams(self) -> scenario.BeamformerSet:
        if self.w_comm is None or self.w_sense is None:
            raise ValueError("beamformers not extracted yet")
        return scenario.BeamformerSet(self.w_comm, self.w_sense)


def update_y(model: taper.InterferenceModel, w, R) -> float:
    """Closed-form auxiliary update: sqrt(target power) over clutter power."""
    num = taper.target_quadratic(model, R, w)
    den = taper.tapered_cn_quadratic(model, R, w)
    return float(np.sqrt(num) / den)


def qt_objective(model: taper.InterferenceModel, w, R, y: float) -> float:
    """Lifted objective g(R, y); maximizing over y recovers the SCNR."""
    num = taper.target_quadratic(model, R, w)
    den = taper.tapered_cn_quadratic(model, R, w)
    return 2.0 * y * np.sqrt(num) - y * y * den


def default_initialization(cfg: scenario.ScenarioConfig, channels: np.ndarray):
    """Isotropic start plus a small matched covariance per user."""
    m = cfg.num_tx_antennas
    p = cfg.total_power_mw
    r = (p / m) * np.eye(m, dtype=complex)
    users = []
    for k in range(cfg.num_users):
        h = channels[k]
        users.append(
            (p / (2.0 * m * cfg.num_users))
            * np.outer(h, h.conj())
            / np.linalg.norm(h) ** 2
        )
    return r, users


def assemble_subproblem(
    cfg: scenario.ScenarioConfig,
    model: taper.InterferenceModel,
    channels: np.ndarray,
    w,
    y: float,
    power_scale: float = 1.0,
) -> conic.ConeProgram:
    """Build the concave inner subproblem as a cone program.

    Variables are the covariance blocks divided by ``power_scale``; the
    objective coefficients absorb the scale so the reported optimum is the
    physical objective value. Blocks: "R", "R_1".."R_K" and the epigraph
    scalar "s" standing in for the square root of the target quadratic.
    """
    m = cfg.num_tx_antennas
    nu = float(power_scale)
    p_total = cfg.total_power_mw
    gamma = cfg.sinr_threshold_linear

    q_coeff = taper.cn_linear_coefficients(model, w)
    c_target = taper.target_linear_coefficients(model, w)
    noise_term = model.noise_power * float(np.linalg.norm(w) ** 2)

    prog = conic.ConeProgram()
    prog.add_hermitian_block("R", m)
    user_names = [f"R_{k + 1}" for k in range(cfg.num_users)]
    for name in user_names:
        prog.add_hermitian_block(name, m)
    prog.add_scalar_block("s")

    prog.set_objective(
        {"s": 2.0 * y * np.sqrt(nu), "R": -(y * y) * nu * q_coeff},
        constant=-(y * y) * noise_term,
    )
    prog.add_square_le("s", {"R": c_target}, name="target-epigraph")

    cap = p_total / (m * nu)
    for i in range(m):
        e = np.zeros((m, m))
        e[i, i] = 1.0
        prog.add_ineq({"R": e}, cap, name=f"antenna-power-{i}")

    prog.add_fro_ball(
        "R",
        scenario.reference_covariance(cfg) / nu,
        cfg.similarity_bound / nu,
        name="similarity",
    )

    ordering = {"R": 1.0}
    for name in user_names:
        ordering[name] = -1.0
    prog.add_psd(ordering, name="covariance-ordering")
    prog.add_psd({"R": 1.0}, name="psd-R")
    for name in user_names:
        prog.add_psd({name: 1.0}, name=f"psd-{name}")

    for k, name in enumerate(user_names):
        hh = linalg.as_hermitian(np.outer(channels[k], channels[k].conj()))
        prog.add_ineq(
            {"R": hh, name: -(1.0 + 1.0 / gamma) * hh},
            -cfg.user_noise_mw / nu,
            name=f"qos-user-{k + 1}",
        )
    return prog


def qt_optimize(
    cfg: scenario.ScenarioConfig,
    model: taper.InterferenceModel,
    channels: np.ndarray,
    w,
    init: tuple | None = None,
) -> TransmitDesign:
    """Run the inner alternating loop: y update, then covariance update.

    ``init`` seeds the y update with a feasible (R, [R_k]); the solver
    state is reused only across inner iterations, where the constraint
    matrix is unchanged. Raises :class:`QoSInfeasibleError` when the
    solver certifies the QoS constraints unsatisfiable,
    :class:`NumericalError` on a stall.
    """
    nu = cfg.total_power_mw
    r_default, users_default = default_initialization(cfg, channels)
    if init is None:
        r = r_default
        r_users_seed = users_default
    else:
        r = init[0]
        r_users_seed = init[1] if init[1] is not None else users_default

    trace = []
    g_prev = None
    state, cache = None, None
    r_users = list(r_users_seed)
    # the returned design is the best solved iterate by the true ratio, so
    # a noisy refinement step can never lose ground already gained
    rho_best = -np.inf
    r_best, users_best = None, None
    # cumulative stall allowance across the warm-started solve chain; only
    # truncated solves are charged, so a chain of quick converging solves
    # runs to the fixed point while a sequence of capped ones stays bounded
    budget = cfg.solver_max_iters + cfg.solver_max_iters // 2
    for it in range(1, cfg.max_inner_iterations + 1):
        y = update_y(model, w, r)
        prog = assemble_subproblem(cfg, model, channels, w, y, power_scale=nu)
        comp = prog.compile()
        x0 = None
        if state is None:
            # primal-only seed from the incumbent blocks; dual history from
            # a different filter is worse than none, but a good primal point
            # spares the slow climb of the epigraph scalar from zero
            x0 = np.zeros(comp.a.shape[1])
            blk = comp.blocks["R"]
            x0[blk.offset : blk.offset + blk.size] = conic.vec_hermitian(r / nu)
            for k in range(cfg.num_users):
                blk = comp.blocks[f"R_{k + 1}"]
                x0[blk.offset : blk.offset + blk.size] = conic.vec_hermitian(
                    r_users_seed[k] / nu
                )
            blk = comp.blocks["s"]
            x0[blk.offset] = np.sqrt(max(taper.target_quadratic(model, r, w), 0.0) / nu)
        # the opening solve carries the heavy lifting; refreshed-y
        # continuations only polish and get half the allowance
        per_solve = cfg.solver_max_iters if it == 1 else cfg.solver_max_iters // 2
        res = conic.solve(
            comp,
            eps=cfg.solver_eps,
            max_iters=min(per_solve, budget),
            warm_start=state,
            kkt_cache=cache,
            x_init=x0,
        )
        if res.status == "max_iters":
            budget -= res.iterations
        if res.status == "infeasible":
            raise QoSInfeasibleError(
                f"SINR floor {cfg.sinr_threshold_db:g} dB with "
                f"{cfg.num_users} users exceeds the power budget "
                f"{cfg.total_power_dbm:g} dBm"
            )
        if res.status == "max_iters" and max(res.primal_residual, res.dual_residual) > 1e-4:
            raise NumericalError(
                f"inner solver stalled: residuals ({res.primal_residual:.2e}, "
                f"{res.dual_residual:.2e}) after {res.iterations} iterations"
            )
        state, cache = res.state, res.kkt_cache
        # clip the eps-level negative eigenvalues the splitting solver
        # leaves behind; downstream quadratics assume R is PSD
        r_new = nu * linalg.project_psd(linalg.as_hermitian(res.values["R"], atol=1e-6))
        users_new = [
            nu * linalg.as_hermitian(res.values[f"R_{k + 1}"], atol=1e-6)
            for k in range(cfg.num_users)
        ]
        # score the step through the quadratic forms rather than the solver's
        # linear objective: the latter amplifies residual noise by the
        # coefficient scale, which swamps the signal once the filtered
        # clutter power is nearly cancelled
        num = taper.target_quadratic(model, r_new, w)
        den = taper.tapered_cn_quadratic(model, r_new, w)
        g = 2.0 * y * np.sqrt(max(num, 0.0)) - y * y * den
        if g_prev is not None and g < g_prev:
            # true ascent has dropped below solver noise; keep the incumbent
            break
        r, r_users = r_new, users_new
        rho_now = num / den
        if rho_now >= rho_best:
            rho_best, r_best, users_best = rho_now, r, r_users
        trace.append((it, g))
        if g_prev is not None and abs(g - g_prev) <= cfg.convergence_tol * max(1.0, abs(g_prev)):
            break
        if budget <= 0:
            break
        g_prev = g

    if r_best is None:
        r_best, users_best = r, r_users
    return TransmitDesign(
        covariance=r_best,
        user_covariances=users_best,
        y=update_y(model, w, r_best),
        qt_trace=trace,
    )


def extract_rank_one(r_user: np.ndarray, h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Collapse a user covariance to rank one without changing its QoS value.

    Returns (R_tilde, w_tilde) with R_tilde = w w^H and
    h^H R_tilde h = h^H R_user h exactly; R_tilde is dominated by R_user
    in the PSD order, so power and ordering constraints survive.
    """
    h = np.asarray(h, dtype=complex)
    rh = np.asarray(r_user, dtype=complex) @ h
    power = float(np.real(h.conj() @ rh))
    if power <= 1e-12 * max(1.0, float(np.trace(r_user).real)):
        raise ValueError("user receives no power; QoS constraint should prevent this")
    w = rh / np.sqrt(power)
    return linalg.as_hermitian(np.outer(w, w.conj()), atol=1e-6), w


def extract_sensing(r_total: np.ndarray, user_beams: list, tol: float = 1e-7) -> np.ndarray:
    """Factor the sensing beamformers out of the leftover covariance.

    Computes the residual R - sum w_k w_k^H, requires it PSD within a
    ``tol``-relative margin on the smallest eigenvalue, and returns a
    factor W_s with rank(residual) columns such that W_s W_s^H equals
    the residual.
    """
    resid = np.asarray(r_total, dtype=complex).copy()
    for w in user_beams:
        resid -= np.outer(w, w.conj())
    resid = linalg.as_hermitian(resid, atol=1e-6)
    evals = np.linalg.eigvalsh(resid)
    floor = tol * max(1.0, float(evals[-1]) if evals.size else 0.0)
    if evals.size and evals[0] < -floor:
        raise TightnessViolationError(
            f"sensing residual indefinite: min eigenvalue {evals[0]:.3e}",
            min_eigenvalue=float(evals[0]),
        )
    return linalg.cholesky(resid, tol=floor)


def finalize_design(
    cfg: scenario.ScenarioConfig,
    channels: np.ndarray,
    design: TransmitDesign,
) -> TransmitDesign:
    """Restore strict feasibility and extract beamformers.

    The solver meets every constraint to first-order tolerance only; this
    pass makes the PSD ordering exact, rescales onto the per-antenna caps
    and re-projects into the similarity ball (both reference models have
    exactly-capped diagonals, so the ball step cannot break the caps),
    then performs the rank-one and sensing extractions.
    """
    users = [linalg.project_psd(rk) for rk in design.user_covariances]
    total = sum(users) if users else np.zeros_like(design.covariance)
    slack = linalg.project_psd(design.covariance - total)
    r = linalg.as_hermitian(total + slack, atol=1e-6)

    cap = cfg.total_power_mw / cfg.num_tx_antennas
    scale = max(1.0, float(np.max(r.diagonal().real) / cap)) if r.size else 1.0
    r = r / scale
    users = [rk / scale for rk in users]

    r0 = scenario.reference_covariance(cfg)
    dist = float(np.linalg.norm(r - r0))
    xi = cfg.similarity_bound
    if dist > xi > 0:
        beta = xi / dist
        r = linalg.as_hermitian(r0 + beta * (r - r0), atol=1e-6)
        users = [beta * rk for rk in users]

    comm = []
    for k, rk in enumerate(users):
        _, wk = extract_rank_one(rk, channels[k])
        comm.append(wk)
    w_comm = (
        np.column_stack(comm)
        if comm
        else np.zeros((cfg.num_tx_antennas, 0), dtype=complex)
    )
    w_sense = extract_sensing(r, comm)
    return TransmitDesign(
        covariance=r,
        user_covariances=users,
        y=design.y,
        qt_trace=design.qt_trace,
        w_comm=w_comm,
        w_sense=w_sense,
    )

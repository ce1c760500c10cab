"""Self-contained conic solver for the transmit-design subproblem.

Models a linear objective over complex Hermitian matrix blocks and real
scalar blocks, subject to linear equalities/inequalities, PSD constraints
on affine combinations of blocks, second-order cones over affine rows,
and Frobenius-norm balls. Hermitian blocks are carried as real vectors
through a trace-isometric parameterization, so the whole program is a
real conic program.

The solver is a first-order operator-splitting (ADMM) method: alternate
a regularized least-squares step on the affine constraints (through a
cached Cholesky factorization) with a projection onto the product of
cones, plus over-relaxation and residual balancing of the penalty. No
external solver is involved; every run is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg

from . import linalg

ZERO_CONE_WEIGHT = 1e3
BALANCE_PERIOD = 50
BALANCE_RATIO = 5.0
INFEAS_PERIOD = 100  # iterations between infeasibility-certificate checks
INFEAS_ALIGN_TOL = 3e-6  # ||A^T dmu|| / (||A||_F ||dmu||) for a certificate
INFEAS_NEG_TOL = 1e-5  # b.dmu / (||b|| ||dmu||) strict-pairing margin
INFEAS_HITS = 3  # consecutive passing checks before declaring infeasible


# ---------------------------------------------------------------------------
# Hermitian <-> real vector parameterization


@lru_cache(maxsize=None)
def _triu(m: int):
    iu, ju = np.triu_indices(m, 1)
    iu.setflags(write=False)
    ju.setflags(write=False)
    return iu, ju


def vec_hermitian(a: np.ndarray) -> np.ndarray:
    """Map a Hermitian matrix to a real vector, isometric for the trace
    inner product: trace(A B) = vec_hermitian(A) . vec_hermitian(B)."""
    a = np.asarray(a, dtype=complex)
    m = a.shape[0]
    iu, ju = _triu(m)
    off = a[iu, ju] * np.sqrt(2.0)
    return np.concatenate([a.diagonal().real, off.real, off.imag])


def mat_hermitian(v: np.ndarray, m: int) -> np.ndarray:
    """Inverse of :func:`vec_hermitian` for dimension ``m``."""
    v = np.asarray(v, dtype=float)
    a = np.zeros((m, m), dtype=complex)
    iu, ju = _triu(m)
    k = m + iu.size
    off = (v[m:k] + 1j * v[k:]) / np.sqrt(2.0)
    a[iu, ju] = off
    a[ju, iu] = off.conj()
    a[np.diag_indices(m)] = v[:m]
    return a


# ---------------------------------------------------------------------------
# Program IR


class ProgramError(ValueError):
    """Ill-formed cone program (unknown block, dimension mismatch...)."""


@dataclass
class _Block:
    name: str
    kind: str  # "hermitian" or "scalar"
    dim: int
    offset: int
    size: int


class ConeProgram:
    """Maximize a linear functional of matrix/scalar blocks over cones."""

    def __init__(self):
        self._blocks: dict[str, _Block] = {}
        self._num_vars = 0
        self._objective: dict[str, np.ndarray | float] = {}
        self._objective_constant = 0.0
        self._eqs: list = []
        self._ineqs: list = []
        self._psd: list = []
        self._soc: list = []
        self._balls: list = []

    # -- variables ---------------------------------------------------------

    def add_hermitian_block(self, name: str, dim: int) -> None:
        """Declare a dim x dim complex Hermitian matrix variable."""
        self._check_new_name(name)
        if dim < 1:
            raise ProgramError(f"block {name!r}: dim must be >= 1")
        self._blocks[name] = _Block(name, "hermitian", dim, self._num_vars, dim * dim)
        self._num_vars += dim * dim

    def add_scalar_block(self, name: str) -> None:
        """Declare a real scalar variable."""
        self._check_new_name(name)
        self._blocks[name] = _Block(name, "scalar", 1, self._num_vars, 1)
        self._num_vars += 1

    def _check_new_name(self, name):
        if name in self._blocks:
            raise ProgramError(f"duplicate block name {name!r}")

    def _block(self, name) -> _Block:
        try:
            return self._blocks[name]
        except KeyError:
            raise ProgramError(f"unknown block {name!r}") from None

    # -- objective and constraints ------------------------------------------

    def set_objective(self, terms: dict, constant: float = 0.0) -> None:
        """Maximize sum of trace(C_b X_b) and c_s x_s, plus a constant."""
        self._validate_terms(terms)
        self._objective = dict(terms)
        self._objective_constant = float(constant)

    def add_eq(self, terms: dict, rhs: float, name: str | None = None) -> None:
        self._validate_terms(terms)
        self._eqs.append((dict(terms), float(rhs), name or f"eq{len(self._eqs)}"))

    def add_ineq(self, terms: dict, rhs: float, name: str | None = None) -> None:
        """Linear inequality: functional(blocks) <= rhs."""
        self._validate_terms(terms)
        self._ineqs.append((dict(terms), float(rhs), name or f"ineq{len(self._ineqs)}"))

    def add_psd(
        self,
        coeffs: dict[str, float],
        offset: np.ndarray | None = None,
        name: str | None = None,
    ) -> None:
        """Constrain sum_b coeffs[b] * X_b + offset to be PSD.

        All referenced blocks must be Hermitian and share one dimension.
        """
        if not coeffs and offset is None:
            raise ProgramError("empty PSD constraint")
        dims = set()
        for bname in coeffs:
            blk = self._block(bname)
            if blk.kind != "hermitian":
                raise ProgramError(f"PSD constraint references scalar block {bname!r}")
            dims.add(blk.dim)
        if offset is not None:
            offset = linalg.as_hermitian(offset, atol=1e-8)
            dims.add(offset.shape[0])
        if len(dims) != 1:
            raise ProgramError(f"PSD constraint mixes dimensions {sorted(dims)}")
        dim = dims.pop()
        if offset is None:
            offset = np.zeros((dim, dim), dtype=complex)
        self._psd.append(
            ({k: float(v) for k, v in coeffs.items()}, offset, dim, name or f"psd{len(self._psd)}")
        )

    def add_soc(self, rows: list, name: str | None = None) -> None:
        """Second-order cone over affine rows: rows[0] >= norm(rows[1:]).

        Each row is a (terms, offset) pair defining one affine scalar.
        """
        if len(rows) < 1:
            raise ProgramError("SOC needs at least one row")
        clean = []
        for terms, off in rows:
            self._validate_terms(terms)
            clean.append((dict(terms), float(off)))
        self._soc.append((clean, name or f"soc{len(self._soc)}"))

    def add_square_le(self, scalar_name: str, terms: dict, offset: float = 0.0,
                      name: str | None = None) -> None:
        """Rotated-cone convenience: scalar^2 <= functional(blocks) + offset.

        Encoded as the standard cone ||(2 s, t - 1)|| <= t + 1 with
        t the affine right-hand side.
        """
        blk = self._block(scalar_name)
        if blk.kind != "scalar":
            raise ProgramError(f"{scalar_name!r} is not a scalar block")
        self._validate_terms(terms)
        self.add_soc(
            [
                (dict(terms), offset + 1.0),
                ({scalar_name: 2.0}, 0.0),
                (dict(terms), offset - 1.0),
            ],
            name=name,
        )

    def add_fro_ball(
        self, block_name: str, center: np.ndarray, radius: float, name: str | None = None
    ) -> None:
        """Frobenius-ball constraint ||X_b - center||_F <= radius."""
        blk = self._block(block_name)
        if blk.kind != "hermitian":
            raise ProgramError(f"{block_name!r} is not a Hermitian block")
        center = linalg.as_hermitian(center, atol=1e-8)
        if center.shape[0] != blk.dim:
            raise ProgramError("ball center dimension mismatch")
        if radius < 0:
            raise ProgramError("ball radius must be >= 0")
        self._balls.append((block_name, center, float(radius), name or f"ball{len(self._balls)}"))

    def _validate_terms(self, terms: dict) -> None:
        for bname, coeff in terms.items():
            blk = self._block(bname)
            if blk.kind == "hermitian":
                c = np.asarray(coeff)
                if c.shape != (blk.dim, blk.dim):
                    raise ProgramError(
                        f"coefficient for block {bname!r} has shape {c.shape}, "
                        f"expected {(blk.dim, blk.dim)}"
                    )
            else:
                float(coeff)

    # -- compilation ---------------------------------------------------------

    def _functional(self, terms: dict) -> np.ndarray:
        v = np.zeros(self._num_vars)
        for bname, coeff in terms.items():
            blk = self._blocks[bname]
            if blk.kind == "hermitian":
                v[blk.offset : blk.offset + blk.size] = vec_hermitian(
                    linalg.as_hermitian(coeff, atol=1e-8)
                )
            else:
                v[blk.offset] = float(coeff)
        return v

    def compile(self) -> "CompiledProgram":
        n = self._num_vars
        if n == 0:
            raise ProgramError("program has no variables")
        rows, rhs, cones = [], [], []
        for terms, r, _ in self._eqs:
            rows.append(self._functional(terms))
            rhs.append(r)
        if self._eqs:
            cones.append(("zero", 0, len(self._eqs), 0.0))
        for terms, r, _ in self._ineqs:
            rows.append(self._functional(terms))
            rhs.append(r)
        if self._ineqs:
            cones.append(("nonneg", len(self._eqs), len(self._ineqs), 0.0))
        start = len(rows)
        for soc_rows, _ in self._soc:
            for terms, off in soc_rows:
                rows.append(-self._functional(terms))
                rhs.append(off)
            cones.append(("soc", start, len(soc_rows), 0.0))
            start += len(soc_rows)
        for coeffs, offset, dim, _ in self._psd:
            block_rows = np.zeros((dim * dim, n))
            for bname, c in coeffs.items():
                blk = self._blocks[bname]
                sl = slice(blk.offset, blk.offset + blk.size)
                block_rows[:, sl] -= c * np.eye(dim * dim)
            rows.extend(block_rows)
            rhs.extend(vec_hermitian(offset))
            cones.append(("psd", start, dim * dim, 0.0))
            start += dim * dim
        for bname, center, radius, _ in self._balls:
            blk = self._blocks[bname]
            block_rows = np.zeros((blk.size, n))
            block_rows[:, blk.offset : blk.offset + blk.size] = -np.eye(blk.size)
            rows.extend(block_rows)
            rhs.extend(-vec_hermitian(center))
            cones.append(("ball", start, blk.size, radius))
            start += blk.size
        a = np.array(rows) if rows else np.zeros((0, n))
        b = np.array(rhs) if rhs else np.zeros(0)
        return CompiledProgram(
            program=self,
            c=self._functional(self._objective),
            constant=self._objective_constant,
            a=a,
            b=b,
            cones=cones,
            blocks=dict(self._blocks),
        )


@dataclass
class CompiledProgram:
    program: ConeProgram
    c: np.ndarray
    constant: float
    a: np.ndarray
    b: np.ndarray
    cones: list
    blocks: dict

    def extract(self, x: np.ndarray) -> dict:
        out = {}
        for name, blk in self.blocks.items():
            sl = x[blk.offset : blk.offset + blk.size]
            out[name] = mat_hermitian(sl, blk.dim) if blk.kind == "hermitian" else float(sl[0])
        return out


# ---------------------------------------------------------------------------
# Cone projections


def _project_soc(v: np.ndarray) -> np.ndarray:
    t, z = v[0], v[1:]
    nz = np.linalg.norm(z)
    if nz <= t:
        return v
    if nz <= -t:
        return np.zeros_like(v)
    scale = 0.5 * (1.0 + t / nz)
    out = np.empty_like(v)
    out[0] = scale * nz
    out[1:] = scale * z
    return out


class _ConeProjector:
    """Euclidean projection onto the product cone, precompiled per program.

    PSD cones of equal dimension are stacked so one batched
    eigendecomposition serves them all; that batch runs either on the
    complex Hermitian matrices directly or on their real-symmetric
    embedding, selected by ``backend``.
    """

    def __init__(self, cones: list, backend: str):
        self.backend = backend
        self.zero: list = []
        self.nonneg: list = []
        self.soc: list = []
        self.ball: list = []
        psd_by_dim: dict[int, list[int]] = {}
        for kind, start, size, extra in cones:
            if kind == "zero":
                self.zero.append(slice(start, start + size))
            elif kind == "nonneg":
                self.nonneg.append(slice(start, start + size))
            elif kind == "soc":
                self.soc.append(slice(start, start + size))
            elif kind == "ball":
                self.ball.append((slice(start, start + size), extra))
            elif kind == "psd":
                dim = int(round(np.sqrt(size)))
                psd_by_dim.setdefault(dim, []).append(start)
            else:  # pragma: no cover - construction guarantees known kinds
                raise ProgramError(f"unknown cone kind {kind!r}")
        self.psd_groups = [
            (dim, np.array(starts)) for dim, starts in sorted(psd_by_dim.items())
        ]

    def _gather(self, v, starts, size):
        return np.stack([v[s : s + size] for s in starts])

    def _project_psd_group(self, vb: np.ndarray, m: int) -> np.ndarray:
        k = vb.shape[0]
        iu, ju = _triu(m)
        ko = m + iu.size
        mats = np.zeros((k, m, m), dtype=complex)
        off = (vb[:, m:ko] + 1j * vb[:, ko:]) / np.sqrt(2.0)
        mats[:, iu, ju] = off
        mats[:, ju, iu] = off.conj()
        didx = np.arange(m)
        mats[:, didx, didx] = vb[:, :m]
        if self.backend == "real":
            emb = np.zeros((k, 2 * m, 2 * m))
            emb[:, :m, :m] = mats.real
            emb[:, m:, m:] = mats.real
            emb[:, :m, m:] = -mats.imag
            emb[:, m:, :m] = mats.imag
            w, q = np.linalg.eigh(emb)
            clipped = (q * np.maximum(w, 0.0)[:, None, :]) @ q.transpose(0, 2, 1)
            proj = 0.5 * (clipped[:, :m, :m] + clipped[:, m:, m:]) + 0.5j * (
                clipped[:, m:, :m] - clipped[:, :m, m:]
            )
        else:
            w, q = np.linalg.eigh(mats)
            proj = (q * np.maximum(w, 0.0)[:, None, :]) @ q.conj().transpose(0, 2, 1)
        out = np.empty_like(vb)
        out[:, :m] = proj[:, didx, didx].real
        poff = proj[:, iu, ju] * np.sqrt(2.0)
        out[:, m:ko] = poff.real
        out[:, ko:] = poff.imag
        return out

    def __call__(self, v: np.ndarray) -> np.ndarray:
        out = v.copy()
        for sl in self.zero:
            out[sl] = 0.0
        for sl in self.nonneg:
            np.maximum(v[sl], 0.0, out=out[sl])
        for sl in self.soc:
            out[sl] = _project_soc(v[sl])
        for sl, radius in self.ball:
            norm = np.linalg.norm(v[sl])
            if norm > radius:
                out[sl] = v[sl] * (radius / norm)
        for dim, starts in self.psd_groups:
            size = dim * dim
            proj = self._project_psd_group(self._gather(v, starts, size), dim)
            for row, s in enumerate(starts):
                out[s : s + size] = proj[row]
        return out


def _project_cones(v: np.ndarray, cones: list, backend: str) -> np.ndarray:
    return _ConeProjector(cones, backend)(v)


# ---------------------------------------------------------------------------
# Solver


@dataclass
class SolverState:
    x: np.ndarray
    s: np.ndarray
    u: np.ndarray
    rho: np.ndarray


@dataclass
class KKTCache:
    probe: np.ndarray
    probe_image: np.ndarray
    rho: np.ndarray
    rho_scale: float
    sigma: float
    factor: tuple


@dataclass
class SolverResult:
    values: dict
    objective: float
    primal_residual: float
    dual_residual: float
    iterations: int
    status: str  # "optimal" | "max_iters" | "infeasible"
    state: SolverState = field(repr=False)
    kkt_cache: KKTCache = field(repr=False)


def _factorize(a: np.ndarray, rho: np.ndarray, sigma: float) -> tuple:
    scaled = a * np.sqrt(rho)[:, None]
    m = sigma * np.eye(a.shape[1]) + scaled.T @ scaled
    return scipy.linalg.cho_factor(m, lower=True, check_finite=False)


def solve(
    prog: ConeProgram | CompiledProgram,
    eps: float = 1e-6,
    max_iters: int = 50000,
    warm_start: SolverState | None = None,
    kkt_cache: KKTCache | None = None,
    psd_backend: str = "real",
    sigma: float = 1e-6,
    relaxation: float = 1.5,
    rho0: float = 1.0,
    x_init: np.ndarray | None = None,
    accel_memory: int = 10,
) -> SolverResult:
    """Solve a cone program to tolerance ``eps`` on max(primal, dual) residual.

    ``warm_start`` resumes from a previous solution's state and
    ``kkt_cache`` reuses its factorization when the constraint matrix is
    unchanged (both come from a prior :class:`SolverResult`).
    ``x_init`` seeds the primal variables only (ignored when a full
    ``warm_start`` is given). ``accel_memory`` sets the history length of
    the safeguarded extrapolation on the fixed-point iterates; 0 disables
    it.
    """
    if psd_backend not in ("real", "complex"):
        raise ProgramError("psd_backend must be 'real' or 'complex'")
    comp = prog.compile() if isinstance(prog, ConeProgram) else prog
    a, b, cones = comp.a, comp.b, comp.cones
    n_rows, n = a.shape

    # normalize the objective so residual tolerances mean the same thing
    # across outer iterations whose objective scale varies by decades
    kappa = max(1.0, np.max(np.abs(comp.c)) if comp.c.size else 1.0)
    q = -comp.c / kappa

    row_weight = np.ones(n_rows)
    for kind, start, size, _ in cones:
        if kind == "zero":
            row_weight[start : start + size] = ZERO_CONE_WEIGHT

    def as_rho(scale):
        return scale * row_weight

    probe = np.cos(0.7 * np.arange(n) + 0.3)
    probe_image = a @ probe
    if (
        kkt_cache is not None
        and kkt_cache.probe.shape == (n,)
        and kkt_cache.sigma == sigma
        and np.array_equal(kkt_cache.probe_image, probe_image)
    ):
        rho = kkt_cache.rho.copy()
        rho_scale = kkt_cache.rho_scale
        factor = kkt_cache.factor
    else:
        rho_scale = rho0
        rho = as_rho(rho_scale)
        factor = _factorize(a, rho, sigma)

    project = _ConeProjector(cones, psd_backend)
    if warm_start is not None and warm_start.x.shape == (n,) and warm_start.s.shape == (n_rows,):
        x = warm_start.x.copy()
        s = warm_start.s.copy()
        u = warm_start.u * (warm_start.rho / rho)
    elif x_init is not None and x_init.shape == (n,):
        x = np.asarray(x_init, dtype=float).copy()
        s = project(b - a @ x)
        u = np.zeros(n_rows)
    else:
        x = np.zeros(n)
        s = project(b.copy())
        u = np.zeros(n_rows)

    status = "max_iters"
    iters = 0
    r_prim = r_dual = np.inf
    norm_a = float(np.linalg.norm(a))
    norm_b = max(float(np.linalg.norm(b)), 1e-30)
    mu_prev = rho * u
    infeas_hits = 0
    # extrapolation history over the map (x, s, u) -> (x2, s2, u2); the
    # candidate fed back may leave the cones, but every reported iterate
    # is a genuine map output
    aa_f: list = []
    aa_g: list = []
    aa_norm_best = np.inf
    x_out, s_out, u_out = x, s, u

    for iters in range(1, max_iters + 1):
        rhs = sigma * x - q + a.T @ (rho * (b - s + u))
        x2 = scipy.linalg.cho_solve(factor, rhs, check_finite=False)
        ax = a @ x2
        s_raw = b - ax
        s_rel = relaxation * s_raw + (1.0 - relaxation) * s
        s2 = project(s_rel + u)
        u2 = u + s_rel - s2
        x_out, s_out, u_out = x2, s2, u2

        mu = rho * u2
        r_prim = float(np.linalg.norm(ax + s2 - b))
        r_dual = float(np.linalg.norm(q - a.T @ mu))
        if max(r_prim, r_dual) <= eps:
            status = "optimal"
            break

        if iters % INFEAS_PERIOD == 0:
            # for an infeasible program the dual iterate diverges along a
            # fixed ray whose direction certifies infeasibility: the change
            # in mu becomes orthogonal to the columns of A while pairing
            # strictly with b (positively, because mu here is the negated
            # conventional dual; see the r_dual expression)
            dmu = mu - mu_prev
            mu_prev = mu.copy()
            nd = float(np.linalg.norm(dmu))
            certified = False
            if nd > 1e-10 * max(1.0, float(np.linalg.norm(mu))) and max(r_prim, r_dual) > 10 * eps:
                align = float(np.linalg.norm(a.T @ dmu)) / (norm_a * nd)
                pairing = float(b @ dmu) / (norm_b * nd)
                certified = align <= INFEAS_ALIGN_TOL and pairing >= INFEAS_NEG_TOL
            infeas_hits = infeas_hits + 1 if certified else 0
            if infeas_hits >= INFEAS_HITS:
                status = "infeasible"
                break

        if iters % BALANCE_PERIOD == 0 and min(r_prim, r_dual) > 0:
            ratio = r_prim / r_dual
            if ratio > BALANCE_RATIO or ratio < 1.0 / BALANCE_RATIO:
                new_scale = float(np.clip(rho_scale * np.sqrt(ratio), 1e-6, 1e6))
                if new_scale != rho_scale:
                    u2 = u2 * (rho / as_rho(new_scale))
                    rho, rho_scale = as_rho(new_scale), new_scale
                    factor = _factorize(a, rho, sigma)
                    aa_f, aa_g, aa_norm_best = [], [], np.inf
                    x, s, u = x2, s2, u2
                    x_out, s_out, u_out = x2, s2, u2
                    continue

        if accel_memory:
            v_cur = np.concatenate([x, s, u])
            g_cur = np.concatenate([x2, s2, u2])
            f = g_cur - v_cur
            fn = float(np.linalg.norm(f))
            if fn > 2.0 * aa_norm_best:
                # extrapolation sent the residual up; restart from the map
                aa_f, aa_g, aa_norm_best = [], [], np.inf
                x, s, u = x2, s2, u2
                continue
            aa_norm_best = min(aa_norm_best, fn)
            aa_f.append(f)
            aa_g.append(g_cur)
            if len(aa_f) > accel_memory + 1:
                aa_f.pop(0)
                aa_g.pop(0)
            if len(aa_f) >= 3:
                fdiff = np.stack([aa_f[i + 1] - aa_f[i] for i in range(len(aa_f) - 1)], axis=1)
                gdiff = np.stack([aa_g[i + 1] - aa_g[i] for i in range(len(aa_g) - 1)], axis=1)
                gram = fdiff.T @ fdiff
                ridge = 1e-10 * max(float(np.trace(gram)), 1e-300)
                try:
                    gamma = np.linalg.solve(gram + ridge * np.eye(gram.shape[0]), fdiff.T @ f)
                    v_new = g_cur - gdiff @ gamma
                except np.linalg.LinAlgError:
                    v_new = g_cur
                if np.isfinite(v_new).all():
                    x = v_new[:n]
                    s = v_new[n : n + n_rows]
                    u = v_new[n + n_rows :]
                    continue
        x, s, u = x2, s2, u2

    values = comp.extract(x_out)
    objective = float(comp.c @ x_out + comp.constant)
    return SolverResult(
        values=values,
        objective=objective,
        primal_residual=r_prim,
        dual_residual=r_dual,
        iterations=iters,
        status=status,
        state=SolverState(x=x_out.copy(), s=s_out.copy(), u=u_out.copy(), rho=rho.copy()),
        kkt_cache=KKTCache(
            probe=probe,
            probe_image=probe_image,
            rho=rho.copy(),
            rho_scale=rho_scale,
            sigma=sigma,
            factor=factor,
        ),
    )


# ---------------------------------------------------------------------------
# Independent verification


@dataclass
class ConstraintResidual:
    kind: str
    name: str
    residual: float


def verify(prog: ConeProgram, result: SolverResult) -> list[ConstraintResidual]:
    """Recompute every constraint residual from the returned block values.

    Residuals are violation magnitudes in the original (unscaled) problem
    data, independent of solver internals: absolute error for equalities,
    positive part for inequalities, |min(0, min-eigenvalue)| for PSD
    constraints, norm excess for SOC and ball constraints.
    """
    vals = result.values

    def functional(terms):
        total = 0.0
        for bname, coeff in terms.items():
            blk = prog._blocks[bname]
            if blk.kind == "hermitian":
                total += float(np.trace(np.asarray(coeff) @ vals[bname]).real)
            else:
                total += float(coeff) * vals[bname]
        return total

    out = []
    for terms, rhs, name in prog._eqs:
        out.append(ConstraintResidual("eq", name, abs(functional(terms) - rhs)))
    for terms, rhs, name in prog._ineqs:
        out.append(ConstraintResidual("ineq", name, max(0.0, functional(terms) - rhs)))
    for coeffs, offset, dim, name in prog._psd:
        expr = offset.astype(complex).copy()
        for bname, c in coeffs.items():
            expr += c * vals[bname]
        w = np.linalg.eigvalsh(linalg.as_hermitian(expr, atol=1e-6))
        out.append(ConstraintResidual("psd", name, abs(min(0.0, float(w[0])))))
    for rows, name in prog._soc:
        z = np.array([functional(t) + off for t, off in rows])
        out.append(ConstraintResidual("soc", name, max(0.0, float(np.linalg.norm(z[1:]) - z[0]))))
    for bname, center, radius, name in prog._balls:
        dist = float(np.linalg.norm(vals[bname] - center))
        out.append(ConstraintResidual("ball", name, max(0.0, dist - radius)))
    return out


def max_violation(prog: ConeProgram, result: SolverResult) -> float:
    residuals = verify(prog, result)
    return max((r.residual for r in residuals), default=0.0)

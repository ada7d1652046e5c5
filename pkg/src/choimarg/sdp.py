"""Dense semidefinite feasibility and optimization over block-diagonal variables.

The solver is a primal-dual path-following interior-point method with the
HKM direction (linearize XZ = mu*1, symmetrize the X step), fixed centering
sigma = 0.1, step fraction 0.98 to the cone boundary, and an iteration cap of
200. It is written for the problem sizes of this package (realified block
dimensions up to ~64, a few hundred constraint rows at most) and favors
robustness and determinism over speed: fixed initialization, no randomized
pivoting, no Mehrotra correction.

Problems are stated over real symmetric blocks::

    max/min  sum_b <C_b, X_b> + c_free * t
    s.t.     sum_b <A_i^b, X_b> + a_i * t = b_i        (i = 1..m)
             X_b >= 0,   t free (optional scalar)

The optional free scalar carries the feasibility slack of the prescribed
marginal problems: "max t s.t. X - t*1 >= 0, A(X) = b" is solved with
Y = X - t*1 as the PSD block and t eliminated inside the Schur system.

Hermitian problems enter through :func:`hermitian_feasibility`, which embeds
them as real symmetric problems via ``realify`` and reads the witness back.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .config import DEFAULT, Tolerances
from .linalg import derealify, realify

__all__ = [
    "SdpProblem",
    "SdpSolution",
    "SdpError",
    "solve",
    "FeasibilityReport",
    "FEASIBLE",
    "INFEASIBLE",
    "MARGINAL",
    "hermitian_feasibility",
    "feasibility",
]

OPTIMAL = "optimal"
MAX_ITERATIONS = "max_iterations"
NUMERICAL_FAILURE = "numerical_failure"

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
MARGINAL = "marginal"


class SdpError(RuntimeError):
    """Raised when the solver cannot certify a verdict."""


@dataclass(frozen=True)
class SdpProblem:
    """Block-diagonal SDP with affine equality constraints.

    constraints: list of (per-block symmetric matrices, rhs). A problem may
    carry one free scalar variable; ``free_coeffs`` holds its per-constraint
    coefficients and ``free_objective`` its objective coefficient.
    """

    block_dims: tuple[int, ...]
    objective: tuple[np.ndarray, ...] | None
    constraints: tuple[tuple[tuple[np.ndarray, ...], float], ...]
    sense: str = "max"
    free_objective: float | None = None
    free_coeffs: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.sense not in ("max", "min"):
            raise ValueError(f"sense must be 'max' or 'min', got {self.sense!r}")
        dims = tuple(int(d) for d in self.block_dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"block dimensions must be positive, got {dims}")
        object.__setattr__(self, "block_dims", dims)
        if not self.constraints:
            raise ValueError("at least one constraint row is required")
        for mats, _rhs in self.constraints:
            if len(mats) != len(dims):
                raise ValueError("each constraint needs one matrix per block")
            for m, d in zip(mats, dims):
                if np.asarray(m).shape != (d, d):
                    raise ValueError(f"constraint block shape {np.asarray(m).shape} != ({d}, {d})")
        if self.objective is not None:
            for m, d in zip(self.objective, dims):
                if np.asarray(m).shape != (d, d):
                    raise ValueError(f"objective block shape {np.asarray(m).shape} != ({d}, {d})")
        if (self.free_objective is None) != (self.free_coeffs is None):
            raise ValueError("free_objective and free_coeffs must be given together")
        if self.free_coeffs is not None and len(self.free_coeffs) != len(self.constraints):
            raise ValueError("free_coeffs length must match the number of constraints")


@dataclass(frozen=True)
class SdpSolution:
    blocks: tuple[np.ndarray, ...]
    free_value: float | None
    dual: np.ndarray
    primal_objective: float
    dual_objective: float
    gap: float
    primal_residual: float
    dual_residual: float
    iterations: int
    status: str
    history: tuple[dict, ...] = field(default=(), repr=False)


def _sym(m: np.ndarray) -> np.ndarray:
    return (m + m.T) / 2


def _svec(s: np.ndarray) -> np.ndarray:
    n = s.shape[0]
    iu = np.triu_indices(n)
    w = np.where(iu[0] == iu[1], 1.0, np.sqrt(2.0))
    return s[iu] * w


def _step_to_boundary(s: np.ndarray, ds: np.ndarray) -> float:
    """sup { a >= 0 : s + a*ds >= 0 } for s > 0 symmetric."""
    l = np.linalg.cholesky(s)
    w = np.linalg.solve(l, np.linalg.solve(l, ds).T).T
    lam = np.linalg.eigvalsh(_sym(w))[0]
    if lam >= 0:
        return np.inf
    return -1.0 / lam


def _prune_rows(rows: np.ndarray, rhs: np.ndarray, tol: float = 1e-10) -> tuple[np.ndarray, float]:
    """Rank-revealing row selection.

    Returns the kept row indices and the worst right-hand-side mismatch of the
    discarded (linearly dependent) rows; a large mismatch means the equality
    system is inconsistent.
    """
    m = rows.shape[0]
    _q, r, piv = scipy.linalg.qr(rows.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    scale = diag[0] if diag.size and diag[0] > 0 else 0.0
    if scale == 0.0:
        return np.array([], dtype=int), float(np.max(np.abs(rhs))) if m else 0.0
    rank = int(np.sum(diag > tol * scale))
    kept = np.sort(piv[:rank])
    dropped = np.sort(piv[rank:])
    mismatch = 0.0
    if dropped.size:
        coeff, *_ = np.linalg.lstsq(rows[kept].T, rows[dropped].T, rcond=None)
        mismatch = float(np.max(np.abs(coeff.T @ rhs[kept] - rhs[dropped])))
    return kept, mismatch


def solve(
    problem: SdpProblem,
    *,
    gap_tol: float = DEFAULT.solver,
    feas_tol: float = 1e-9,
    max_iterations: int = 200,
    init_scale: float = 1.0,
    debug: bool = False,
) -> SdpSolution:
    """Run the interior-point method on a (preprocessed) problem.

    Linearly dependent constraint rows are pruned by rank-revealing QR; an
    inconsistent equality system raises ValueError. The returned dual vector
    is indexed by the original rows (zeros on pruned ones).
    """
    dims = problem.block_dims
    nb = len(dims)
    sign = 1.0 if problem.sense == "max" else -1.0
    cs = [
        sign * _sym(np.asarray(c, dtype=float))
        for c in (problem.objective or [np.zeros((d, d)) for d in dims])
    ]
    m_all = len(problem.constraints)
    a_mats = [
        np.stack([_sym(np.asarray(row[0][b], dtype=float)) for row in problem.constraints])
        for b in range(nb)
    ]
    b_all = np.array([row[1] for row in problem.constraints], dtype=float)
    has_free = problem.free_coeffs is not None
    free_all = np.asarray(problem.free_coeffs, dtype=float) if has_free else np.zeros(m_all)
    c_free = sign * float(problem.free_objective) if has_free else 0.0

    stacked = np.hstack(
        [np.stack([_svec(a_mats[b][i]) for i in range(m_all)]) for b in range(nb)]
        + ([free_all[:, None]] if has_free else [])
    )
    kept, mismatch = _prune_rows(stacked, b_all)
    if kept.size == 0:
        raise ValueError("constraint system has rank zero")
    if mismatch > 1e-9 * max(1.0, float(np.max(np.abs(b_all)))):
        raise ValueError(f"inconsistent equality constraints (mismatch {mismatch:.3e})")
    a_mats = [a[kept] for a in a_mats]
    b = b_all[kept]
    a_free = free_all[kept]
    m = kept.size

    xs = [init_scale * np.eye(d) for d in dims]
    zs = [np.eye(d) for d in dims]
    y = np.zeros(m)
    t = 0.0
    n_total = sum(dims)
    sigma = 0.1
    history: list[dict] = []
    status = MAX_ITERATIONS
    it = 0
    pinf = dinf = relgap = np.inf
    primal = dual = 0.0

    def operator(xs_cur: list[np.ndarray]) -> np.ndarray:
        return sum(np.einsum("ikl,kl->i", a_mats[b_], xs_cur[b_]) for b_ in range(nb))

    def adjoint(y_cur: np.ndarray, b_: int) -> np.ndarray:
        return np.einsum("i,ikl->kl", y_cur, a_mats[b_])

    for it in range(1, max_iterations + 1):
        try:
            zinvs = []
            for z in zs:
                l = np.linalg.cholesky(z)
                linv = scipy.linalg.solve_triangular(l, np.eye(z.shape[0]), lower=True)
                zinvs.append(linv.T @ linv)
        except np.linalg.LinAlgError:
            status = NUMERICAL_FAILURE
            break

        mu = sum(np.sum(x * z) for x, z in zip(xs, zs)) / n_total
        target = sigma * mu
        r_p = b - operator(xs) - a_free * t
        r_ds = [cs[b_] + zs[b_] - adjoint(y, b_) for b_ in range(nb)]
        r_f = c_free - float(a_free @ y) if has_free else 0.0

        schur = np.zeros((m, m))
        rhs = -r_p.copy()
        for b_ in range(nb):
            tz = np.einsum("kp,ipq->ikq", zinvs[b_], a_mats[b_])
            tzx = np.einsum("ikq,ql->ikl", tz, xs[b_])
            tzx = (tzx + np.transpose(tzx, (0, 2, 1))) / 2
            schur += np.einsum("ikl,jlk->ij", a_mats[b_], tzx)
            core = target * zinvs[b_] - xs[b_] + _sym(zinvs[b_] @ r_ds[b_] @ xs[b_])
            rhs += np.einsum("ikl,lk->i", a_mats[b_], core)
        schur = _sym(schur)

        try:
            cho = scipy.linalg.cho_factor(schur + 1e-14 * np.trace(schur) / m * np.eye(m))
            if has_free:
                u = scipy.linalg.cho_solve(cho, rhs)
                w = scipy.linalg.cho_solve(cho, a_free)
                denom = float(a_free @ w)
                if denom <= 0:
                    status = NUMERICAL_FAILURE
                    break
                dt = (r_f - float(a_free @ u)) / denom
                dy = u + dt * w
            else:
                dt = 0.0
                dy = scipy.linalg.cho_solve(cho, rhs)
        except np.linalg.LinAlgError:
            status = NUMERICAL_FAILURE
            break

        dzs = [adjoint(dy, b_) - r_ds[b_] for b_ in range(nb)]
        dxs = [
            target * zinvs[b_] - xs[b_] - _sym(zinvs[b_] @ dzs[b_] @ xs[b_])
            for b_ in range(nb)
        ]

        try:
            alpha_p = min([1.0] + [0.98 * _step_to_boundary(xs[b_], dxs[b_]) for b_ in range(nb)])
            alpha_d = min([1.0] + [0.98 * _step_to_boundary(zs[b_], dzs[b_]) for b_ in range(nb)])
        except np.linalg.LinAlgError:
            status = NUMERICAL_FAILURE
            break
        if alpha_p <= 0 or alpha_d <= 0:
            status = NUMERICAL_FAILURE
            break
        xs = [_sym(x + alpha_p * dx) for x, dx in zip(xs, dxs)]
        zs = [_sym(z + alpha_d * dz) for z, dz in zip(zs, dzs)]
        y = y + alpha_d * dy
        t = t + alpha_p * dt

        primal = sum(np.sum(c * x) for c, x in zip(cs, xs)) + c_free * t
        dual = float(b @ y)
        r_p = b - operator(xs) - a_free * t
        pinf = float(np.linalg.norm(r_p)) / (1.0 + float(np.linalg.norm(b)))
        dinf = max(
            float(np.max(np.abs(cs[b_] + zs[b_] - adjoint(y, b_)))) for b_ in range(nb)
        )
        if has_free:
            dinf = max(dinf, abs(c_free - float(a_free @ y)))
        relgap = abs(dual - primal) / (1.0 + abs(primal))

        if debug:
            history.append(
                {"iteration": it, "mu": mu, "primal": primal, "dual": dual,
                 "primal_residual": pinf, "dual_residual": dinf}
            )
            if pinf < 1e-7 and dinf < 1e-7 and primal > dual + 1e-6 * (1.0 + abs(primal)):
                raise SdpError(
                    f"weak duality violated at iteration {it}: primal {primal!r} > dual {dual!r}"
                )

        cmax = max(float(np.max(np.abs(c))) for c in cs)
        if pinf <= feas_tol and dinf <= feas_tol * (1.0 + cmax) and relgap <= gap_tol:
            status = OPTIMAL
            break

    dual_full = np.zeros(m_all)
    dual_full[kept] = sign * y
    return SdpSolution(
        blocks=tuple(xs),
        free_value=(t if has_free else None),
        dual=dual_full,
        primal_objective=sign * primal,
        dual_objective=sign * dual,
        gap=relgap,
        primal_residual=pinf,
        dual_residual=dinf,
        iterations=it,
        status=status,
        history=tuple(history),
    )


# ---------------------------------------------------------------------------
# Hermitian feasibility with slack
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FeasibilityReport:
    """Verdict of a prescribed-marginal feasibility question.

    slack is the optimal t of "max t s.t. X - t*1 >= 0, A(X) = b". Its sign
    decides feasibility outside the band |t| < eps. An in-band slack is
    reported feasible only when an eigenvalue-clipped witness independently
    re-validates (PSD to -1e-8, residuals <= 1e-6); otherwise Marginal.
    witness is the primal matrix (first block for multi-block problems),
    dual_certificate the dual vector on the original constraint rows.
    """

    status: str
    slack: float
    witness: np.ndarray | None
    dual_certificate: np.ndarray | None
    blocks: tuple[np.ndarray, ...] = field(default=(), repr=False)
    solution: SdpSolution | None = field(default=None, repr=False)

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE


def _clip_psd(x: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((x + x.conj().T) / 2)
    w = np.maximum(w, 0.0)
    return (v * w) @ v.conj().T


def _max_residual(
    rows: Sequence[tuple[Sequence[np.ndarray], float]], blocks: Sequence[np.ndarray]
) -> float:
    worst = 0.0
    for mats, rhs in rows:
        val = sum(float(np.real(np.sum(np.conj(h) * x))) for h, x in zip(mats, blocks))
        worst = max(worst, abs(val - rhs))
    return worst


def hermitian_feasibility(
    block_dims: Sequence[int],
    rows: Sequence[tuple[Sequence[np.ndarray], float]],
    *,
    tol: Tolerances = DEFAULT,
    gap_tol: float | None = None,
    band: float | None = None,
    max_iterations: int = 200,
) -> FeasibilityReport:
    """Decide existence of Hermitian PSD blocks with prescribed affine data.

    rows: (per-block Hermitian matrices, real rhs) meaning
    sum_b <H_i^b, X_b> = rhs_i with <A, B> = Tr(A B). The row span must fix
    the total block trace, otherwise the slack program is unbounded and a
    ValueError is raised (missing normalization).
    """
    gap_tol = tol.solver if gap_tol is None else gap_tol
    band = tol.band if band is None else band
    # solve tighter than the Marginal band so that slack noise cannot move a
    # boundary problem across the band edge
    gap_tol = min(gap_tol, band / 10.0)
    dims = tuple(int(d) for d in block_dims)
    if not rows:
        raise ValueError("at least one constraint row is required")

    real_rows = []
    for mats, rhs in rows:
        if len(mats) != len(dims):
            raise ValueError("each row needs one matrix per block")
        real_rows.append((tuple(realify(h) for h in mats), 2.0 * float(rhs)))

    stacked = np.stack(
        [np.concatenate([_svec(h) for h in mats]) for mats, _ in real_rows]
    )
    ident = np.concatenate([_svec(np.eye(2 * d)) for d in dims])
    coef, res, *_ = np.linalg.lstsq(stacked.T, ident, rcond=None)
    res_norm = float(np.sqrt(res[0])) if len(res) else float(
        np.linalg.norm(stacked.T @ coef - ident)
    )
    if res_norm > 1e-8 * np.linalg.norm(ident):
        raise ValueError(
            "slack program is unbounded: constraint rows do not fix the total trace "
            "(missing normalization row)"
        )

    rhs_vec = np.array([r for _, r in real_rows])
    kept, mismatch = _prune_rows(np.hstack([stacked, np.array([[2.0 * sum(np.trace(h).real for h in mats)] for mats, _ in rows])]), rhs_vec)
    if mismatch > 1e-9 * max(1.0, float(np.max(np.abs(rhs_vec)))):
        return FeasibilityReport(
            status=INFEASIBLE, slack=float("-inf"), witness=None, dual_certificate=None
        )

    problem = SdpProblem(
        block_dims=tuple(2 * d for d in dims),
        objective=None,
        constraints=tuple((mats, rhs) for mats, rhs in real_rows),
        sense="max",
        free_objective=1.0,
        free_coeffs=tuple(2.0 * sum(float(np.trace(h).real) for h in mats) for mats, _ in rows),
    )
    trace_rhs = max(abs(float(r)) for _, r in rows)
    init_scale = max(trace_rhs / sum(dims), 1e-2)
    solution = solve(
        problem,
        gap_tol=gap_tol,
        feas_tol=1e-9,
        max_iterations=max_iterations,
        init_scale=init_scale,
    )
    if solution.status != OPTIMAL:
        raise SdpError(f"feasibility solve did not converge: status {solution.status}")

    t_hat = float(solution.free_value)
    blocks = tuple(
        derealify(yb) + t_hat * np.eye(d) for yb, d in zip(solution.blocks, dims)
    )
    dual = solution.dual

    def validated(blks: tuple[np.ndarray, ...]) -> bool:
        if _max_residual(rows, blks) > tol.witness_residual:
            return False
        return all(
            float(np.linalg.eigvalsh(x)[0]) >= -tol.witness_psd for x in blks
        )

    if t_hat >= band:
        if not validated(blocks):
            raise SdpError("feasible verdict failed independent witness validation")
        return FeasibilityReport(
            status=FEASIBLE, slack=t_hat, witness=blocks[0],
            dual_certificate=dual, blocks=blocks, solution=solution,
        )
    if t_hat <= -band:
        return FeasibilityReport(
            status=INFEASIBLE, slack=t_hat, witness=None,
            dual_certificate=dual, blocks=(), solution=solution,
        )
    clipped = tuple(_clip_psd(x) for x in blocks)
    if validated(clipped):
        return FeasibilityReport(
            status=FEASIBLE, slack=t_hat, witness=clipped[0],
            dual_certificate=dual, blocks=clipped, solution=solution,
        )
    return FeasibilityReport(
        status=MARGINAL, slack=t_hat, witness=None,
        dual_certificate=dual, blocks=(), solution=solution,
    )


def feasibility(
    dim: int,
    constraints: Sequence[tuple[np.ndarray, float]],
    *,
    tol: Tolerances = DEFAULT,
    gap_tol: float | None = None,
    band: float | None = None,
) -> FeasibilityReport:
    """Feasibility of one Hermitian PSD variable under <H_i, X> = b_i rows."""
    rows = [((np.asarray(h, dtype=complex),), float(r)) for h, r in constraints]
    for (h,), _ in rows:
        if h.shape != (dim, dim):
            raise ValueError(f"constraint shape {h.shape} != ({dim}, {dim})")
    return hermitian_feasibility((dim,), rows, tol=tol, gap_tol=gap_tol, band=band)

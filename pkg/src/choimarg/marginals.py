"""Channel compatibility, steering and Bell locality as prescribed-marginal SDPs.

All three questions ask for a multipartite PSD operator with given partial
traces:

* compatibility of (Phi_1, Phi_2): a joint Choi matrix C on
  (out_1, out_2, input) with Tr_2 C = C(Phi_1) and Tr_1 C = C(Phi_2);
* steering of rho on C (x) A by (Phi_1, Phi_2): a tripartite state sigma with
  Tr_3 sigma = (id (x) Phi_1)(rho) and Tr_2 sigma = (id (x) Phi_2)(rho);
* Bell locality of rho under four channels: a four-partite state reproducing
  the four pairwise output marginals.

Factor numbering is 1-based, matching :mod:`choimarg.linalg`. Each target
equation is expanded in the Hermitian product basis of its kept factors; the
overlapping trace rows this produces are pruned inside the solver.

Infeasibility of the steering problem means the state IS steerable, and
infeasibility of the locality problem means the state IS Bell nonlocal.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .channels import Channel, apply, identity_channel, tensor
from .config import DEFAULT, Tolerances
from .linalg import (
    check_density,
    check_effect,
    check_hermitian,
    embed,
    frozen,
    hermitian_basis,
    hermitian_product_basis,
    kron,
    partial_trace,
)
from .sdp import (
    FEASIBLE,
    INFEASIBLE,
    FeasibilityReport,
    hermitian_feasibility,
)

__all__ = [
    "MarginalSpec",
    "CompatReport",
    "COMPATIBLE",
    "INCOMPATIBLE",
    "MARGINAL",
    "marginal_feasibility",
    "channels_compatible",
    "dual_witness",
    "state_steerable",
    "bell_local",
    "effects_compatible",
]

COMPATIBLE = "compatible"
INCOMPATIBLE = "incompatible"
MARGINAL = "marginal"


@dataclass(frozen=True)
class MarginalSpec:
    """Prescribed partial traces of one multipartite Hermitian variable.

    targets: pairs of (kept 1-based factor indices, target matrix). All
    targets must share the same trace, the required normalization.
    """

    dims: tuple[int, ...]
    targets: tuple[tuple[tuple[int, ...], np.ndarray], ...]
    normalization: float | None = None

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        n = len(dims)
        if not self.targets:
            raise ValueError("at least one marginal target is required")
        cleaned = []
        traces = []
        for kept, target in self.targets:
            kept = tuple(sorted(int(k) for k in kept))
            if not kept or not set(kept) <= set(range(1, n + 1)) or len(set(kept)) != len(kept):
                raise ValueError(f"kept factors {kept} not a valid subset of 1..{n}")
            d_kept = int(np.prod([dims[k - 1] for k in kept]))
            target = check_hermitian(np.asarray(target, dtype=complex), DEFAULT.construction * 10)
            if target.shape != (d_kept, d_kept):
                raise ValueError(
                    f"target shape {target.shape} does not match kept factors {kept} (dim {d_kept})"
                )
            cleaned.append((kept, frozen(target)))
            traces.append(float(np.trace(target).real))
        norm = self.normalization if self.normalization is not None else traces[0]
        for kept, tr in zip([c[0] for c in cleaned], traces):
            if abs(tr - norm) > DEFAULT.psd:
                raise ValueError(
                    f"inconsistent target traces: factor set {kept} has trace {tr!r}, "
                    f"expected {norm!r}"
                )
        object.__setattr__(self, "targets", tuple(cleaned))
        object.__setattr__(self, "normalization", float(norm))

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))


def _target_rows(spec: MarginalSpec) -> tuple[list[tuple[tuple[np.ndarray], float]], list[slice]]:
    """Expand every target in the Hermitian product basis of its kept factors.

    Returns the constraint rows and, per target, the slice of row indices it
    occupies (used to assemble dual witnesses).
    """
    rows: list[tuple[tuple[np.ndarray], float]] = []
    groups: list[slice] = []
    for kept, target in spec.targets:
        kept_dims = [spec.dims[k - 1] for k in kept]
        start = len(rows)
        for b in hermitian_product_basis(kept_dims):
            lifted = embed(b, spec.dims, kept)
            rhs = float(np.real(np.sum(np.conj(b) * target)))
            rows.append(((lifted,), rhs))
        groups.append(slice(start, len(rows)))
    return rows, groups


def marginal_feasibility(
    spec: MarginalSpec,
    *,
    tol: Tolerances = DEFAULT,
    gap_tol: float | None = None,
    band: float | None = None,
) -> FeasibilityReport:
    """Decide existence of a PSD operator with the prescribed marginals."""
    rows, _ = _target_rows(spec)
    report = hermitian_feasibility((spec.total_dim,), rows, tol=tol, gap_tol=gap_tol, band=band)
    if report.status == FEASIBLE and spec.normalization > 0:
        # rescale to the exact required trace (preserves positivity, moves the
        # marginal residuals by a relative ~1e-9)
        witness = report.witness * (spec.normalization / float(np.trace(report.witness).real))
        report = replace(report, witness=witness, blocks=(witness,))
    return report


# ---------------------------------------------------------------------------
# channel compatibility
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompatReport:
    """Verdict of a channel-pair compatibility test.

    joint_choi is the witness joint channel on (out_1 (x) out_2) for
    compatible pairs. dual_witness is a pair (A, B) normalized to the
    Frobenius ball with lift(A) + 1 (x) B >= 0; its objective value
    Tr(C_1 A) + Tr(C_2 B) is dual_value, negative for incompatible pairs.
    """

    verdict: str
    slack: float
    joint_choi: Channel | None
    dual_witness: tuple[np.ndarray, np.ndarray] | None
    dual_value: float | None
    report: FeasibilityReport | None = field(repr=False, default=None)


def _compat_spec(c1: Channel, c2: Channel) -> MarginalSpec:
    if c1.in_dim != c2.in_dim:
        raise ValueError(f"channels have different input dimensions {c1.in_dim} != {c2.in_dim}")
    d1, d2, din = c1.out_dim, c2.out_dim, c1.in_dim
    return MarginalSpec(
        dims=(d1, d2, din),
        targets=(((1, 3), c1.choi), ((2, 3), c2.choi)),
        normalization=float(din),
    )


def _assemble_dual_pair(
    spec: MarginalSpec, report: FeasibilityReport
) -> tuple[np.ndarray, np.ndarray] | None:
    """Recombine the dual vector into one Hermitian matrix per target group."""
    if report.dual_certificate is None:
        return None
    _rows, groups = _target_rows(spec)
    y = report.dual_certificate
    mats = []
    for (kept, _target), grp in zip(spec.targets, groups):
        kept_dims = [spec.dims[k - 1] for k in kept]
        basis = hermitian_product_basis(kept_dims)
        m = sum(c * b for c, b in zip(y[grp], basis))
        mats.append(m)
    return tuple(mats)


def channels_compatible(
    c1: Channel,
    c2: Channel,
    *,
    tol: Tolerances = DEFAULT,
    gap_tol: float | None = None,
    band: float | None = None,
) -> CompatReport:
    """Decide whether two channels admit a joint channel with both marginals."""
    spec = _compat_spec(c1, c2)
    report = marginal_feasibility(spec, tol=tol, gap_tol=gap_tol, band=band)
    pair = _assemble_dual_pair(spec, report)
    dual_value = None
    witness_pair = None
    if pair is not None:
        a, b = pair
        scale = float(np.sqrt(np.sum(np.abs(a) ** 2) + np.sum(np.abs(b) ** 2)))
        if scale > 0:
            a, b = a / scale, b / scale
            dual_value = float(
                np.real(np.sum(np.conj(a) * c1.choi)) + np.real(np.sum(np.conj(b) * c2.choi))
            )
            witness_pair = (a, b)
    if report.status == FEASIBLE:
        # project the witness onto exact trace preservation so it revalidates
        # as a Channel at the default tolerances
        choi = report.witness
        dims = (c1.out_dim, c2.out_dim, c1.in_dim)
        defect = partial_trace(choi, dims, {1, 2}) - np.eye(c1.in_dim)
        choi = choi - kron(np.eye(c1.out_dim * c2.out_dim), defect) / (c1.out_dim * c2.out_dim)
        joint = Channel(in_dim=c1.in_dim, out_dims=(c1.out_dim, c2.out_dim), choi=choi)
        return CompatReport(COMPATIBLE, report.slack, joint, witness_pair, dual_value, report)
    if report.status == INFEASIBLE:
        return CompatReport(INCOMPATIBLE, report.slack, None, witness_pair, dual_value, report)
    return CompatReport(MARGINAL, report.slack, None, witness_pair, dual_value, report)


def dual_witness(
    c1: Channel,
    c2: Channel,
    *,
    tol: Tolerances = DEFAULT,
    gap_tol: float | None = None,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Incompatibility witness (A, B) on the Frobenius ball.

    Minimizes Tr(C_1 A) + Tr(C_2 B) over the dual cone lift(A) + 1 (x) B >= 0
    (up to normalization); a value below -eps certifies incompatibility, a
    nonnegative value is consistent with compatibility.
    """
    report = channels_compatible(c1, c2, tol=tol, gap_tol=gap_tol)
    if report.dual_witness is None:
        raise RuntimeError("dual certificate unavailable")
    a, b = report.dual_witness
    return a, b, float(report.dual_value)


def dual_witness_cone_matrix(c1: Channel, c2: Channel, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """The lifted operator lift(A) + 1 (x) B whose positivity defines the dual cone."""
    dims = (c1.out_dim, c2.out_dim, c1.in_dim)
    return embed(a, dims, (1, 3)) + embed(b, dims, (2, 3))


# ---------------------------------------------------------------------------
# steering and Bell locality
# ---------------------------------------------------------------------------


def state_steerable(
    rho: np.ndarray,
    c1: Channel,
    c2: Channel,
    *,
    tol: Tolerances = DEFAULT,
    gap_tol: float | None = None,
    band: float | None = None,
) -> FeasibilityReport:
    """Steering test for a bipartite state held between a reference and channels.

    The second factor of rho is sent through either channel; the report is
    Infeasible exactly when the state is steerable by the pair.
    """
    rho = check_density(rho)
    if c1.in_dim != c2.in_dim:
        raise ValueError("channels must share their input dimension")
    d_a = c1.in_dim
    d_c, rem = divmod(rho.shape[0], d_a)
    if rem or d_c < 1:
        raise ValueError(
            f"state dimension {rho.shape[0]} is not a multiple of the channel input {d_a}"
        )
    ident = identity_channel(d_c)
    t1 = apply(tensor(ident, c1), rho)
    t2 = apply(tensor(ident, c2), rho)
    spec = MarginalSpec(
        dims=(d_c, c1.out_dim, c2.out_dim),
        targets=(((1, 2), t1), ((1, 3), t2)),
        normalization=1.0,
    )
    return marginal_feasibility(spec, tol=tol, gap_tol=gap_tol, band=band)


def bell_local(
    rho: np.ndarray,
    c11: Channel,
    c21: Channel,
    c12: Channel,
    c22: Channel,
    *,
    tol: Tolerances = DEFAULT,
    gap_tol: float | None = None,
    band: float | None = None,
) -> FeasibilityReport:
    """Bell locality test for a bipartite state under two channel choices per wing.

    c11, c21 act on the first factor of rho, c12, c22 on the second; the four
    factors of the sought state are their outputs in this order. The report is
    Infeasible exactly when the biconditional state is Bell nonlocal.
    """
    rho = check_density(rho)
    if c11.in_dim != c21.in_dim or c12.in_dim != c22.in_dim:
        raise ValueError("channels on one wing must share their input dimension")
    if c11.in_dim * c12.in_dim != rho.shape[0]:
        raise ValueError(
            f"state dimension {rho.shape[0]} does not match channel inputs "
            f"{c11.in_dim} * {c12.in_dim}"
        )
    targets = (
        ((1, 3), apply(tensor(c11, c12), rho)),
        ((1, 4), apply(tensor(c11, c22), rho)),
        ((2, 3), apply(tensor(c21, c12), rho)),
        ((2, 4), apply(tensor(c21, c22), rho)),
    )
    spec = MarginalSpec(
        dims=(c11.out_dim, c21.out_dim, c12.out_dim, c22.out_dim),
        targets=targets,
        normalization=1.0,
    )
    return marginal_feasibility(spec, tol=tol, gap_tol=gap_tol, band=band)


# ---------------------------------------------------------------------------
# two-outcome effect compatibility
# ---------------------------------------------------------------------------


def effects_compatible(
    f: np.ndarray,
    g: np.ndarray,
    *,
    tol: Tolerances = DEFAULT,
    gap_tol: float | None = None,
    band: float | None = None,
) -> FeasibilityReport:
    """Joint measurability of two effects via the four-block decomposition.

    Decides existence of h_11, h_12, h_21, h_22 >= 0 with h_11 + h_12 = f,
    h_21 + h_22 = 1 - f and h_11 + h_21 = g; equivalently of G = h_11 with
    G >= 0, f - G >= 0, g - G >= 0 and 1 - f - g + G >= 0. The report witness
    is G.
    """
    f = check_effect(np.asarray(f, dtype=complex), tol)
    g = check_effect(np.asarray(g, dtype=complex), tol)
    if f.shape != g.shape:
        raise ValueError(f"effects have different dimensions {f.shape} != {g.shape}")
    d = f.shape[0]
    eye = np.eye(d)
    zero = np.zeros((d, d))
    rows = []
    for b in hermitian_basis(d):
        rows.append(((b, b, zero, zero), float(np.real(np.sum(np.conj(b) * f)))))
    for b in hermitian_basis(d):
        rows.append(((zero, zero, b, b), float(np.real(np.sum(np.conj(b) * (eye - f))))))
    for b in hermitian_basis(d):
        rows.append(((b, zero, b, zero), float(np.real(np.sum(np.conj(b) * g)))))
    return hermitian_feasibility((d, d, d, d), rows, tol=tol, gap_tol=gap_tol, band=band)

"""Channel CHSH correlators, the Tsirelson bound, and the theta scan.

The correlation of two channels with qubit outputs on a shared state is
Tr((Phi_1 (x) Phi_2)(rho) A) with the default observable

    A = |00><00| - |01><01| - |10><10| + |11><11|,

optionally generalized to an effect pair (M, N) via
A = (2M - 1) (x) (2N - 1). The CHSH combination

    X = E(c11, c12) + E(c11, c22) + E(c21, c12) - E(c21, c22)

obeys |X| <= 2 for Bell-local biconditional states and |X| <= 2*sqrt(2)
always.

The one-parameter unitary family scanned here peaks at theta = 3 + 2*sqrt(2),
where X reaches the Tsirelson bound; the closed form
X(theta) = (4*sqrt(theta) + 2*theta - 2)/(1 + theta) is derived from the
maximally-entangled correlation formula and serves as an independent oracle
for the channel-application path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import Channel, apply, max_entangled, tensor, unitary_channel
from .linalg import check_effect, check_hermitian, check_unitary, frozen

__all__ = [
    "CorrelationReport",
    "default_observable",
    "observable_from_effects",
    "correlation",
    "chsh_value",
    "unitary_me_correlation",
    "theta_family",
    "closed_form_chsh",
    "chsh_scan",
    "scan_to_csv",
]

CLASSICAL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * np.sqrt(2.0)
_FLAG_TOL = 1e-9


@dataclass(frozen=True)
class CorrelationReport:
    """The four correlators E[i, j] of channel pair choices and their CHSH value."""

    correlations: np.ndarray
    value: float
    exceeds_classical: bool
    within_tsirelson: bool

    def __post_init__(self) -> None:
        object.__setattr__(self, "correlations", frozen(self.correlations).real)


def default_observable() -> np.ndarray:
    """Parity observable on two qubits, diag(+1, -1, -1, +1) in the computational basis."""
    return np.diag([1.0, -1.0, -1.0, 1.0]).astype(complex)


def observable_from_effects(m: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Correlation observable (2M - 1) (x) (2N - 1) for an effect pair."""
    m = check_effect(np.asarray(m, dtype=complex))
    n = check_effect(np.asarray(n, dtype=complex))
    return np.kron(2 * m - np.eye(m.shape[0]), 2 * n - np.eye(n.shape[0]))


def _check_observable(a: np.ndarray, dim: int) -> np.ndarray:
    a = check_hermitian(a, 1e-9)
    if a.shape != (dim, dim):
        raise ValueError(f"observable dimension {a.shape[0]} != joint output dimension {dim}")
    w = np.linalg.eigvalsh(a)
    if w[0] < -1 - 1e-9 or w[-1] > 1 + 1e-9:
        raise ValueError("observable must satisfy -1 <= A <= 1")
    return a


def correlation(
    ci: Channel, cj: Channel, rho: np.ndarray, obs: np.ndarray | None = None
) -> float:
    """E(ci, cj) = Tr((ci (x) cj)(rho) A)."""
    joint = tensor(ci, cj)
    a = default_observable() if obs is None else obs
    a = _check_observable(a, joint.out_dim)
    out = apply(joint, rho)
    return float(np.real(np.trace(out @ a)))


def chsh_value(
    c11: Channel,
    c21: Channel,
    c12: Channel,
    c22: Channel,
    rho: np.ndarray,
    obs: np.ndarray | None = None,
) -> CorrelationReport:
    """CHSH report for channel choices (c11, c21) on wing 1 and (c12, c22) on wing 2."""
    e = np.array(
        [
            [correlation(c11, c12, rho, obs), correlation(c11, c22, rho, obs)],
            [correlation(c21, c12, rho, obs), correlation(c21, c22, rho, obs)],
        ]
    )
    x = float(e[0, 0] + e[0, 1] + e[1, 0] - e[1, 1])
    return CorrelationReport(
        correlations=e,
        value=x,
        exceeds_classical=bool(x > CLASSICAL_BOUND + _FLAG_TOL or x < -CLASSICAL_BOUND - _FLAG_TOL),
        within_tsirelson=bool(abs(x) <= TSIRELSON_BOUND + _FLAG_TOL),
    )


def unitary_me_correlation(u: np.ndarray, v: np.ndarray) -> float:
    """Closed-form correlation of two unitary channels on the maximally entangled state.

    With W = V U^T this is (|W_00|^2 + |W_11|^2 - |W_01|^2 - |W_10|^2) / 2.
    """
    u = check_unitary(np.asarray(u, dtype=complex))
    v = check_unitary(np.asarray(v, dtype=complex))
    if u.shape != (2, 2) or v.shape != (2, 2):
        raise ValueError("closed form requires 2x2 unitaries")
    w = v @ u.T
    p = np.abs(w) ** 2
    return float((p[0, 0] + p[1, 1] - p[0, 1] - p[1, 0]) / 2)


def theta_family(theta: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """The scanned unitary 4-tuple (U1, U2, V1, V2).

    U1 is the Hadamard-like rotation, U2 the identity, and V1, V2 interpolate
    with the parameter theta >= 0.
    """
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    rt = np.sqrt(theta)
    norm = 1.0 / np.sqrt(1.0 + theta)
    u1 = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    u2 = np.eye(2)
    v1 = norm * np.array([[rt, 1.0], [1.0, -rt]])
    v2 = norm * np.array([[1.0, rt], [rt, -1.0]])
    return u1, u2, v1, v2


def closed_form_chsh(theta: float) -> float:
    """X(theta) = (4*sqrt(theta) + 2*theta - 2)/(1 + theta), the scan oracle."""
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    return (4.0 * np.sqrt(theta) + 2.0 * theta - 2.0) / (1.0 + theta)


def chsh_scan(theta_min: float, theta_max: float, steps: int) -> list[tuple[float, float]]:
    """Evaluate the CHSH value of the theta family on a uniform grid.

    Each X is computed through the full channel-application path (tensor the
    unitary channels, apply to the maximally entangled state, trace against
    the observable), not from the closed form.
    """
    if not (0 <= theta_min < theta_max):
        raise ValueError(f"invalid scan range [{theta_min}, {theta_max}]")
    if steps < 2:
        raise ValueError("need at least two grid points")
    rho = max_entangled(2)
    rows = []
    for theta in np.linspace(theta_min, theta_max, steps):
        u1, u2, v1, v2 = theta_family(float(theta))
        report = chsh_value(
            unitary_channel(u1),
            unitary_channel(u2),
            unitary_channel(v1),
            unitary_channel(v2),
            rho,
        )
        rows.append((float(theta), report.value))
    return rows


def scan_to_csv(rows: list[tuple[float, float]]) -> str:
    """CSV with header ``theta,X``, 12 significant digits, decimal points."""
    lines = ["theta,X"]
    for theta, x in rows:
        lines.append(f"{theta:.12g},{x:.12g}")
    return "\n".join(lines) + "\n"

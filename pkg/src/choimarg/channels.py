"""Quantum channels as Choi matrices, with the canonical states they act on.

Choi convention
---------------

The Choi matrix of a channel with input dimension ``d_in`` and output
dimension ``d_out`` acts on (output) (x) (input copy), i.e.

    C = sum_{ij} Phi(|i><j|) (x) |i><j| ,

so that C >= 0 and the partial trace over the *output* factor equals the
identity on the input copy (trace preservation). Channels with composite
outputs keep the factorization in ``out_dims``; the Choi factors are then
``(*out_dims, in_dim)``. The transpose used when applying a channel is taken
in the same computational basis the Choi matrix is built in.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import DEFAULT, Tolerances
from .linalg import (
    check_density,
    check_effect,
    check_hermitian,
    check_shape,
    check_unitary,
    frozen,
    kron,
    min_eigenvalue,
    partial_trace,
    permute_factors,
)

__all__ = [
    "Channel",
    "ChannelPair",
    "choi_from_kraus",
    "identity_channel",
    "unitary_channel",
    "depolarizing_channel",
    "measure_prepare",
    "apply",
    "tensor",
    "adjoint_effect",
    "max_entangled",
    "w_state",
    "channel_to_dict",
    "channel_from_dict",
    "state_to_dict",
    "state_from_dict",
]


@dataclass(frozen=True)
class Channel:
    """A completely positive trace-preserving map stored as its Choi matrix.

    Immutable after validation; safe to share between threads.
    """

    in_dim: int
    out_dims: tuple[int, ...]
    choi: np.ndarray
    tol: Tolerances = field(default=DEFAULT, repr=False, compare=False)

    def __post_init__(self) -> None:
        out_dims = tuple(int(d) for d in self.out_dims)
        object.__setattr__(self, "out_dims", out_dims)
        d = self.out_dim * self.in_dim
        choi = check_hermitian(self.choi, self.tol.construction)
        if choi.shape != (d, d):
            raise ValueError(f"Choi matrix shape {choi.shape} does not match dims {d}")
        lam = min_eigenvalue(choi)
        if lam < -self.tol.psd * d:
            raise ValueError(f"Choi matrix is not CP: min eigenvalue {lam:.3e}")
        marg = partial_trace(choi, out_dims + (self.in_dim,), range(1, len(out_dims) + 1))
        dev = np.max(np.abs(marg - np.eye(self.in_dim)))
        if dev > self.tol.psd:
            raise ValueError(f"channel is not trace preserving: output marginal deviates by {dev:.3e}")
        object.__setattr__(self, "choi", frozen(choi))

    @property
    def out_dim(self) -> int:
        return int(np.prod(self.out_dims))


@dataclass(frozen=True)
class ChannelPair:
    """A conditional channel: two channels on the same input, chosen later.

    Compatibility asks whether the pair arises as the marginals of one joint
    channel; steering and Bell tests apply the pair to shares of a state.
    """

    first: Channel
    second: Channel

    def __post_init__(self) -> None:
        if self.first.in_dim != self.second.in_dim:
            raise ValueError(
                f"paired channels have different input dimensions "
                f"{self.first.in_dim} != {self.second.in_dim}"
            )

    @property
    def in_dim(self) -> int:
        return self.first.in_dim


def choi_from_kraus(
    kraus: Sequence[np.ndarray],
    in_dim: int | None = None,
    out_dim: int | None = None,
) -> Channel:
    """Channel from Kraus operators K_k, validating sum_k K_k^dagger K_k = 1."""
    ops = [np.asarray(k, dtype=complex) for k in kraus]
    if not ops:
        raise ValueError("at least one Kraus operator is required")
    r, c = ops[0].shape
    out_dim = r if out_dim is None else int(out_dim)
    in_dim = c if in_dim is None else int(in_dim)
    for k in ops:
        if k.shape != (out_dim, in_dim):
            raise ValueError(f"Kraus operator shape {k.shape} != ({out_dim}, {in_dim})")
    comp = sum(k.conj().T @ k for k in ops)
    dev = np.max(np.abs(comp - np.eye(in_dim)))
    if dev > DEFAULT.psd:
        raise ValueError(f"Kraus set is not trace preserving: deviation {dev:.3e}")
    d = out_dim * in_dim
    choi = np.zeros((d, d), dtype=complex)
    for k in ops:
        v = k.reshape(-1)
        choi += np.outer(v, v.conj())
    return Channel(in_dim=in_dim, out_dims=(out_dim,), choi=choi)


def identity_channel(d: int) -> Channel:
    return choi_from_kraus([np.eye(d)])


def unitary_channel(u: np.ndarray) -> Channel:
    """The channel rho -> U rho U^dagger."""
    return choi_from_kraus([check_unitary(u)])


def depolarizing_channel(d: int, p: float = 1.0) -> Channel:
    """rho -> (1 - p) rho + p Tr(rho) 1/d; fully depolarizing at p = 1."""
    ident = identity_channel(d).choi
    mixed = np.eye(d * d, dtype=complex) / d
    return Channel(in_dim=d, out_dims=(d,), choi=(1.0 - p) * ident + p * mixed)


def measure_prepare(
    effects: np.ndarray | Sequence[np.ndarray],
    preparations: Sequence[np.ndarray] | None = None,
) -> Channel:
    """Measure-and-prepare channel sigma -> sum_k Tr(sigma M_k) |phi_k><phi_k|.

    A single effect M is shorthand for the two-outcome instrument (M, 1 - M)
    preparing the computational states |0>, |1>. In general the effects must
    sum to the identity and the preparations must be orthonormal.
    """
    if isinstance(effects, np.ndarray) or np.asarray(effects).ndim == 2:
        m = check_effect(np.asarray(effects, dtype=complex))
        effect_list = [m, np.eye(m.shape[0]) - m]
    else:
        effect_list = [check_effect(np.asarray(m, dtype=complex)) for m in effects]
    d_in = effect_list[0].shape[0]
    total = sum(effect_list)
    if np.max(np.abs(total - np.eye(d_in))) > DEFAULT.psd:
        raise ValueError("effects do not sum to the identity")
    if preparations is None:
        d_out = len(effect_list)
        preps = [np.eye(d_out, dtype=complex)[:, k] for k in range(d_out)]
    else:
        preps = [np.asarray(v, dtype=complex).reshape(-1) for v in preparations]
        if len(preps) != len(effect_list):
            raise ValueError("need one preparation state per effect")
        d_out = preps[0].size
        gram = np.array([[np.vdot(a, b) for b in preps] for a in preps])
        if np.max(np.abs(gram - np.eye(len(preps)))) > DEFAULT.psd:
            raise ValueError("preparation states are not orthonormal")
    choi = np.zeros((d_out * d_in, d_out * d_in), dtype=complex)
    for m, v in zip(effect_list, preps):
        choi += kron(np.outer(v, v.conj()), m.T)
    return Channel(in_dim=d_in, out_dims=(d_out,), choi=choi)


def apply(c: Channel, rho: np.ndarray) -> np.ndarray:
    """Apply a channel to a state: Phi(rho) = Tr_in( C (1_out (x) rho^T) )."""
    rho = check_density(rho)
    if rho.shape[0] != c.in_dim:
        raise ValueError(f"state dimension {rho.shape[0]} != channel input {c.in_dim}")
    d_out, d_in = c.out_dim, c.in_dim
    c4 = c.choi.reshape(d_out, d_in, d_out, d_in)
    out = np.einsum("aibj,ij->ab", c4, rho)
    return (out + out.conj().T) / 2


def tensor(c1: Channel, c2: Channel) -> Channel:
    """Tensor product channel, Choi factors reordered to (outputs..., input)."""
    k = kron(c1.choi, c2.choi)
    n1, n2 = len(c1.out_dims), len(c2.out_dims)
    dims = c1.out_dims + (c1.in_dim,) + c2.out_dims + (c2.in_dim,)
    order = list(range(n1)) + [n1 + 1 + j for j in range(n2)] + [n1, n1 + 1 + n2]
    choi = permute_factors(k, dims, order)
    return Channel(in_dim=c1.in_dim * c2.in_dim, out_dims=c1.out_dims + c2.out_dims, choi=choi)


def adjoint_effect(c: Channel, e: np.ndarray) -> np.ndarray:
    """Heisenberg adjoint on effects: Tr(Phi(sigma) E) = Tr(sigma Phi^*(E))."""
    e = check_effect(np.asarray(e, dtype=complex))
    if e.shape[0] != c.out_dim:
        raise ValueError(f"effect dimension {e.shape[0]} != channel output {c.out_dim}")
    d_out, d_in = c.out_dim, c.in_dim
    c4 = c.choi.reshape(d_out, d_in, d_out, d_in)
    m = np.einsum("aibj,ba->ij", c4, e)
    m = m.T
    return (m + m.conj().T) / 2


def max_entangled(d: int) -> np.ndarray:
    """Projector onto |psi+> = d^{-1/2} sum_i |ii> on dimension d^2."""
    if d < 2:
        raise ValueError("local dimension must be at least 2")
    v = np.zeros(d * d, dtype=complex)
    for i in range(d):
        v[i * d + i] = 1.0
    v /= np.sqrt(d)
    return np.outer(v, v.conj())


def w_state() -> np.ndarray:
    """Projector onto |W> = (|001> + |010> + |100>)/sqrt(3) on dimension 8."""
    v = np.zeros(8, dtype=complex)
    v[[1, 2, 4]] = 1.0 / np.sqrt(3.0)
    return np.outer(v, v.conj())


# ---------------------------------------------------------------------------
# JSON wire format (consumed by the CLI)
# ---------------------------------------------------------------------------
#
# Channels: {"kind": "unitary"|"kraus"|"choi"|"measure_prepare"|"identity"|
#            "depolarizing", "in_dim": n, "out_dim": m, "data": ...}
# States:   {"kind": "density", "dims": [d1, ...], "data": matrix}
# Complex entries are two-element arrays [re, im]. Composite channel outputs
# carry an optional "out_dims" list.


def _matrix_to_json(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def _matrix_from_json(data: object) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError("matrix entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def channel_to_dict(c: Channel) -> dict:
    out: dict = {
        "kind": "choi",
        "in_dim": c.in_dim,
        "out_dim": c.out_dim,
        "data": _matrix_to_json(c.choi),
    }
    if len(c.out_dims) > 1:
        out["out_dims"] = list(c.out_dims)
    return out


def channel_from_dict(d: dict) -> Channel:
    try:
        kind = d["kind"]
    except (TypeError, KeyError):
        raise ValueError("channel JSON must be an object with a 'kind' key") from None
    in_dim = int(d.get("in_dim", 2))
    out_dim = int(d.get("out_dim", in_dim))
    data = d.get("data")
    if kind == "identity":
        if in_dim != out_dim:
            raise ValueError("identity channel needs in_dim == out_dim")
        return identity_channel(in_dim)
    if kind == "depolarizing":
        p = 1.0 if data is None else float(data)
        if in_dim != out_dim:
            raise ValueError("depolarizing channel needs in_dim == out_dim")
        return depolarizing_channel(in_dim, p)
    if kind == "unitary":
        u = _matrix_from_json(data)
        if u.shape != (out_dim, in_dim):
            raise ValueError(f"unitary shape {u.shape} does not match dims")
        return unitary_channel(u)
    if kind == "kraus":
        ops = [_matrix_from_json(k) for k in data]
        return choi_from_kraus(ops, in_dim=in_dim, out_dim=out_dim)
    if kind == "choi":
        choi = _matrix_from_json(data)
        out_dims = tuple(d.get("out_dims", (out_dim,)))
        if int(np.prod(out_dims)) != out_dim:
            raise ValueError("out_dims do not multiply to out_dim")
        return Channel(in_dim=in_dim, out_dims=out_dims, choi=choi)
    if kind == "measure_prepare":
        if isinstance(data, dict):
            effects = [_matrix_from_json(m) for m in data["effects"]]
            preps = data.get("preparations")
            if preps is not None:
                preps = [np.asarray(v, dtype=float)[:, 0] + 1j * np.asarray(v, dtype=float)[:, 1] for v in preps]
            return measure_prepare(effects, preps)
        return measure_prepare(_matrix_from_json(data))
    raise ValueError(f"unknown channel kind {kind!r}")


def state_to_dict(rho: np.ndarray, dims: Sequence[int] | None = None) -> dict:
    rho = np.asarray(rho, dtype=complex)
    if dims is None:
        dims = (rho.shape[0],)
    return {"kind": "density", "dims": [int(x) for x in dims], "data": _matrix_to_json(rho)}


def state_from_dict(d: dict) -> tuple[np.ndarray, tuple[int, ...]]:
    try:
        kind = d["kind"]
    except (TypeError, KeyError):
        raise ValueError("state JSON must be an object with a 'kind' key") from None
    if kind != "density":
        raise ValueError(f"unknown state kind {kind!r}")
    rho = check_density(_matrix_from_json(d["data"]))
    dims = tuple(int(x) for x in d.get("dims", (rho.shape[0],)))
    check_shape(dims, rho.shape[0])
    return rho, dims

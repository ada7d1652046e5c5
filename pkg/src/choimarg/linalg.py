"""Dense complex linear algebra for Hermitian operators on tensor-product spaces.

Conventions used by the whole package
-------------------------------------

* Operators are dense complex ``numpy`` arrays in the computational basis,
  row-major, with tensor factors ordered left to right.
* Tensor factors are numbered ``1..n`` left to right. Partial traces take
  1-based factor indices, matching the subscripts Tr_1, Tr_2, Tr_24 of the
  usual marginal equations. This is the single place the convention is set;
  every higher module follows it.
* ``dims`` always means the ordered tuple of local dimensions whose product
  is the matrix dimension.

Dimensions beyond ~64 and sparse storage are out of scope.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT, Tolerances

__all__ = [
    "kron",
    "partial_trace",
    "permute_factors",
    "embed",
    "eigh",
    "is_psd",
    "min_eigenvalue",
    "hermitian_basis",
    "hermitian_product_basis",
    "realify",
    "derealify",
    "check_finite",
    "check_hermitian",
    "check_shape",
    "check_density",
    "check_effect",
    "check_unitary",
    "frozen",
]


def frozen(a: np.ndarray) -> np.ndarray:
    """Return a read-only copy; all public containers hold immutable arrays."""
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


# ---------------------------------------------------------------------------
# validation helpers
# ---------------------------------------------------------------------------


def check_finite(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix has non-finite entries")
    return a


def check_hermitian(a: np.ndarray, tol: float = DEFAULT.construction) -> np.ndarray:
    """Validate ||A - A^dagger||_max <= tol and return the Hermitian part."""
    a = check_finite(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian: max deviation {dev:.3e} > {tol:.1e}")
    return (a + a.conj().T) / 2


def check_shape(dims: Sequence[int], dim: int) -> tuple[int, ...]:
    """Validate a subsystem factorization against a matrix dimension."""
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"factor dimensions must be positive, got {dims}")
    if int(np.prod(dims)) != dim:
        raise ValueError(f"factor dimensions {dims} do not multiply to {dim}")
    return dims


def check_density(rho: np.ndarray, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Validate a density matrix: Hermitian, min eigenvalue >= -tol.psd, trace 1."""
    rho = check_hermitian(rho, tol.construction)
    w = np.linalg.eigvalsh(rho)
    if w[0] < -tol.psd:
        raise ValueError(f"state is not positive semidefinite: min eigenvalue {w[0]:.3e}")
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > tol.psd:
        raise ValueError(f"state trace {tr!r} deviates from 1 beyond {tol.psd:.1e}")
    return rho


def check_effect(m: np.ndarray, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Validate an effect: Hermitian with eigenvalues in [-tol.psd, 1 + tol.psd]."""
    m = check_hermitian(m, tol.construction)
    w = np.linalg.eigvalsh(m)
    if w[0] < -tol.psd or w[-1] > 1.0 + tol.psd:
        raise ValueError(f"effect eigenvalues {w} are not within [0, 1]")
    return m


def check_unitary(u: np.ndarray, tol: float = DEFAULT.psd) -> np.ndarray:
    u = check_finite(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    dev = np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0])))
    if dev > tol:
        raise ValueError(f"matrix is not unitary: ||UU^dagger - I||_max = {dev:.3e}")
    return u


# ---------------------------------------------------------------------------
# tensor-product operations
# ---------------------------------------------------------------------------


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the standard (row-major) index convention."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(a: np.ndarray, dims: Sequence[int], traced: Iterable[int]) -> np.ndarray:
    """Trace out the 1-based factors in ``traced`` from an operator on ``dims``.

    Tracing all factors returns the 1x1 matrix [[Tr a]]. The result keeps the
    remaining factors in their original order.
    """
    a = np.asarray(a, dtype=complex)
    dims = check_shape(dims, a.shape[0])
    n = len(dims)
    traced_set = {int(k) for k in traced}
    if not traced_set <= set(range(1, n + 1)):
        raise ValueError(f"traced factors {sorted(traced_set)} not within 1..{n}")
    keep = [k for k in range(n) if (k + 1) not in traced_set]
    t = a.reshape(dims + dims)
    for k in sorted(traced_set, reverse=True):
        # trace the axis pair of factor k in the current tensor
        ax = k - 1
        t = np.trace(t, axis1=ax, axis2=ax + t.ndim // 2)
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d_keep, d_keep)


def permute_factors(a: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: output factor j is input factor ``order[j]`` (0-based)."""
    a = np.asarray(a, dtype=complex)
    dims = check_shape(dims, a.shape[0])
    n = len(dims)
    order = list(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"{order} is not a permutation of 0..{n - 1}")
    t = a.reshape(dims + dims).transpose(order + [n + k for k in order])
    return t.reshape(a.shape)


def embed(op: np.ndarray, dims: Sequence[int], factors: Sequence[int]) -> np.ndarray:
    """Embed an operator acting on the 1-based ``factors`` into the full space.

    ``op`` acts on the tensor product of the named factors in ascending factor
    order; identity is placed on every other factor. For a product operator
    A_1 (x) A_2 on factors (1, 3) of a 3-factor space this is the lift
    A_1 (x) 1 (x) A_2.
    """
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    factors = sorted(int(k) for k in factors)
    if not set(factors) <= set(range(1, n + 1)) or len(set(factors)) != len(factors):
        raise ValueError(f"factors {factors} not a subset of 1..{n}")
    d_f = int(np.prod([dims[k - 1] for k in factors]))
    op = np.asarray(op, dtype=complex)
    if op.shape != (d_f, d_f):
        raise ValueError(f"operator shape {op.shape} does not match factors {factors}")
    rest = [k for k in range(1, n + 1) if k not in factors]
    d_rest = int(np.prod([dims[k - 1] for k in rest])) if rest else 1
    full = kron(op, np.eye(d_rest))
    # full currently lives on (factors..., rest...); permute back to 1..n
    current = factors + rest
    current_dims = tuple(dims[k - 1] for k in current)
    order = [current.index(k) for k in range(1, n + 1)]
    return permute_factors(full, current_dims, order)


# ---------------------------------------------------------------------------
# spectral operations
# ---------------------------------------------------------------------------


def eigh(a: np.ndarray, tol: float = DEFAULT.construction) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns eigenvalues ascending and the unitary of column eigenvectors.
    """
    a = check_hermitian(a, tol)
    return np.linalg.eigh(a)


def min_eigenvalue(a: np.ndarray) -> float:
    return float(np.linalg.eigvalsh((a + a.conj().T) / 2)[0])


def is_psd(a: np.ndarray, tol: float = DEFAULT.psd) -> bool:
    """True iff the minimum eigenvalue of the Hermitian part is >= -tol."""
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    return min_eigenvalue(a) >= -tol


# ---------------------------------------------------------------------------
# Hermitian bases and the real symmetric embedding
# ---------------------------------------------------------------------------


def hermitian_basis(d: int) -> list[np.ndarray]:
    """Orthonormal basis of d x d Hermitian matrices under <A, B> = Tr(AB).

    Ordering (generalized Gell-Mann): the d diagonal units |k><k| first, then
    the symmetric pairs (|k><l| + |l><k|)/sqrt(2) for k < l, then the
    antisymmetric pairs (-i|k><l| + i|l><k|)/sqrt(2) for k < l.
    """
    if d < 1:
        raise ValueError("dimension must be positive")
    basis: list[np.ndarray] = []
    for k in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[k, k] = 1.0
        basis.append(e)
    s = 1.0 / np.sqrt(2.0)
    for k in range(d):
        for l in range(k + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[k, l] = s
            e[l, k] = s
            basis.append(e)
    for k in range(d):
        for l in range(k + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[k, l] = -1j * s
            e[l, k] = 1j * s
            basis.append(e)
    return basis


def hermitian_product_basis(dims: Sequence[int]) -> list[np.ndarray]:
    """Orthonormal product basis of the Hermitian space on a tensor product.

    Elements are Kronecker products of per-factor ``hermitian_basis`` elements
    in lexicographic index order; deterministic for constraint assembly.
    """
    factor_bases = [hermitian_basis(int(d)) for d in dims]
    out: list[np.ndarray] = []
    for combo in product(*factor_bases):
        m = combo[0]
        for f in combo[1:]:
            m = kron(m, f)
        out.append(m)
    return out


def realify(a: np.ndarray, tol: float = DEFAULT.construction) -> np.ndarray:
    """Real symmetric embedding [[Re A, -Im A], [Im A, Re A]] of a Hermitian A.

    The embedding doubles every eigenvalue's multiplicity, so A and realify(A)
    are PSD together.
    """
    a = check_hermitian(a, tol)
    re, im = a.real, a.imag
    return np.block([[re, -im], [im, re]])


def derealify(s: np.ndarray) -> np.ndarray:
    """Inverse of :func:`realify` by orthogonal projection.

    A symmetric 2d x 2d matrix is first projected onto the image of realify
    (an average with its conjugation by the symplectic form, which preserves
    positivity), then read back as P + iQ.
    """
    s = np.asarray(s, dtype=float)
    n2 = s.shape[0]
    if s.ndim != 2 or s.shape[1] != n2 or n2 % 2:
        raise ValueError(f"expected an even-dimensional square matrix, got {s.shape}")
    d = n2 // 2
    s = (s + s.T) / 2
    s11, s12 = s[:d, :d], s[:d, d:]
    s21, s22 = s[d:, :d], s[d:, d:]
    p = (s11 + s22) / 2
    q = (s21 - s12) / 2
    return (p + p.T) / 2 + 1j * (q - q.T) / 2

"""Prolongation spaces of matrix Lie algebras and the finite-type dichotomy.

The order-d prolongation of a linear subspace h of End(R^n) is the space of
symmetric (d+1)-multilinear vector-valued maps A such that for every fixed
tuple (u_1, ..., u_d) the endomorphism ``u -> A(u, u_1, ..., u_d)`` lies in
h.  A one-parameter algebra span{R} has a vanishing first prolongation
exactly when rank(R) >= 2; when h contains a rank-one element
``x -> <a,x> v`` the explicit family

    L_d(x_1, ..., x_{d+1}) = <a,x_1> ... <a,x_{d+1}> v

gives a nonzero element at every order, so the type is infinite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .braid import LinearSystem, solve_kernel
from .multilinear import (
    SPECTRAL_TOL,
    SymTensor,
    enumerate_sym_indices,
    sym_index_count,
    _sym_index_position,
)

#: Hard cap on packed unknown counts for prolongation computations.
SIZE_CAP = 20_000

#: Orders beyond this are refused; every phenomenon of interest appears by 2.
MAX_ORDER_CAP = 5

#: sigma_2 / sigma_1 threshold below which a matrix counts as rank one.
RANK1_RATIO_TOL = 1e-8


@dataclass
class MatrixAlgebra:
    """Linear subspace of n x n matrices given by a spanning list.

    The generators are orthonormalized (Frobenius inner product) at
    construction; closure under the matrix bracket is deliberately not
    enforced, since prolongation only needs the subspace.
    """

    n: int
    generators: list[np.ndarray]
    orthonormalized_basis: np.ndarray = field(init=False)
    _complement: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        gens = [np.asarray(g, dtype=float) for g in self.generators]
        if not gens:
            raise ValueError("need at least one generator matrix")
        for g in gens:
            if g.shape != (self.n, self.n):
                raise ValueError(f"generator of shape {g.shape}, expected ({self.n}, {self.n})")
        self.generators = gens
        stacked = np.stack([g.ravel() for g in gens])
        _, svals, vt = np.linalg.svd(stacked, full_matrices=True)
        smax = svals[0] if svals.size else 0.0
        rank = int(np.sum(svals >= SPECTRAL_TOL * smax)) if smax > 0.0 else 0
        if rank == 0:
            raise ValueError("generators span the zero subspace")
        self.orthonormalized_basis = vt[:rank].reshape(rank, self.n, self.n)
        self._complement = vt[rank:].reshape(-1, self.n, self.n)

    @property
    def dim(self) -> int:
        return self.orthonormalized_basis.shape[0]

    def element(self, coefficients) -> np.ndarray:
        """Linear combination of the orthonormalized basis."""
        c = np.asarray(coefficients, dtype=float)
        return np.tensordot(c, self.orthonormalized_basis, axes=([0], [0]))

    def projection_residual(self, x: np.ndarray) -> float:
        """Frobenius norm of the component of x orthogonal to the subspace."""
        x = np.asarray(x, dtype=float)
        coeffs = np.tensordot(self.orthonormalized_basis, x, axes=([1, 2], [0, 1]))
        proj = np.tensordot(coeffs, self.orthonormalized_basis, axes=([0], [0]))
        return float(np.linalg.norm(x - proj))

    def conjugate(self, g: np.ndarray) -> "MatrixAlgebra":
        """The algebra g h g^-1."""
        g = np.asarray(g, dtype=float)
        ginv = np.linalg.inv(g)
        return MatrixAlgebra(self.n, [g @ b @ ginv for b in self.orthonormalized_basis])


@dataclass
class ProlongationSpace:
    """Kernel basis of the order-d prolongation constraints of an algebra."""

    order: int
    basis: list[SymTensor]
    dim: int


@dataclass
class Rank1Witness:
    """A rank-one element of a matrix subspace with its dyadic factorization.

    ``matrix`` is (numerically) ``v a^T``, i.e. the map ``x -> <a,x> v``, and
    ``sigma_ratio`` is sigma_2/sigma_1 of the witness.
    """

    matrix: np.ndarray
    a: np.ndarray
    v: np.ndarray
    sigma_ratio: float
    coefficients: np.ndarray


@dataclass
class FiniteType:
    """The least order at which the prolongation space vanishes."""

    order: int
    dims: dict[int, int]
    verified_next_order: int | None = None


@dataclass
class InfiniteType:
    witness: Rank1Witness


@dataclass
class UnknownBeyond:
    max_order: int
    dims: dict[int, int]


def prolongation_unknowns(n: int, d: int) -> int:
    return n * math.comb(n + d, d + 1)


def prolongation_system(h: MatrixAlgebra, d: int) -> LinearSystem:
    """Membership constraints on a packed symmetric degree-(d+1) unknown.

    For each symmetric d-tuple of basis vectors, the partial evaluation
    matrix must have zero Frobenius component along the orthogonal
    complement of the algebra.
    """
    if d < 1:
        raise ValueError(f"order must be >= 1, got {d}")
    n = h.n
    ncols = prolongation_unknowns(n, d)
    if ncols > SIZE_CAP:
        raise ValueError(
            f"prolongation system would have {ncols} unknowns "
            f"(cap {SIZE_CAP}); reduce n or the order"
        )
    pos = _sym_index_position(n, d + 1)
    labels = [("A", idx, out) for idx in enumerate_sym_indices(n, d + 1) for out in range(n)]
    complement = h._complement
    tuples = enumerate_sym_indices(n, d)
    rows = np.zeros((len(tuples) * len(complement), ncols))
    r = 0
    for tup in tuples:
        for q in complement:
            # <X_tup, Q>_F = sum_{out,u} Q[out,u] A[sort(u,tup), out]
            for u in range(n):
                idx = tuple(sorted((u,) + tup))
                base = pos[idx] * n
                rows[r, base : base + n] += q[:, u]
            r += 1
    return LinearSystem(unknown_labels=labels, rows=rows)


def prolongation_space(
    h: MatrixAlgebra, d: int, tol: float = SPECTRAL_TOL
) -> ProlongationSpace:
    """Basis of the order-d prolongation space as packed symmetric tensors."""
    system = prolongation_system(h, d)
    report = solve_kernel(system, tol=tol, want_basis=True)
    n = h.n
    p = sym_index_count(n, d + 1)
    basis = [
        SymTensor(n=n, degree=d + 1, coeffs=vec.reshape(p, n))
        for vec in (report.kernel_basis if report.kernel_dim else np.zeros((0, system.unknowns)))
    ]
    return ProlongationSpace(order=d, basis=basis, dim=report.kernel_dim)


def membership_residual(h: MatrixAlgebra, t: SymTensor) -> float:
    """Worst Frobenius projection residual of the partial evaluations of t."""
    n = h.n
    d = t.degree - 1
    full = t.unpack()
    worst = 0.0
    for tup in enumerate_sym_indices(n, d):
        x = full[(slice(None),) + tup + (slice(None),)].T  # X[out, u]
        worst = max(worst, h.projection_residual(x))
    return worst


def find_rank1(
    h: MatrixAlgebra, trials: int = 64, seed: int = 0
) -> Rank1Witness | None:
    """Search the subspace for a rank-one element.

    Strategy: scan sign patterns in {-1, 0, 1}^dim over the orthonormalized
    basis (or random patterns when that grid is too large), add seeded
    random directions (one RNG per trial index, so trials are order
    independent), then polish the best candidates by minimizing
    sigma_2/sigma_1.  Returning None is a heuristic negative, not a proof of
    absence.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    dim = h.dim
    if h.n == 1:
        c = np.zeros(dim)
        c[0] = 1.0
        w = h.element(c)
        if np.abs(w[0, 0]) > 0:
            return _make_witness(h, c)
        return None

    candidates: list[np.ndarray] = []
    if 3**dim <= 20_000:
        grids = np.array(
            np.meshgrid(*([[-1.0, 0.0, 1.0]] * dim), indexing="ij")
        ).reshape(dim, -1).T
        candidates.extend(g for g in grids if np.any(g))
    else:
        rng = np.random.default_rng(seed)
        candidates.extend(np.sign(rng.standard_normal((2000, dim))))
    for i in range(trials):
        rng_i = np.random.default_rng((seed, i))
        candidates.append(rng_i.standard_normal(dim))

    scored = []
    for c in candidates:
        c = c / np.linalg.norm(c)
        scored.append((_sigma_ratio(h.element(c)), c))
    scored.sort(key=lambda pair: pair[0])

    best_ratio, best_c = scored[0]
    if best_ratio >= RANK1_RATIO_TOL and dim > 1:
        for ratio, c0 in scored[:8]:
            res = optimize.minimize(
                lambda c: _sigma_ratio(h.element(c / max(np.linalg.norm(c), 1e-30))),
                c0,
                method="Nelder-Mead",
                options={"maxiter": 400 * dim, "fatol": 1e-14, "xatol": 1e-12},
            )
            cand = res.x / np.linalg.norm(res.x)
            cand_ratio = _sigma_ratio(h.element(cand))
            if cand_ratio < best_ratio:
                best_ratio, best_c = cand_ratio, cand
            if best_ratio < RANK1_RATIO_TOL:
                break
    if best_ratio < RANK1_RATIO_TOL:
        return _make_witness(h, best_c)
    return None


def _sigma_ratio(x: np.ndarray) -> float:
    svals = np.linalg.svd(x, compute_uv=False)
    if svals[0] == 0.0:
        return 1.0
    if svals.size < 2:
        return 0.0
    return float(svals[1] / svals[0])


def _make_witness(h: MatrixAlgebra, coefficients: np.ndarray) -> Rank1Witness:
    w = h.element(coefficients)
    u, svals, vt = np.linalg.svd(w)
    a = vt[0]
    v = svals[0] * u[:, 0]
    return Rank1Witness(
        matrix=np.outer(v, a),
        a=a,
        v=v,
        sigma_ratio=_sigma_ratio(w),
        coefficients=np.asarray(coefficients),
    )


def rank1_witness_prolongation(a, v, d: int) -> SymTensor:
    """The explicit order-d prolongation of the rank-one map ``x -> <a,x> v``.

    Packed coefficients are ``prod_k a[i_k] * v``; the result is symmetric,
    nonzero, and its partial evaluations all lie in span{v a^T}.
    """
    a = np.asarray(a, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.linalg.norm(a) == 0.0:
        raise ValueError("covector a must be nonzero")
    if np.linalg.norm(v) == 0.0:
        raise ValueError("vector v must be nonzero")
    if d < 1:
        raise ValueError(f"order must be >= 1, got {d}")
    n = a.shape[0]
    indices = enumerate_sym_indices(n, d + 1)
    coeffs = np.zeros((len(indices), n))
    for pos, idx in enumerate(indices):
        coeffs[pos] = math.prod(a[k] for k in idx) * v
    return SymTensor(n=n, degree=d + 1, coeffs=coeffs)


def finite_type(
    h: MatrixAlgebra,
    max_order: int = 3,
    tol: float = SPECTRAL_TOL,
    trials: int = 64,
    seed: int = 0,
) -> FiniteType | InfiniteType | UnknownBeyond:
    """Determine the type of an algebra up to ``max_order``.

    A rank-one element (if the heuristic search finds one) certifies
    infinite type through its explicit witness family.  Otherwise
    prolongation spaces are computed order by order; the first vanishing
    order is returned and, where the size cap allows, the next order is
    recomputed to confirm that vanishing persists rather than assuming it.
    """
    if max_order < 1 or max_order > MAX_ORDER_CAP:
        raise ValueError(f"max_order must be in 1..{MAX_ORDER_CAP}, got {max_order}")
    witness = find_rank1(h, trials=trials, seed=seed)
    if witness is not None:
        return InfiniteType(witness=witness)
    dims: dict[int, int] = {}
    for d in range(1, max_order + 1):
        dims[d] = prolongation_space(h, d, tol=tol).dim
        if dims[d] == 0:
            verified = None
            if d + 1 <= MAX_ORDER_CAP and prolongation_unknowns(h.n, d + 1) <= SIZE_CAP:
                dims[d + 1] = prolongation_space(h, d + 1, tol=tol).dim
                if dims[d + 1] != 0:
                    raise ArithmeticError(
                        f"prolongation dimensions are not monotone: order {d} is 0 "
                        f"but order {d + 1} has dimension {dims[d + 1]}"
                    )
                verified = d + 1
            return FiniteType(order=d, dims=dims, verified_next_order=verified)
    return UnknownBeyond(max_order=max_order, dims=dims)


def curve_stabilizer_algebra(
    samples: list[tuple[np.ndarray, np.ndarray]], tol: float = SPECTRAL_TOL
) -> MatrixAlgebra:
    """Matrices X with ``X^T b_k + b_k X`` proportional to t_k at every sample.

    Each sample is a pair (b_k, t_k) of a point on a curve of symmetric
    positive forms and a nonzero symmetric tangent there.  The joint
    homogeneous system in (X, lambda_1, ..., lambda_K) is solved and the
    X-projection of its kernel is returned as an algebra.
    """
    if not samples:
        raise ValueError("need at least one (point, tangent) sample")
    n = np.asarray(samples[0][0]).shape[0]
    k = len(samples)
    pairs = enumerate_sym_indices(n, 2)
    ncols = n * n + k
    labels = [("X", (i, j), None) for i in range(n) for j in range(n)]
    labels += [("lambda", (s,), None) for s in range(k)]
    rows = np.zeros((k * len(pairs), ncols))
    r = 0
    for s, (b, t) in enumerate(samples):
        b = np.asarray(b, dtype=float)
        t = np.asarray(t, dtype=float)
        if b.shape != (n, n) or t.shape != (n, n):
            raise ValueError("all samples must be n x n matrices of equal size")
        if np.max(np.abs(t)) == 0.0:
            raise ValueError(f"tangent matrix of sample {s} is zero")
        for (i, j) in pairs:
            # (X^T b + b X)_{ij} - lambda_s t_{ij} = 0
            for m in range(n):
                rows[r, m * n + i] += b[m, j]
                rows[r, m * n + j] += b[i, m]
            rows[r, n * n + s] -= t[i, j]
            r += 1
    system = LinearSystem(unknown_labels=labels, rows=rows)
    report = solve_kernel(system, tol=tol, want_basis=True)
    if report.kernel_dim == 0:
        raise ValueError("stabilizer system has trivial kernel; no algebra to return")
    xblock = report.kernel_basis[:, : n * n]
    _, svals, vt = np.linalg.svd(xblock, full_matrices=False)
    smax = svals[0] if svals.size else 0.0
    rank = int(np.sum(svals >= tol * smax)) if smax > 0.0 else 0
    gens = [vt[i].reshape(n, n) for i in range(rank)]
    return MatrixAlgebra(n, gens)


def builtin_algebra(
    name: str,
    n: int | None = None,
    r_matrix: np.ndarray | None = None,
    generators: list[np.ndarray] | None = None,
) -> MatrixAlgebra:
    """Catalog of named matrix algebras.

    ``so``      antisymmetric matrices (orthogonal algebra);
    ``co``      R*Id + so(n) (conformal algebra);
    ``lightlike_orth``  the algebra of the degenerate form
                        diag(1, ..., 1, 0), i.e. matrices X with
                        X^T G + G X = 0;
    ``one_param``       span of a single supplied matrix R;
    ``custom``          the span of the supplied generators.
    """
    if name == "one_param":
        if r_matrix is None:
            raise ValueError("one_param algebra needs the matrix R")
        r_matrix = np.asarray(r_matrix, dtype=float)
        return MatrixAlgebra(r_matrix.shape[0], [r_matrix])
    if name == "custom":
        if not generators:
            raise ValueError("custom algebra needs generator matrices")
        gens = [np.asarray(g, dtype=float) for g in generators]
        return MatrixAlgebra(gens[0].shape[0], gens)
    if n is None:
        raise ValueError(f"algebra '{name}' needs a dimension n")
    if name == "so":
        return MatrixAlgebra(n, _antisym_basis(n))
    if name == "co":
        return MatrixAlgebra(n, [np.eye(n)] + _antisym_basis(n))
    if name == "lightlike_orth":
        return _lightlike_orth(n)
    raise ValueError(f"unknown algebra name '{name}'")


def _antisym_basis(n: int) -> list[np.ndarray]:
    basis = []
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n))
            e[i, j] = 1.0
            e[j, i] = -1.0
            basis.append(e)
    if not basis:  # n == 1: the only antisymmetric matrix is 0
        raise ValueError("so(1) is the zero algebra")
    return basis


def _lightlike_orth(n: int) -> MatrixAlgebra:
    if n < 2:
        raise ValueError("lightlike orthogonal algebra needs n >= 2")
    g = np.eye(n)
    g[n - 1, n - 1] = 0.0
    pairs = enumerate_sym_indices(n, 2)
    rows = np.zeros((len(pairs), n * n))
    for r, (i, j) in enumerate(pairs):
        for m in range(n):
            rows[r, m * n + i] += g[m, j]
            rows[r, m * n + j] += g[i, m]
    labels = [("X", (i, j), None) for i in range(n) for j in range(n)]
    report = solve_kernel(LinearSystem(unknown_labels=labels, rows=rows), want_basis=True)
    gens = [vec.reshape(n, n) for vec in report.kernel_basis]
    return MatrixAlgebra(n, gens)

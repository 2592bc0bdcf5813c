"""Recover (T, beta, kappa, gamma) from a concretely given grading of M_n.

Everything discrete is found exactly except the splitting of the identity
into the block idempotents, which uses a floating-point eigendecomposition;
the resulting kappa and gamma are then checked exactly against the
component dimensions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt, lcm

import numpy as np

from . import kmatrix as km
from .abgroup import FiniteSubgroup, GroupSpec, subgroup_basis, subgroup_generate
from .bichar import Bicharacter, BicharacterError
from .classify import canonical_form
from .cyclotomic import as_root_of_unity, to_complex
from .graded_matrix import (GradedAlgebra, MatrixGradingParams, ParameterError, expected_dimension,
                            verify_associative_grading)
from .kmatrix import KArray


class RecognitionError(ValueError):
    pass


@dataclass
class Recognition:
    params: MatrixGradingParams
    canonical: MatrixGradingParams
    beta_residual: float
    stats: dict = field(default_factory=dict)


def centralizer_of_identity_component(A: GradedAlgebra) -> dict:
    """Homogeneous bases of the centralizer of R_e, keyed by degree."""
    comps = A.components()
    e = A.G.identity
    if e not in comps:
        raise RecognitionError("identity component is empty")
    n = A.n
    E = A.component(e)
    ne = E.shape[0]
    out = {}
    for g, idx in comps.items():
        B = KArray(A.N, A.mats.num[idx], A.mats.den)
        r = len(idx)
        left = km.matmul(B.reshape(r, 1, n, n), E.reshape(1, ne, n, n))
        right = km.matmul(E.reshape(1, ne, n, n), B.reshape(r, 1, n, n))
        comm = (left - right).reshape(r, ne * n * n)
        M = KArray(comm.N, np.swapaxes(comm.num, 0, 1), comm.den, normalize=False)
        null = km.nullspace(M)
        if null.shape[0]:
            out[g] = km.matmul(null, B.reshape(r, n * n)).reshape(null.shape[0], n, n)
    return out


def _ratio(XY: KArray, YX: KArray):
    mask = YX.nonzero_mask()
    if not mask.any():
        return None
    i, j = map(int, np.argwhere(mask)[0])
    c = XY.entry(i, j) / YX.entry(i, j)
    if not XY == YX.scale(c):
        raise RecognitionError("homogeneous elements of the centralizer do not commute up to a scalar")
    return c


def recover_bicharacter(T: FiniteSubgroup, Z: dict, n: int):
    basis = [b for b, _ in subgroup_basis(T)] if T.order > 1 else []
    vals = {}
    residual = 0.0
    for a in basis:
        for b in basis:
            found = None
            for X in (Z[a][i] for i in range(Z[a].shape[0])):
                for Y in (Z[b][j] for j in range(Z[b].shape[0])):
                    c = _ratio(X @ Y, Y @ X)
                    if c is not None:
                        found = c
                        break
                if found is not None:
                    break
            if found is None:
                raise RecognitionError("no pair with a nonzero product in the centralizer")
            r = as_root_of_unity(found)
            if r is None:
                raise RecognitionError("commutation factor is not a root of unity")
            approx = complex(np.exp(2j * np.pi * float(r.angle)))
            residual = max(residual, abs(to_complex(found) - approx))
            vals[(a, b)] = r
    N = 1
    for r in vals.values():
        N = lcm(N, r.reduced().N)
    E = [[vals[(a, b)].lift(N).k for b in basis] for a in basis] if basis else []
    try:
        beta = Bicharacter(T, N, E, basis) if basis else Bicharacter(T, 1, [], [])
    except BicharacterError as exc:
        raise RecognitionError(str(exc)) from None
    return beta, residual


def _cluster(values: np.ndarray, tol: float) -> list:
    order = np.argsort(values.real + 1e-3 * values.imag)
    groups = []
    for i in order:
        for grp in groups:
            if abs(values[grp[0]] - values[i]) < tol:
                grp.append(int(i))
                break
        else:
            groups.append([int(i)])
    return groups


def recognize_matrix_grading(A: GradedAlgebra, tol: float = 1e-8, seed: int = 0) -> Recognition:
    rep = verify_associative_grading(A)
    if not rep.ok:
        raise RecognitionError("input is not a grading of M_n: " + str(rep.violations[:3]))
    G, n = A.G, A.n
    Z = centralizer_of_identity_component(A)
    dims = {g: Z[g].shape[0] for g in Z}
    e = G.identity
    s = dims.get(e, 0)
    Tset = sorted(Z, key=G.key)
    T = subgroup_generate(G, Tset)
    if set(T.elements) != set(Tset) or any(d != s for d in dims.values()):
        raise RecognitionError("support of the centralizer is not a subgroup with equal multiplicities")
    ell = isqrt(T.order)
    if ell * ell != T.order:
        raise RecognitionError("support of the centralizer does not have square order")
    beta, residual = recover_bicharacter(T, Z, n)

    # block idempotents: spectral projectors of a generic central element
    rng = np.random.default_rng(seed)
    Ze = Z[e].to_complex()
    coeffs = rng.uniform(1.0, 2.0, size=s)
    z = np.tensordot(coeffs, Ze, axes=1)
    w, V = np.linalg.eig(z)
    Vinv = np.linalg.inv(V)
    scale = max(1.0, float(np.max(np.abs(w))))
    groups = _cluster(w, 1e-6 * scale)
    if len(groups) != s:
        raise RecognitionError(f"found {len(groups)} eigenvalue clusters, expected {s}")
    kappa = []
    for grp in groups:
        if len(grp) % ell:
            raise RecognitionError("idempotent rank is not a multiple of the division degree")
        kappa.append(len(grp) // ell)
    P = [V[:, grp] @ Vinv[grp, :] for grp in groups]
    comps = A.components()
    mats = A.mats.to_complex()
    supports = [set() for _ in range(s)]
    for g, idx in comps.items():
        for B in mats[idx]:
            bn = max(1.0, float(np.linalg.norm(B)))
            for j in range(s):
                val = np.linalg.norm(P[0] @ B @ P[j]) / (bn * np.linalg.norm(P[0]) * np.linalg.norm(P[j]))
                if val > tol:
                    supports[j].add(g)
    gamma = []
    for j in range(s):
        if not supports[j]:
            raise RecognitionError("empty Peirce component")
        gj = min(supports[j], key=G.key)
        if {G.op(gj, t) for t in T.elements} != supports[j]:
            raise RecognitionError("Peirce support is not a single coset of T")
        gamma.append(gj)
    try:
        p = MatrixGradingParams(G, T, beta, tuple(kappa), tuple(gamma))
    except ParameterError as exc:
        raise RecognitionError(str(exc)) from None
    if p.n != n:
        raise RecognitionError("recovered block sizes do not add up to n")
    for g, idx in comps.items():
        if len(idx) != expected_dimension(p, g):
            raise RecognitionError(f"component dimension at {g} does not match the recovered data")
    canon = canonical_form(p) if G.is_finite else p
    return Recognition(p, canon, residual, {"blocks": s, "division_degree": ell})

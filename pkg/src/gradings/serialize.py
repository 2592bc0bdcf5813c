"""JSON forms of groups, bicharacters, parameter tuples, graded algebras and tables."""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import gcd

import jsonschema
import numpy as np

from . import kmatrix as km
from .abgroup import GroupSpec, subgroup_generate
from .bichar import Bicharacter
from .cyclotomic import CycloNum, RootOfUnity
from .enumeration import ClassificationTable
from .graded_matrix import GradedAlgebra, MatrixGradingParams, ParameterError
from .involution import GradedAlgebraWithAntiAut, InvolutionParams, StructuredKappaGamma
from .kmatrix import KArray
from .lie_grading import LieGradingParams

SCHEMA_VERSION = "v1"
MATRIX_FAMILIES = ("matrix", "A_I")
STRUCTURED_FAMILIES = ("matrix-with-involution", "B", "C", "D")
TYPE_II_FAMILIES = ("A_II1", "A_II2", "A_II3")


class SchemaError(ValueError):
    def __init__(self, message: str, path=()):
        super().__init__(message)
        self.path = list(path)


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files("gradings").joinpath("schema", SCHEMA_VERSION, f"{name}.json").read_text()
    return json.loads(text)


@lru_cache(maxsize=None)
def _validator(name: str, branch: int | None = None):
    schema = load_schema(name)
    if branch is not None:
        schema = dict(schema["oneOf"][branch], **{"$id": schema["$id"]})
    store = {}
    for other in ("common", "params", "algebra", "enum_request", "table"):
        s = load_schema(other)
        store[s["$id"]] = s
    try:
        from referencing import Registry, Resource

        registry = Registry().with_resources([(k, Resource.from_contents(v)) for k, v in store.items()])
        return jsonschema.Draft202012Validator(schema, registry=registry)
    except ImportError:  # older jsonschema
        resolver = jsonschema.RefResolver.from_schema(schema, store=store)
        return jsonschema.Draft202012Validator(schema, resolver=resolver)


def _branch(obj, name: str):
    """For tagged unions, the alternative matching the family tag (gives sharper messages)."""
    alts = load_schema(name).get("oneOf")
    if not alts or not isinstance(obj, dict):
        return None
    for i, alt in enumerate(alts):
        if obj.get("family") in alt["properties"]["family"]["enum"]:
            return i
    return None


def validate(obj, name: str):
    """Raise SchemaError on the first violation of the named schema."""
    e = jsonschema.exceptions.best_match(_validator(name, _branch(obj, name)).iter_errors(obj))
    if e is not None:
        raise SchemaError(e.message, e.absolute_path)


# ---------------------------------------------------------------------------
# small pieces


def elem_to_json(g) -> list:
    return [int(x) for x in g]


def group_from_json(obj) -> GroupSpec:
    return GroupSpec.from_json(obj)


def bichar_from_json(G: GroupSpec, obj) -> Bicharacter:
    return Bicharacter.from_json(G, obj)


def structure_from_json(obj) -> StructuredKappaGamma:
    return StructuredKappaGamma(int(obj["ell"]), int(obj["m"]), int(obj["k"]), obj["q"], obj["gamma_single"],
                                obj["gamma_pairs"])


def involution_to_json(sg: StructuredKappaGamma, tau, delta) -> dict:
    out = sg.to_json()
    out["tau"] = [elem_to_json(t) for t in tau]
    if delta is not None:
        out["delta"] = list(delta) if isinstance(delta, (tuple, list)) else int(delta)
    return out


# ---------------------------------------------------------------------------
# parameter tuples


def params_to_json(p) -> dict:
    if isinstance(p, MatrixGradingParams):
        return {"family": "matrix", "group": p.G.to_json(), "beta": p.beta.to_json(), "kappa": list(p.kappa),
                "gamma": [elem_to_json(g) for g in p.gamma]}
    if isinstance(p, InvolutionParams):
        return {"family": "matrix-with-involution", "group": p.G.to_json(), "beta": p.beta.to_json(),
                "involution": involution_to_json(p.structure, p.tau, p.delta)}
    if isinstance(p, LieGradingParams):
        out = {"family": p.variant, "group": p.G.to_json()}
        if p.variant == "A_I":
            out.update(beta=p.beta.to_json(), kappa=list(p.kappa), gamma=[elem_to_json(g) for g in p.gamma])
            return out
        if p.beta is not None:
            out["beta"] = p.beta.to_json()
        if p.is_type_II:
            out["h"] = elem_to_json(p.h)
            out["H"] = {"generators": [elem_to_json(g) for g in (p.H.generators or p.H.elements)]}
            delta = p.delta if p.variant == "A_II2" else None
            out["involution"] = involution_to_json(p.structure, p.tau, delta)
            if p.mu is not None:
                out["mu"] = p.mu.to_json()
            return out
        out["involution"] = involution_to_json(p.structure, p.tau, p.delta)
        return out
    raise ParameterError(f"cannot serialize {type(p).__name__}")


def params_from_json(obj):
    validate(obj, "params")
    fam = obj["family"]
    G = group_from_json(obj["group"])
    beta = bichar_from_json(G, obj["beta"]) if "beta" in obj else None
    if fam in MATRIX_FAMILIES:
        kappa = tuple(obj["kappa"])
        gamma = tuple(G.validate(g) for g in obj["gamma"])
        if fam == "matrix":
            return MatrixGradingParams(G, beta.T, beta, kappa, gamma)
        return LieGradingParams("A_I", G, beta.T, beta, kappa, gamma)
    inv = obj["involution"]
    sg = structure_from_json(inv)
    tau = tuple(G.validate(t) for t in inv["tau"])
    if fam in TYPE_II_FAMILIES:
        H = subgroup_generate(G, obj["H"]["generators"])
        delta = tuple(inv["delta"]) if fam == "A_II2" else None
        if fam == "A_II2" and not isinstance(inv.get("delta"), list):
            raise SchemaError("A_II2 needs a sign vector delta", ["involution", "delta"])
        mu = RootOfUnity.from_json(obj["mu"]) if "mu" in obj else None
        return LieGradingParams(fam, G, beta.T if beta else None, beta, structure=sg, tau=tau, delta=delta, mu=mu,
                                H=H, h=G.validate(obj["h"]))
    delta = inv.get("delta")
    if not isinstance(delta, int):
        raise SchemaError(f"family {fam} needs delta = 1 or -1", ["involution", "delta"])
    if fam == "matrix-with-involution":
        return InvolutionParams(G, beta.T, beta, sg, tau, delta)
    if beta is None:
        T = subgroup_generate(G, [])
        beta = Bicharacter(T, 1, [], [])
    return LieGradingParams(fam, G, beta.T, beta, structure=sg, tau=tau, delta=delta)


# ---------------------------------------------------------------------------
# matrices and algebras


def _cyclo_json(N: int, coeffs, den: int) -> dict:
    cs = [Fraction(int(c), den) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    return {"N": N, "coeffs": [[c.numerator, c.denominator] for c in cs]}


def matrix_to_json(M: KArray) -> list:
    n, k = M.shape
    return [[_cyclo_json(M.N, M.num[i, j], M.den) for j in range(k)] for i in range(n)]


def stack_to_json(S: KArray) -> list:
    return [matrix_to_json(S[i]) for i in range(S.shape[0])]


def matrices_from_json(mats) -> KArray:
    """Stack of square matrices of CycloNum objects into one KArray with common conductor and denominator."""
    N = 1
    den = 1
    for M in mats:
        for row in M:
            for c in row:
                N = N * int(c["N"]) // gcd(N, int(c["N"]))
                for _, b in c["coeffs"]:
                    den = den * int(b) // gcd(den, int(b))
    d = km.totient(N)
    shape = (len(mats), len(mats[0]) if mats else 0, len(mats[0][0]) if mats and mats[0] else 0)
    out = np.zeros(shape + (d,), dtype=object)
    for a, M in enumerate(mats):
        if len(M) != shape[1] or any(len(row) != shape[2] for row in M):
            raise SchemaError("matrices must all have the same square shape", ["basis", a, "matrix"])
        for i, row in enumerate(M):
            for j, c in enumerate(row):
                x = CycloNum.from_json(c).lift(N)
                for t, v in enumerate(x.coeffs):
                    out[a, i, j, t] = v.numerator * (den // v.denominator)
    if shape[1] != shape[2]:
        raise SchemaError("matrices must be square", ["basis"])
    return KArray(N, km._fit(out), den)


def algebra_to_json(A) -> dict:
    phi = None
    if isinstance(A, GradedAlgebraWithAntiAut):
        phi, A = A, A.R
    out = {"n": A.n, "group": A.G.to_json(), "kind": A.kind,
           "basis": [{"matrix": matrix_to_json(A.mats[i]), "degree": elem_to_json(g)}
                     for i, g in enumerate(A.degrees)]}
    if A.kind == "lie" and "variant" in A.meta:
        out["variant"] = A.meta["variant"]
    if phi is None and isinstance(A.meta.get("phi"), GradedAlgebraWithAntiAut):
        phi = A.meta["phi"]
    if phi is not None:
        out["phi"] = {"matrix": matrix_to_json(phi.Phi), "kind": phi.kind}
    return out


def algebra_from_json(obj):
    """GradedAlgebra, or GradedAlgebraWithAntiAut when an associative algebra carries a form matrix."""
    validate(obj, "algebra")
    G = group_from_json(obj["group"])
    n = int(obj["n"])
    basis = obj["basis"]
    degrees = [G.validate(b["degree"]) for b in basis]
    mats = [b["matrix"] for b in basis]
    if "phi" in obj:
        mats = mats + [obj["phi"]["matrix"]]
    stack = matrices_from_json(mats) if mats else KArray.zeros(1, (0, n, n))
    if stack.shape[1:] != (n, n):
        raise SchemaError(f"matrices must be {n} x {n}", ["basis"])
    kind = obj.get("kind", "associative")
    if "phi" in obj:
        Phi = stack[len(basis)]
        stack = stack[:len(basis)]
    A = GradedAlgebra(n, G, stack, degrees, kind)
    if kind == "lie" and "variant" in obj:
        A.meta["variant"] = obj["variant"]
    if "phi" in obj:
        try:
            Phi_inv = km.inverse(Phi)
        except km.SingularMatrix:
            raise ParameterError("phi matrix is singular") from None
        W = GradedAlgebraWithAntiAut(A, Phi, Phi_inv, obj["phi"].get("kind", "involution"))
        if kind == "lie":
            A.meta["phi"] = W
            return A
        return W
    return A


# ---------------------------------------------------------------------------
# tables and reports


def table_to_json(t: ClassificationTable) -> dict:
    return {"group": t.G.to_json(), "algebra": t.algebra, "n": t.n, "counts": t.counts(),
            "entries": [{"key": e.key, "family": e.family, "params": params_to_json(e.params)} for e in t.entries]}


def dumps(obj) -> str:
    """Deterministic text form used for every file the command line writes."""
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"

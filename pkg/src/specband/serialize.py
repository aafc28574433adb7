"""JSON encodings for every on-disk data type.

Complex numbers are always written as two-element [re, im] arrays.  Matrix
entries store the upper triangle only; Hermitian symmetry is implied.
"""

import json

import numpy as np

from .matrices import FiniteHermitian, MatrixSpec, TailProfile
from .spectral import BoundaryMatrix, StepMeasure
from .vectorpoly import VectorPolynomial


def _c(z):
    z = complex(z)
    return [z.real, z.imag]


def _unc(pair):
    return complex(pair[0], pair[1])


def spec_to_dict(spec: MatrixSpec) -> dict:
    out = {
        "n": spec.n,
        "N_max": spec.n_max,
        "tail": list(spec.tail) if spec.tail else None,
        "pivot": {str(c): r for c, r in sorted(spec.pivot.items())},
        "entries": [[j, k, *_c(v)] for (j, k), v in sorted(spec.entries.items())],
    }
    if spec.tail_profile is not None:
        out["tail_profile"] = {
            "edge": _c(spec.tail_profile.edge),
            "interior": {str(d): _c(v) for d, v in spec.tail_profile.interior.items()},
        }
    else:
        out["tail_profile"] = None
    return out


def spec_from_dict(d: dict) -> MatrixSpec:
    profile = None
    if d.get("tail_profile"):
        tp = d["tail_profile"]
        profile = TailProfile(
            _unc(tp["edge"]),
            {int(k): _unc(v) for k, v in tp.get("interior", {}).items()},
        )
    return MatrixSpec(
        n=int(d["n"]),
        n_max=int(d["N_max"]),
        entries={(int(j), int(k)): complex(re, im) for j, k, re, im in d["entries"]},
        pivot={int(c): int(r) for c, r in d.get("pivot", {}).items()},
        tail=tuple(d["tail"]) if d.get("tail") else None,
        tail_profile=profile,
    )


def matrix_to_dict(m: FiniteHermitian) -> dict:
    return {"N": m.N, "data": [[_c(v) for v in row] for row in m.data]}


def matrix_from_dict(d: dict) -> FiniteHermitian:
    data = np.array([[_unc(v) for v in row] for row in d["data"]], dtype=complex)
    return FiniteHermitian(int(d["N"]), data)


def boundary_to_dict(t: BoundaryMatrix) -> dict:
    return {"n": t.n, "t": [[_c(v) for v in row] for row in t.t]}


def boundary_from_dict(d: dict) -> BoundaryMatrix:
    t = np.array([[_unc(v) for v in row] for row in d["t"]], dtype=complex)
    return BoundaryMatrix(int(d["n"]), t)


def measure_to_dict(mu: StepMeasure) -> dict:
    return {
        "n": mu.n,
        "points": [
            {"lambda": lam, "C": [_c(v) for v in c]} for lam, c in mu.points
        ],
    }


def measure_from_dict(d: dict) -> StepMeasure:
    pts = tuple(
        (float(p["lambda"]), np.array([_unc(v) for v in p["C"]], dtype=complex))
        for p in d["points"]
    )
    return StepMeasure(int(d["n"]), pts)


def poly_to_dict(r: VectorPolynomial) -> dict:
    return {"n": r.n, "comps": [[_c(v) for v in comp] for comp in r.comps]}


def poly_from_dict(d: dict) -> VectorPolynomial:
    comps = [[_unc(v) for v in comp] for comp in d["comps"]]
    return VectorPolynomial.from_components(comps, int(d["n"]), tol=0.0)


def dump(obj_dict, path=None):
    text = json.dumps(obj_dict, indent=2)
    if path is None:
        return text
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    return None


def load(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def sniff_matrix_or_spec(d: dict):
    """Accept either a structural spec or a dense matrix dictionary."""
    if "entries" in d:
        return spec_from_dict(d), "spec"
    if "data" in d:
        return matrix_from_dict(d), "matrix"
    raise ValueError("file is neither a matrix spec nor a dense matrix")

"""Inverse problem: from a step measure back to a band matrix with degenerations.

Gram-Schmidt runs over the canonical vector polynomials e_1, e_2, ... in
L2(R, sigma).  Whenever the residual of e_k vanishes, a degeneration
polynomial q~ of height k-1 is recorded; afterwards every index whose
height lies on the lattice h(q~) + n*N is skipped, because the residual
there is forced to vanish again (scalar multiples of q~ reproduce the same
zero-norm direction).  The surviving normalized residuals p~_k are an
orthonormal system, the first n of them form the boundary matrix, and

    m~_ij = <p~_i, t * p~_j>

assembles a matrix in the band-with-degenerations class whose step
spectral function reproduces sigma.

Working representation: each polynomial is carried both as coefficients
and as its vector of spectral coordinates w[k] = (C^k)* f(lambda_k), so
inner products are plain dot products and the Gram-Schmidt arithmetic
happens on well-scaled point values.
"""

from dataclasses import dataclass

import numpy as np

from .errors import PivotViolation, SingularZerothMoment, StageError
from .matrices import (
    FiniteHermitian,
    MatrixSpec,
    analyze_structure,
    truncate,
    validate_class,
)
from .spectral import (
    BoundaryMatrix,
    CLUSTER_TOL,
    StepMeasure,
    eigen_decompose,
    step_measure,
)
from .vectorpoly import canonical_e, leading_slot

#: relative residual threshold declaring a Gram-Schmidt degeneration
ZERO_NORM_TOL = 1e-8

#: relative threshold for reading structure off a reconstructed dense matrix
RECOVER_STRUCT_TOL = 1e-8


@dataclass(frozen=True)
class OrthoResult:
    """Output of the orthonormalization sweep.

    ``p_tilde`` are the emitted orthonormal polynomials, ``q_tilde`` the
    zero-norm degenerations (unnormalized residuals), ``t_tilde`` the
    boundary matrix read off the first n constants.  ``skip_log`` lists
    the canonical indices suppressed by the height-lattice rule and
    ``q_heights`` the heights at which degenerations appeared.
    """

    p_tilde: tuple
    q_tilde: tuple
    t_tilde: BoundaryMatrix
    skip_log: tuple
    q_heights: tuple
    rank_exhausted: bool
    weights: np.ndarray  # emitted spectral coordinates, row per p~
    skip_residuals: tuple = ()


def _canonical_weight_row(mu: StepMeasure, k):
    """Spectral coordinates of e_k without polynomial evaluation."""
    i, l = leading_slot(k - 1, mu.n)
    return np.array([(lam**l) * np.conj(c[i - 1]) for lam, c in mu.points])


def orthonormalize(mu: StepMeasure, max_k: int, check_skips: bool = False,
                   zero_tol: float = ZERO_NORM_TOL) -> OrthoResult:
    """Gram-Schmidt over the canonical family with the height-lattice skip rule.

    Runs until ``max_k`` orthonormal polynomials are emitted or all residue
    classes mod n are closed by degenerations (then the measure's rank is
    exhausted and the result says so).  ``check_skips`` additionally
    computes the raw residual at every skipped index, for verification.
    """
    n = mu.n
    s0 = mu.total_mass()
    eig = np.linalg.eigvalsh(s0)
    if eig[0] <= 1e-12 * max(eig[-1], 1.0):
        raise SingularZerothMoment(
            f"zeroth moment has eigenvalue {eig[0]:.3e}; cannot start"
        )
    emitted_w = []
    emitted_poly = []
    q_tilde = []
    q_heights = []
    skip_log = []
    skip_residuals = []
    k = 0
    while len(q_tilde) < n:
        k += 1
        h = k - 1
        lattice_hit = any((h - hq) > 0 and (h - hq) % n == 0 for hq in q_heights)
        if lattice_hit:
            skip_log.append(k)
            if check_skips:
                w, _, e_norm = _residual(mu, k, emitted_w, emitted_poly)
                skip_residuals.append(
                    float(np.linalg.norm(w)) / max(e_norm, 1e-300)
                )
            continue
        w, poly, e_norm = _residual(mu, k, emitted_w, emitted_poly)
        norm = float(np.linalg.norm(w))
        if norm <= zero_tol * max(e_norm, 1e-300):
            q_tilde.append(poly)
            q_heights.append(h)
        elif len(emitted_poly) < max_k:
            emitted_w.append(w / norm)
            emitted_poly.append(poly * (1.0 / norm))
        else:
            # cap reached and the next direction is not degenerate: stop
            break
    rank_exhausted = len(emitted_poly) < max_k
    if len(emitted_poly) < n:
        raise SingularZerothMoment("fewer than n orthonormal constants emerged")
    t_mat = np.zeros((n, n), dtype=complex)
    for j in range(n):
        const = emitted_poly[j]
        for i in range(n):
            comp = const.comps[i]
            t_mat[i, j] = comp[0] if comp else 0.0
    weights = np.array(emitted_w) if emitted_w else np.zeros((0, mu.size))
    return OrthoResult(
        p_tilde=tuple(emitted_poly),
        q_tilde=tuple(q_tilde),
        t_tilde=BoundaryMatrix(n, t_mat),
        skip_log=tuple(skip_log),
        q_heights=tuple(q_heights),
        rank_exhausted=rank_exhausted,
        weights=weights,
        skip_residuals=tuple(skip_residuals),
    )


def _residual(mu, k, emitted_w, emitted_poly):
    """Twice-iterated Gram-Schmidt step for e_k against the emitted system."""
    w = _canonical_weight_row(mu, k)
    e_norm = float(np.linalg.norm(w))
    poly = canonical_e(k, mu.n)
    for _ in range(2):
        for wi, pi in zip(emitted_w, emitted_poly):
            c = complex(np.vdot(wi, w))
            if c != 0:
                w = w - c * wi
                poly = poly - pi * c
    return w, poly, e_norm


def recover_matrix(res: OrthoResult, mu: StepMeasure) -> FiniteHermitian:
    """Matrix of multiplication by the variable in the orthonormal basis."""
    W = res.weights
    lam = mu.lambdas()
    mat = (W.conj() * lam) @ W.T
    mat = 0.5 * (mat + mat.conj().T)
    return FiniteHermitian(W.shape[0], mat)


def spec_from_dense(data: np.ndarray, n: int, rel_tol: float = RECOVER_STRUCT_TOL) -> MatrixSpec:
    """Read the structural description off a dense band-with-degenerations matrix.

    Pivots are identified as entries that are simultaneously the rightmost
    significant entry of their row and the topmost of their column; the
    trailing run of consecutive pivots determines the tail.
    """
    data = np.asarray(data, dtype=complex)
    N = data.shape[0]
    scale = float(np.max(np.abs(data))) or 1.0
    tol = rel_tol * scale
    entries = {}
    for j in range(1, N + 1):
        for k in range(j, N + 1):
            v = data[j - 1, k - 1]
            if abs(v) > tol:
                entries[(j, k)] = complex(v)

    def rightmost(row):
        cols = [k for (j, k) in entries if j == row] + [
            j for (j, k) in entries if k == row
        ]
        return max(cols, default=0)

    def topmost(col):
        rows = [j for (j, k) in entries if k == col] + [
            k for (j, k) in entries if j == col
        ]
        return min(rows, default=0)

    pivot = {}
    for c in range(n + 1, N + 1):
        r = topmost(c)
        if r == 0 or r >= c:
            raise PivotViolation(f"column {c} has no readable pivot")
        if rightmost(r) != c:
            raise PivotViolation(
                f"topmost entry of column {c} (row {r}) is not a row edge"
            )
        pivot[c] = r
    tail = None
    if pivot:
        c = N
        while c - 1 in pivot and c in pivot and pivot[c - 1] == pivot[c] - 1:
            c -= 1
        tail = (pivot[c], c)
    return MatrixSpec(n, N, entries, pivot, tail, None)


@dataclass
class RoundTripReport:
    """Agreement metrics of the matrix -> measure -> matrix pipeline."""

    N: int
    n: int
    class_report: object
    eigenvalue_error: float
    jump_location_error: float
    jump_matrix_error: float
    moment_error: float
    moment_order: int
    matrix: FiniteHermitian
    boundary: BoundaryMatrix
    skip_count: int
    q_heights: tuple
    q_residues_distinct: bool

    @property
    def class_ok(self):
        return self.class_report.passed

    def to_dict(self):
        return {
            "N": self.N,
            "n": self.n,
            "class_ok": self.class_ok,
            "class_report": self.class_report.to_dict(),
            "eigenvalue_error": self.eigenvalue_error,
            "jump_location_error": self.jump_location_error,
            "jump_matrix_error": self.jump_matrix_error,
            "moment_error": self.moment_error,
            "moment_order": self.moment_order,
            "skip_count": self.skip_count,
            "q_heights": list(self.q_heights),
            "q_residues_distinct": self.q_residues_distinct,
        }


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except Exception as exc:  # noqa: BLE001 - tag and re-raise
        raise StageError(name, exc) from exc


def compare_measures(a: StepMeasure, b: StepMeasure, cluster_tol=CLUSTER_TOL):
    """(max jump-location gap, max entrywise jump-matrix gap) between measures."""
    ja = a.grouped_jumps(cluster_tol)
    jb = b.grouped_jumps(cluster_tol)
    if len(ja) != len(jb):
        return float("inf"), float("inf")
    loc = max(abs(x[0] - y[0]) for x, y in zip(ja, jb))
    mat = max(float(np.max(np.abs(x[1] - y[1]))) for x, y in zip(ja, jb))
    return loc, mat


def roundtrip(spec: MatrixSpec, t: BoundaryMatrix, N: int) -> RoundTripReport:
    """Truncate, decompose spectrally, reconstruct, and measure the agreement."""
    m = _stage("truncate", truncate, spec, N)
    _stage("structure", analyze_structure, spec, N)
    sd = _stage("eigen", eigen_decompose, m)
    sigma = _stage("measure", step_measure, sd, t)
    res = _stage("orthonormalize", orthonormalize, sigma, N)
    m_rec = _stage("recover", recover_matrix, res, sigma)

    rec_spec = _stage("verify", spec_from_dense, m_rec.data, spec.n)
    class_report = validate_class(rec_spec, "mtilde")
    sd_rec = _stage("verify", eigen_decompose, m_rec)
    eig_err = (
        float(np.max(np.abs(sd.lambdas[: m_rec.N] - sd_rec.lambdas)))
        if m_rec.N == N
        else float("inf")
    )
    sigma_rec = _stage("verify", step_measure, sd_rec, res.t_tilde)
    loc_err, mat_err = compare_measures(sigma, sigma_rec)
    if spec.tail is not None:
        j0, k0 = spec.tail
        l = max((N - spec.n) // (k0 - j0), 0)
    else:
        l = 0
    order = 2 * l
    mom_err = 0.0
    for k in range(order + 1):
        mom_err = max(
            mom_err, float(np.max(np.abs(sigma.moment(k) - sigma_rec.moment(k))))
        )
    residues = [h % spec.n for h in res.q_heights]
    return RoundTripReport(
        N=N,
        n=spec.n,
        class_report=class_report,
        eigenvalue_error=eig_err,
        jump_location_error=loc_err,
        jump_matrix_error=mat_err,
        moment_error=mom_err,
        moment_order=order,
        matrix=m_rec,
        boundary=res.t_tilde,
        skip_count=len(res.skip_log),
        q_heights=res.q_heights,
        q_residues_distinct=len(set(residues)) == len(residues),
    )

"""Structural description of band Hermitian matrices with designated row edges.

The matrices handled here are Hermitian, conceptually infinite, and carry a
pivot map: beyond a boundary order ``n`` every column has exactly one
*row-edge entry* (a nonzero whose row holds only zeros to its right), and
from some position ``(j0, k0)`` on, the entries ``(j0+m, k0+m)`` are
simultaneously row-edge and *column-edge* entries (nonzero with only zeros
above them in their column), forming a regular banded tail.

Within a finite truncation the rightmost stored nonzero of a row that never
serves as a pivot is indistinguishable from a true row edge, so the pivot
designation is explicit input data rather than something inferred from the
stored entries.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InconsistentProfile,
    MissingPivot,
    PivotViolation,
    TailUndefined,
)

#: relative threshold below which a stored entry counts as a structural zero
STRUCT_TOL = 1e-12


@dataclass(frozen=True)
class TailProfile:
    """Values used when extending the banded tail beyond the stored size.

    ``edge`` is the value placed on the simultaneous row/column-edge
    diagonal; ``interior`` maps the offset d >= 1 (columns to the left of
    the edge) to the value filled there.  Offsets absent from the map are
    filled with zero.
    """

    edge: complex = 1.0 + 0j
    interior: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MatrixSpec:
    """Structural + numeric description of a truncatable matrix.

    Entries are stored for the upper triangle only (row <= col, 1-based);
    Hermitian symmetry supplies the rest.  ``pivot`` maps each represented
    column c > n to the row whose row-edge entry sits in that column.
    ``tail`` is the pair (j0, k0) where the regular banded tail starts, or
    None when the description is purely finite.
    """

    n: int
    n_max: int
    entries: dict
    pivot: dict
    tail: tuple = None
    tail_profile: TailProfile = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("boundary order n must be >= 1")
        if self.n_max < self.n:
            raise ValueError("declared size must be at least n")
        norm = {}
        for (j, k), v in self.entries.items():
            if j < 1 or k < 1:
                raise ValueError("entries use 1-based indices")
            if j > k:
                j, k, v = k, j, complex(v).conjugate()
            key = (j, k)
            v = complex(v)
            if key in norm and abs(norm[key] - v) > 1e-9 * max(1.0, abs(v)):
                raise ValueError(f"conflicting Hermitian values for entry {key}")
            norm[key] = v
        object.__setattr__(self, "entries", norm)
        object.__setattr__(self, "pivot", {int(c): int(r) for c, r in self.pivot.items()})
        if self.tail is not None:
            j0, k0 = self.tail
            if not k0 > j0 >= 1:
                raise ValueError("tail must satisfy k0 > j0 >= 1")
            object.__setattr__(self, "tail", (int(j0), int(k0)))

    def entry(self, j, k):
        """Entry (j, k) with Hermitian symmetry; zero when not stored."""
        if j > k:
            return self.entries.get((k, j), 0j).conjugate()
        return self.entries.get((j, k), 0j)

    def max_abs(self):
        return max((abs(v) for v in self.entries.values()), default=0.0)

    def struct_tol(self):
        return STRUCT_TOL * max(self.max_abs(), 1.0)

    def is_structural_nonzero(self, j, k):
        return abs(self.entry(j, k)) > self.struct_tol()

    def row_rightmost(self, j, upto=None):
        """Largest column <= upto holding a structural nonzero of row j (0 if none)."""
        upto = self.n_max if upto is None else upto
        best = 0
        for (a, b), v in self.entries.items():
            if abs(v) <= self.struct_tol():
                continue
            if a == j and b <= upto:
                best = max(best, b)
            if b == j and a <= upto:
                best = max(best, a)
        return best

    def column_topmost(self, k):
        """Smallest row holding a structural nonzero of column k (0 if none)."""
        best = 0
        for (a, b), v in self.entries.items():
            if abs(v) <= self.struct_tol():
                continue
            row = None
            if b == k:
                row = a
            elif a == k:
                row = b
            if row is not None:
                best = row if best == 0 else min(best, row)
        return best

    def resolved_tail_profile(self):
        """Tail profile with defaults filled in from the stored tail row."""
        if self.tail is None:
            raise TailUndefined("no tail declared")
        j0, k0 = self.tail
        if self.tail_profile is not None:
            interior = {int(d): complex(v) for d, v in self.tail_profile.interior.items()}
            return TailProfile(complex(self.tail_profile.edge), interior)
        edge = self.entry(j0, k0)
        if abs(edge) == 0.0:
            edge = 1.0 + 0j
        interior = {}
        for d in range(1, k0 - j0 + 1):
            v = self.entry(j0, k0 - d)
            if abs(v) > 0.0:
                interior[d] = v
        return TailProfile(edge, interior)


@dataclass(frozen=True)
class StructureInfo:
    """Structural data of one truncation: pivot duty and its complement.

    K collects the rows without a designated row edge inside the
    truncation; its cardinality always equals the boundary order.  gamma
    numbers the K rows in increasing order.
    """

    n: int
    N: int
    K: tuple
    K_perp: tuple
    gamma: dict
    pivot: dict
    tail: tuple = None


@dataclass(frozen=True)
class FiniteHermitian:
    """Dense N x N Hermitian matrix (an upper-left truncation)."""

    N: int
    data: np.ndarray

    def hermiticity_defect(self):
        return float(np.max(np.abs(self.data - self.data.conj().T)))


@dataclass(frozen=True)
class Violation:
    clause: str
    where: tuple
    message: str


@dataclass
class ValidationReport:
    """Outcome of a class-membership check; hard violations versus warnings."""

    target: str
    violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.violations

    def add(self, clause, where, message):
        self.violations.append(Violation(clause, tuple(where), message))

    def warn(self, clause, where, message):
        self.warnings.append(Violation(clause, tuple(where), message))

    def to_dict(self):
        return {
            "target": self.target,
            "passed": self.passed,
            "violations": [v.__dict__ for v in self.violations],
            "warnings": [v.__dict__ for v in self.warnings],
        }


def extend_tail(spec: MatrixSpec, N: int) -> MatrixSpec:
    """Extend the stored entries out to size N following the banded tail.

    New rows j0+m get their edge at column k0+m and interior values from
    the tail profile; the pivot map gains pivot(k0+m) = j0+m.  Already
    stored entries are never overwritten.
    """
    if N <= spec.n_max:
        return spec
    if spec.tail is None:
        raise TailUndefined(f"cannot extend to N={N}: no tail declared")
    j0, k0 = spec.tail
    profile = spec.resolved_tail_profile()
    entries = dict(spec.entries)
    pivot = dict(spec.pivot)
    for c_edge in range(max(k0, spec.n_max + 1), N + 1):
        m = c_edge - k0
        r = j0 + m
        if c_edge > spec.n:
            pivot.setdefault(c_edge, r)
        for c in range(max(r, spec.n_max + 1), c_edge + 1):
            d = c_edge - c
            val = profile.edge if d == 0 else profile.interior.get(d, 0j)
            if (r, c) not in entries and val != 0:
                entries[(r, c)] = val
    return MatrixSpec(spec.n, N, entries, pivot, spec.tail, spec.tail_profile)


def analyze_structure(spec: MatrixSpec, N: int) -> StructureInfo:
    """Split the rows of the N x N truncation into pivot duty and its complement."""
    if N <= spec.n:
        raise ValueError(f"truncation size must exceed n={spec.n}")
    if N > spec.n_max:
        spec = extend_tail(spec, N)
    pivot = {}
    for c in range(spec.n + 1, N + 1):
        if c not in spec.pivot:
            raise MissingPivot(f"column {c} has no designated pivot row")
        r = spec.pivot[c]
        if not 1 <= r < c:
            raise PivotViolation(f"pivot row {r} of column {c} must satisfy 1 <= r < c")
        if not spec.is_structural_nonzero(r, c):
            raise PivotViolation(f"pivot entry ({r},{c}) is zero")
        rightmost = spec.row_rightmost(r)
        if rightmost != c:
            raise PivotViolation(
                f"pivot entry ({r},{c}) is not the rightmost nonzero of row {r} "
                f"(found column {rightmost})"
            )
        pivot[c] = r
    rows = list(pivot.values())
    if len(set(rows)) != len(rows):
        raise PivotViolation("pivot map is not injective on the truncation")
    k_perp = tuple(sorted(rows))
    k_rows = tuple(sorted(set(range(1, N + 1)) - set(rows)))
    gamma = {k: i + 1 for i, k in enumerate(k_rows)}
    return StructureInfo(spec.n, N, k_rows, k_perp, gamma, pivot, spec.tail)


def truncate(spec: MatrixSpec, N: int) -> FiniteHermitian:
    """Dense Hermitian N x N upper-left corner, extending the tail if needed."""
    if N < 1:
        raise ValueError("truncation size must be >= 1")
    if N > spec.n_max:
        spec = extend_tail(spec, N)
    data = np.zeros((N, N), dtype=complex)
    for (j, k), v in spec.entries.items():
        if k <= N:
            data[j - 1, k - 1] = v
            if j != k:
                data[k - 1, j - 1] = v.conjugate()
    return FiniteHermitian(N, data)


def _row_edge_candidates(spec, column):
    """Rows whose rightmost stored nonzero lies exactly in the given column."""
    out = []
    for j in range(1, spec.n_max + 1):
        if spec.row_rightmost(j) == column:
            out.append(j)
    return out


def _check_condition1(spec, report):
    seen_rows = {}
    for c in range(spec.n + 1, spec.n_max + 1):
        if c not in spec.pivot:
            report.add("1", (c,), f"column {c} lacks a pivot row")
            continue
        r = spec.pivot[c]
        if not 1 <= r < c:
            report.add("1", (r, c), f"pivot row {r} of column {c} out of range")
            continue
        if not spec.is_structural_nonzero(r, c):
            report.add("1", (r, c), f"pivot entry ({r},{c}) is zero")
        rightmost = spec.row_rightmost(r)
        if rightmost > c:
            report.add(
                "1",
                (r, c),
                f"row {r} has a nonzero at column {rightmost}, right of its edge {c}",
            )
        if r in seen_rows:
            report.add("1", (r, c), f"row {r} pivots both columns {seen_rows[r]} and {c}")
        seen_rows[r] = c


def _check_condition2(spec, report):
    if spec.tail is None:
        report.add("2", (), "no tail (j0,k0) declared")
        return
    j0, k0 = spec.tail
    if k0 - j0 > spec.n:
        report.add("2", (j0, k0), f"tail offset {k0 - j0} exceeds boundary order {spec.n}")
    m = 0
    while k0 + m <= spec.n_max:
        r, c = j0 + m, k0 + m
        if c > spec.n and spec.pivot.get(c) != r:
            report.add("2", (r, c), f"tail column {c} is not pivoted by row {r}")
        if not spec.is_structural_nonzero(r, c):
            report.add("2", (r, c), f"tail entry ({r},{c}) is zero")
        else:
            if spec.row_rightmost(r) != c:
                report.add("2", (r, c), f"tail entry ({r},{c}) is not a row edge")
            top = spec.column_topmost(c)
            if top != r:
                report.add(
                    "2",
                    (r, c),
                    f"tail entry ({r},{c}) is not a column edge (nonzero at row {top})",
                )
        m += 1


def _check_n_minimality(spec, report):
    pivot_rows = set(spec.pivot.values())
    for l in range(1, spec.n):
        viable = True
        for c in range(l + 1, spec.n + 1):
            cands = [
                j
                for j in _row_edge_candidates(spec, c)
                if j not in pivot_rows and j < c
            ]
            if len(cands) != 1:
                viable = False
                break
        if viable:
            report.warn(
                "minimality-n",
                (l,),
                f"boundary order may not be minimal: l={l} also admits a pivot reading",
            )
            return


def _diag_is_simultaneous_edge(spec, j, k):
    """Whether the stored diagonal (j+m, k+m) consists of row+column edges."""
    m = 0
    any_checked = False
    while k + m <= spec.n_max:
        r, c = j + m, k + m
        any_checked = True
        if not spec.is_structural_nonzero(r, c):
            return False
        if spec.row_rightmost(r) != c or spec.column_topmost(c) != r:
            return False
        m += 1
    return any_checked


def _check_tail_minimality(spec, report):
    if spec.tail is None:
        return
    j0, k0 = spec.tail
    for j in range(1, j0 + 1):
        k_hi = k0 - 1 if j == j0 else min(j + spec.n, spec.n_max)
        for k in range(j + 1, k_hi + 1):
            if _diag_is_simultaneous_edge(spec, j, k):
                report.warn(
                    "minimality-tail",
                    (j, k),
                    f"tail may start earlier: diagonal from ({j},{k}) is simultaneous-edge",
                )
                return


def _check_mtilde(spec, report):
    cols = sorted(c for c in spec.pivot if spec.n < c <= spec.n_max)
    rows = [spec.pivot[c] for c in cols]
    for i in range(1, len(rows)):
        if rows[i] <= rows[i - 1]:
            report.add(
                "a",
                (cols[i - 1], cols[i]),
                f"pivot rows not strictly increasing: r({cols[i - 1]})={rows[i - 1]}, "
                f"r({cols[i]})={rows[i]}",
            )
    for c in cols:
        r = spec.pivot[c]
        top = spec.column_topmost(c)
        if top and top < r:
            report.add(
                "b",
                (r, c),
                f"row-edge entry ({r},{c}) is not a column edge: nonzero at row {top}",
            )


def validate_class(spec: MatrixSpec, which: str = "m") -> ValidationReport:
    """Check membership conditions for the base class or its band subclass.

    ``which`` is "m" (designated row edges plus a banded tail) or "mtilde"
    (additionally: strictly increasing pivot rows, and every row edge is a
    column edge).  Violations are reported, never raised; failed minimality
    of n or of the tail start only downgrades the report via warnings.
    """
    which = which.lower()
    if which not in ("m", "mtilde", "m_tilde"):
        raise ValueError("class must be 'm' or 'mtilde'")
    report = ValidationReport(target="mtilde" if which != "m" else "m")
    for (j, k), v in spec.entries.items():
        if j == k and abs(v.imag) > 1e-9 * max(1.0, abs(v)):
            report.add("hermitian", (j, k), f"diagonal entry ({j},{j}) is not real")
    _check_condition1(spec, report)
    _check_condition2(spec, report)
    _check_n_minimality(spec, report)
    _check_tail_minimality(spec, report)
    if which != "m":
        _check_mtilde(spec, report)
    return report


@dataclass(frozen=True)
class GenProfile:
    """Shape parameters for :func:`generate_random`."""

    n: int
    n_max: int
    tail: tuple = None
    pivot_rows: tuple = None
    degeneration_rows: tuple = None
    mtilde: bool = False
    complex_entries: bool = True
    density: float = 0.9


def _random_tail(profile, rng):
    n, n_max = profile.n, profile.n_max
    t = int(rng.integers(1, n + 1))
    j0_lo = max(1, n + 1 - t)
    j0_hi = n_max + 1 - t
    if t < n:
        # keep k0 >= n+2 so the unpivoted rows anchor right of column n
        j0_lo = max(j0_lo, n + 2 - t)
    if j0_hi < j0_lo:
        j0_lo, t = 1, n
        j0_hi = n_max + 1 - t
        if j0_hi < 1:
            raise InconsistentProfile("declared size too small for any tail")
    j0 = int(rng.integers(j0_lo, j0_hi + 1))
    return j0, j0 + t


def _assign_pivots(profile, tail, rng):
    """Injection columns (n, k0) -> rows [1, j0) with r(c) < c."""
    n = profile.n
    j0, k0 = tail
    columns = list(range(n + 1, k0))
    rows_pool = list(range(1, j0))
    if len(columns) > len(rows_pool):
        raise InconsistentProfile("not enough rows before the tail to pivot every column")
    if profile.pivot_rows is not None:
        rows = [int(r) for r in profile.pivot_rows]
        if len(rows) != len(columns):
            raise InconsistentProfile(
                f"expected {len(columns)} pivot rows for columns {n + 1}..{k0 - 1}"
            )
        assignment = dict(zip(columns, rows))
    elif profile.mtilde:
        rows = sorted(rng.choice(rows_pool, size=len(columns), replace=False).tolist())
        assignment = dict(zip(columns, rows))
    else:
        assignment = {}
        used = set()
        for c in columns:
            options = [r for r in rows_pool if r not in used and r < c]
            r = int(options[rng.integers(0, len(options))])
            assignment[c] = r
            used.add(r)
    for c, r in assignment.items():
        if not 1 <= r < c:
            raise InconsistentProfile(f"pivot row {r} invalid for column {c}")
    if len(set(assignment.values())) != len(assignment):
        raise InconsistentProfile("pivot rows repeat")
    # avoid an accidental simultaneous-edge diagonal gluing onto the tail
    if (
        columns
        and profile.pivot_rows is None
        and assignment[k0 - 1] == j0 - 1
        and len(rows_pool) > len(columns)
    ):
        spare = max(r for r in rows_pool if r not in assignment.values())
        if profile.mtilde:
            # replace the largest row and renumber increasingly
            rows = sorted(set(assignment.values()) - {j0 - 1} | {spare})
            assignment = dict(zip(columns, rows))
        else:
            assignment[k0 - 1] = spare
    degens = sorted(set(rows_pool) - set(assignment.values()))
    if profile.degeneration_rows is not None:
        if sorted(int(r) for r in profile.degeneration_rows) != degens:
            raise InconsistentProfile(
                f"degeneration rows {degens} implied by pivots do not match the profile"
            )
    return assignment, degens


def _sample_value(rng, complex_entries, lo=0.0, hi=1.0):
    mag = rng.uniform(lo, hi)
    if complex_entries:
        phase = np.exp(2j * np.pi * rng.uniform())
        return mag * phase
    return mag * (1.0 if rng.uniform() < 0.5 else -1.0)


def generate_random(profile: GenProfile, seed: int) -> MatrixSpec:
    """Deterministic random instance passing the class validator.

    Edge entries are sampled with magnitude in [0.5, 1.5]; interior entries
    stay within the support allowed by the declared structure, so the
    result always validates (for "mtilde" when the profile forces it).
    """
    rng = np.random.default_rng(seed)
    n, n_max = profile.n, profile.n_max
    if n < 1 or n_max < n + 1:
        raise InconsistentProfile("need n >= 1 and declared size > n")
    tail = tuple(profile.tail) if profile.tail is not None else _random_tail(profile, rng)
    j0, k0 = tail
    t = k0 - j0
    if not 1 <= t <= n:
        raise InconsistentProfile("tail offset must lie in 1..n")
    if k0 < n + 1:
        raise InconsistentProfile("tail must start beyond the boundary columns")
    assignment, degens = _assign_pivots(profile, tail, rng)
    pivot = dict(assignment)
    for c in range(max(k0, n + 1), n_max + 1):
        pivot[c] = c - t
    if len(pivot) != n_max - n:
        raise InconsistentProfile("pivot columns do not cover the declared size")

    edge_col = {r: c for c, r in pivot.items()}

    def allowed(j, k):
        e = edge_col.get(j)
        if e is not None and k > e:
            return False
        if k >= k0:
            if j < k - t:
                return False
        elif profile.mtilde and k in pivot and j < pivot[k]:
            return False
        return True

    entries = {}
    for c, r in pivot.items():
        if c <= n_max:
            entries[(r, c)] = _sample_value(rng, profile.complex_entries, 0.5, 1.5)
    for j in range(1, n_max + 1):
        for k in range(j, n_max + 1):
            if (j, k) in entries or not allowed(j, k):
                continue
            if rng.uniform() > profile.density:
                continue
            if j == k:
                entries[(j, k)] = complex(rng.uniform(-1.0, 1.0))
            else:
                entries[(j, k)] = _sample_value(rng, profile.complex_entries, 0.05, 1.0)
    for j in degens:
        anchor = max((k for k in range(j, n_max + 1) if allowed(j, k)), default=None)
        if anchor is not None and anchor > j:
            entries[(j, anchor)] = _sample_value(rng, profile.complex_entries, 0.5, 1.5)
    return MatrixSpec(n, n_max, entries, pivot, tail, None)

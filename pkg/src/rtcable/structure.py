"""Sparsity structure of R_m and its determinant by cofactor elimination.

For r coprime to q, every column of R_m holds at most two unit monomials, and
for r > q + 6 exactly two rows (the sentinel rows) hold a single nonzero.
Expanding along single-nonzero rows one at a time then never branches, so
det R_m is a signed monomial.  The checks here work on the nonzero pattern
(absolute values); literal signs only enter the determinant itself.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Any

from rtcable.cabling import RmMatrix, build_Rm
from rtcable.cyclotomic import CycElem, Monomial, eval_complex, mono_mul
from rtcable.errors import PreconditionError, StructureError
from rtcable.params import CableParams

__all__ = [
    "Category",
    "DetTraceStep",
    "ScheduleCheck",
    "StructureReport",
    "classify",
    "cofactor_det",
    "expansion_schedule",
    "check_schedule",
    "find_lprime",
    "find_lstar",
    "gh_violations",
    "pairing_violations",
    "sentinel_rows",
    "verify_structure",
    "zero_rows",
]


class Category(enum.Enum):
    """Form of the reduced index of e_{ql+-1} = e_{kr+j}: C if j <= m, D if
    j > m; suffix e/o is the parity of k."""

    C_e = "C_e"
    D_e = "D_e"
    C_o = "C_o"
    D_o = "D_o"


def classify(l: int, sign: int, params: CableParams) -> tuple[Category, int, int]:
    if not 1 <= l <= params.m - 1:
        raise ValueError(f"l must lie in [1, {params.m - 1}], got {l}")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    k, j = divmod(params.q * l + sign, params.r)
    low = j <= params.m
    if k % 2 == 0:
        cat = Category.C_e if low else Category.D_e
    else:
        cat = Category.C_o if low else Category.D_o
    return cat, k, j


def _reduced_abs(l: int, sign: int, params: CableParams) -> tuple[str, int]:
    """('g', ql - kr +- 1) when j <= m, else ('h', (k+1)r - ql -+ 1)."""
    k, j = divmod(params.q * l + sign, params.r)
    if j <= params.m:
        return "g", params.q * l - k * params.r + sign
    return "h", (k + 1) * params.r - params.q * l - sign


def _require_coprime(params: CableParams) -> None:
    if params.level_gcd != 1:
        raise PreconditionError(f"r and q must be coprime, gcd={params.level_gcd} for {params}")


def _require_large(params: CableParams) -> None:
    _require_coprime(params)
    if not params.large_level:
        raise PreconditionError(f"need r > q + 6, got {params}")


def find_lstar(params: CableParams) -> int:
    """The unique l in [1, m] with r dividing ql + 1 or ql - 1.

    Found by a linear scan and independently from the modular inverse of q;
    the two must agree and the scan must find exactly one solution.
    """
    _require_coprime(params)
    q, r, m = params.q, params.r, params.m
    scan = [l for l in range(1, m + 1) if (q * l + 1) % r == 0 or (q * l - 1) % r == 0]
    # q*x' = 1 (mod r) and q*x = -1 (mod r); the two residues sum to r
    s_plus = pow(q, -1, r)
    s_minus = (-s_plus) % r
    bezout = s_plus if s_plus <= m else s_minus
    if len(scan) != 1:
        raise StructureError(f"expected exactly one l* in [1, {m}], found {scan} for {params}")
    if scan[0] != bezout or not 1 <= bezout <= m:
        raise StructureError(f"scan l*={scan[0]} disagrees with modular-inverse l*={bezout}")
    return bezout


def sentinel_rows(params: CableParams) -> tuple[int, int]:
    """Closed-form rows expected to carry a single nonzero.

    q even: q/2 - 1 and q/2 + 1.  q odd: m - (q+1)/2 and m - (q-3)/2.  The
    values are returned as given by the formulas even if they fall outside
    [1, m] (which happens for q = 1 and q = 2).
    """
    _require_large(params)
    q, m = params.q, params.m
    if q % 2 == 0:
        return q // 2 - 1, q // 2 + 1
    return m - (q + 1) // 2, m - (q - 3) // 2


def _adjacent_columns(rm: RmMatrix) -> list[int]:
    out = []
    for l in range(1, rm.dim):
        rows = rm.cols[l].support()
        if len(rows) == 2 and rows[1] - rows[0] == 1:
            out.append(l)
    return out


def find_lprime(params: CableParams) -> int:
    """The unique l in [1, m-1] whose column has nonzeros in adjacent rows,
    which must be rows m-1 and m."""
    _require_large(params)
    rm = build_Rm(params)
    adj = _adjacent_columns(rm)
    if len(adj) != 1:
        raise StructureError(f"expected one column with adjacent nonzero rows, found l in {adj} for {params}")
    l = adj[0]
    if rm.cols[l].support() != [params.m - 1, params.m]:
        raise StructureError(f"column l={l} has rows {rm.cols[l].support()}, expected [m-1, m]")
    return l


def zero_rows(params: CableParams) -> list[int]:
    """Rows d, 2d, ... of R_m, d = gcd(r, q) > 1, confirmed identically zero."""
    d = params.level_gcd
    if d == 1:
        raise PreconditionError(f"r and q are coprime for {params}; R_m has no forced zero rows")
    rows = list(range(d, params.m + 1, d))
    counts = build_Rm(params).row_counts()
    bad = [i for i in rows if counts[i - 1]]
    if bad:
        raise StructureError(f"rows {bad} should vanish for {params}")
    return rows


@dataclass(frozen=True)
class DetTraceStep:
    row: int
    col: int
    entry: Monomial
    sign: int  # (-1)^(row+col) with positions taken inside the current minor


def _eliminate(rm: RmMatrix, order: list[int] | None = None):
    """Expand along single-nonzero rows.

    With ``order`` None the smallest available single-nonzero row is taken at
    each step; otherwise rows are taken in the given order and each must have
    exactly one surviving nonzero.  Returns (det, trace), with det the zero
    monomial if a row is empty.  Raises StructureError on a stall.
    """
    sys = rm.sys
    row_cols = {i: set(cs) for i, cs in rm.rows_of().items()}
    col_rows: dict[int, set[int]] = defaultdict(set)
    for i, cs in row_cols.items():
        for c in cs:
            col_rows[c].add(i)
    alive_rows = list(range(1, rm.dim + 1))
    alive_cols = list(range(1, rm.dim + 1))
    acc = Monomial.ONE
    trace: list[DetTraceStep] = []
    queue = list(order) if order is not None else None
    while alive_rows:
        if queue is None:
            if any(not row_cols[i] for i in alive_rows):
                return Monomial.ZERO, trace
            singles = [i for i in alive_rows if len(row_cols[i]) == 1]
            if not singles:
                raise StructureError(
                    f"elimination stalled with {len(alive_rows)} rows left; no single-nonzero row"
                )
            row = singles[0]
        else:
            if not queue:
                raise StructureError("schedule exhausted before the matrix was")
            row = queue.pop(0)
            if row not in row_cols or row not in alive_rows:
                raise StructureError(f"schedule row {row} is not an uneliminated row")
            if len(row_cols[row]) != 1:
                raise StructureError(
                    f"schedule row {row} has {len(row_cols[row])} surviving nonzeros, expected 1"
                )
        (col,) = row_cols[row]
        entry = rm.monomial(row, col)
        if entry is None:
            raise StructureError(f"entry ({row}, {col}) is not a single monomial")
        sgn = -1 if (alive_rows.index(row) + alive_cols.index(col)) % 2 else 1
        acc = mono_mul(acc, Monomial(sgn, 0), sys)
        acc = mono_mul(acc, entry, sys)
        trace.append(DetTraceStep(row, col, entry, sgn))
        alive_rows.remove(row)
        alive_cols.remove(col)
        del row_cols[row]
        for other in col_rows.pop(col):
            if other in row_cols:
                row_cols[other].discard(col)
    return acc, trace


def cofactor_det(params: CableParams) -> tuple[Monomial, list[DetTraceStep]]:
    """det R_m as a signed monomial, with the elimination trace.

    A matrix with an empty row gets the zero monomial.  Raises StructureError
    when no single-nonzero row is left before the matrix is exhausted.
    """
    return _eliminate(build_Rm(params))


def expansion_schedule(params: CableParams) -> list[list[int]]:
    """Rows of the four-step hand expansion, by q mod 4 and parity of m.

    Step 1 is the lower sentinel row, step 2 walks down from it by two, step 3
    walks up from the upper sentinel row by two, and step 4 sweeps the rows of
    the other parity from the top.  Requires the sentinel rows to lie in
    [1, m].
    """
    im, ip = sentinel_rows(params)
    q, m = params.q, params.m
    if not (1 <= im <= m and 1 <= ip <= m):
        raise PreconditionError(f"sentinel rows ({im}, {ip}) fall outside [1, {m}]")
    even_m = m % 2 == 0

    def down(start: int, stop: int) -> list[int]:
        return list(range(start, stop - 1, -2)) if start >= stop else []

    def up(start: int, stop: int) -> list[int]:
        return list(range(start, stop + 1, 2)) if start <= stop else []

    case = q % 4
    if case == 0:
        s2 = down(im - 2, 1)
        s3 = up(ip, m - 1 if even_m else m)
        s4 = down(m, 2) if even_m else down(m - 1, 2)
    elif case == 1:
        s2 = down(im - 2, 1) if even_m else down(im - 2, 2)
        s3 = up(ip, m - 1)
        s4 = down(m, 2) if even_m else down(m, 1)
    elif case == 2:
        s2 = down(im - 2, 2)
        s3 = up(ip, m) if even_m else up(ip, m - 1)
        # odd m: the sweep starts at row m; starting at m - 2 would leave row m
        # uneliminated
        s4 = down(m - 1, 1) if even_m else down(m, 1)
    else:
        s2 = down(im - 2, 2) if even_m else down(im - 2, 1)
        s3 = up(ip, m)
        s4 = down(m - 1, 1) if even_m else down(m - 1, 2)
    return [[im], s2, s3, s4]


@dataclass
class ScheduleCheck:
    applicable: bool
    valid: bool | None = None
    agrees_with_greedy: bool | None = None
    final_row: int | None = None
    final_col: int | None = None
    final_is_lstar: bool | None = None
    reason: str = ""


def check_schedule(params: CableParams, greedy_det: Monomial | None = None) -> ScheduleCheck:
    """Run the four-step expansion and compare it with greedy elimination.

    Applicable only when r, q are coprime, r > q + 6, both sentinel rows lie in
    [1, m] and l* <= m - 1; otherwise the reason is recorded.
    """
    if params.level_gcd != 1 or not params.large_level:
        return ScheduleCheck(False, reason="needs gcd(r, q) = 1 and r > q + 6")
    im, ip = sentinel_rows(params)
    if not (1 <= im <= params.m and 1 <= ip <= params.m):
        return ScheduleCheck(False, reason=f"sentinel rows ({im}, {ip}) outside [1, {params.m}]")
    lstar = find_lstar(params)
    if lstar > params.m - 1:
        return ScheduleCheck(False, reason=f"l* = m = {lstar}; no single-entry l* column")
    order = [row for step in expansion_schedule(params) for row in step]
    if sorted(order) != list(range(1, params.m + 1)):
        return ScheduleCheck(True, valid=False, reason=f"schedule rows are not a permutation of 1..m: {order}")
    try:
        det, trace = _eliminate(build_Rm(params), order)
    except StructureError as exc:
        return ScheduleCheck(True, valid=False, reason=str(exc))
    if greedy_det is None:
        greedy_det, _ = cofactor_det(params)
    last = trace[-1]
    return ScheduleCheck(
        True,
        valid=True,
        agrees_with_greedy=det == greedy_det,
        final_row=last.row,
        final_col=last.col,
        final_is_lstar=last.col == lstar + 1,
    )


def pairing_violations(params: CableParams) -> list[dict[str, Any]]:
    """Coincidences of reduced f-components that break the category rule.

    For l1 != l2 in [1, m-1], components with the same sign that reduce to the
    same e_i must come from categories {C_e, D_o} or {D_e, C_o}; components of
    opposite sign that coincide must share a category.
    """
    buckets: dict[int, list[tuple[int, int, Category]]] = defaultdict(list)
    for l in range(1, params.m):
        for s in (1, -1):
            cat, k, j = classify(l, s, params)
            idx = j if j <= params.m else params.r - j
            if idx:
                buckets[idx].append((l, s, cat))
    cross = ({Category.C_e, Category.D_o}, {Category.D_e, Category.C_o})
    out = []
    for idx, items in sorted(buckets.items()):
        for a in range(len(items)):
            for b in range(a + 1, len(items)):
                l1, s1, c1 = items[a]
                l2, s2, c2 = items[b]
                if l1 == l2:
                    continue
                if s1 == s2:
                    kind = "alpha" if s1 == 1 else "gamma"
                    ok = {c1, c2} in cross
                else:
                    kind = "beta"
                    ok = c1 == c2
                if not ok:
                    out.append(dict(kind=kind, index=idx, l1=l1, s1=s1, cat1=c1.value, l2=l2, s2=s2, cat2=c2.value))
    return out


def gh_violations(params: CableParams) -> list[dict[str, Any]]:
    """Solutions of the excluded coincidences g=g (same sign), g=h (opposite
    sign) and h=h (same sign) among reduced f-components, l in [1, m-1]."""
    buckets: dict[int, list[tuple[int, int, str]]] = defaultdict(list)
    for l in range(1, params.m):
        for s in (1, -1):
            form, value = _reduced_abs(l, s, params)
            buckets[value].append((l, s, form))
    out = []
    for value, items in sorted(buckets.items()):
        for a in range(len(items)):
            for b in range(a + 1, len(items)):
                (l1, s1, f1), (l2, s2, f2) = items[a], items[b]
                same_form_same_sign = f1 == f2 and s1 == s2 and l1 != l2
                cross_opposite = f1 != f2 and s1 != s2
                if same_form_same_sign or cross_opposite:
                    out.append(dict(value=value, l1=l1, s1=s1, form1=f1, l2=l2, s2=s2, form2=f2))
    return out


STRUCTURE_CLAUSES = (
    "col_nonzeros_at_most_2",
    "row_nonzeros_at_most_2",
    "first_col_is_e1",
    "col_row_spread_at_most_2",
    "lstar_unique",
    "lstar_col_single_at_row_2",
    "entries_unit_monomials",
    "only_first_and_lstar_cols_single",
    "sentinel_rows_in_range",
    "sentinel_rows_single",
    "sentinel_cols_distinct",
    "sentinel_cols_avoid_first_and_lstar",
    "sentinel_q4_first_col",
    "sentinel_q6_lstar_col",
    "other_rows_exactly_2",
    "nonzero_count_2m_minus_2",
    "lprime_unique_bottom_rows",
    "lstar_at_most_m_minus_1",
)


@dataclass
class StructureReport:
    p: int
    q: int
    r: int
    m: int
    level_gcd: int
    l_star: int | None = None
    l_prime: int | None = None
    i_minus: int | None = None
    i_plus: int | None = None
    l_minus_col: int | None = None
    l_plus_col: int | None = None
    single_rows_scan: list[int] = field(default_factory=list)
    zero_rows: list[int] = field(default_factory=list)
    row_counts: list[int] = field(default_factory=list)
    col_counts: list[int] = field(default_factory=list)
    clause_results: dict[str, bool | None] = field(default_factory=dict)
    det_monomial: Monomial | None = None
    det_error: str | None = None
    schedule_trace: list[DetTraceStep] = field(default_factory=list)
    schedule: ScheduleCheck | None = None
    pairing_violations: int = 0
    gh_violations: int = 0
    notes: list[str] = field(default_factory=list)

    def failed_clauses(self) -> list[str]:
        return [k for k, v in self.clause_results.items() if v is False]

    def all_clauses_pass(self) -> bool:
        """True when no clause failed; clauses whose hypotheses do not hold count as passed."""
        return not self.failed_clauses()

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["clause_results"] = {
            k: ("n/a" if v is None else "pass" if v else "fail") for k, v in self.clause_results.items()
        }
        d["det_monomial"] = None if self.det_monomial is None else asdict(self.det_monomial)
        d["schedule_trace"] = [
            dict(row=s.row, col=s.col, sign=s.entry.sign, exp=s.entry.exp, minor_sign=s.sign)
            for s in self.schedule_trace
        ]
        return d


def verify_structure(params: CableParams) -> StructureReport:
    """Check every sparsity clause on the built R_m and record the outcomes.

    Clauses that need gcd(r, q) = 1 or r > q + 6 are recorded as None when the
    hypothesis does not hold.  Nothing is raised for a failing clause.
    """
    rm = build_Rm(params)
    m, q = params.m, params.q
    rep = StructureReport(params.p, q, params.r, m, params.level_gcd)
    rep.row_counts = rm.row_counts()
    rep.col_counts = rm.col_counts()
    rows_of = rm.rows_of()
    res = {k: None for k in STRUCTURE_CLAUSES}
    coprime = params.level_gcd == 1

    if not coprime:
        rep.zero_rows = zero_rows(params)
        rep.notes.append(f"gcd(r, q) = {params.level_gcd}: rows {rep.zero_rows} vanish, R_m is singular")

    res["col_nonzeros_at_most_2"] = max(rep.col_counts) <= 2
    res["row_nonzeros_at_most_2"] = max(rep.row_counts) <= 2
    res["first_col_is_e1"] = rm.cols[0].entries == {1: CycElem.from_monomial(Monomial.ONE)}
    res["col_row_spread_at_most_2"] = all(
        v.support()[1] - v.support()[0] <= 2 for v in rm.cols[1:] if len(v.items) == 2
    )
    res["entries_unit_monomials"] = rm.is_monomial() and all(
        abs(abs(eval_complex(c, params.sys)) - 1.0) < 1e-12 for v in rm.cols for _, c in v.items
    )

    if coprime:
        try:
            rep.l_star = find_lstar(params)
            res["lstar_unique"] = True
        except StructureError as exc:
            res["lstar_unique"] = False
            rep.notes.append(str(exc))
        if rep.l_star is not None and rep.l_star <= m - 1:
            col = rm.cols[rep.l_star]
            res["lstar_col_single_at_row_2"] = col.support() == [2]
            singles = sorted(c for c, n in enumerate(rep.col_counts, start=1) if n != 2)
            res["only_first_and_lstar_cols_single"] = singles == [1, rep.l_star + 1]
        elif rep.l_star is not None:
            rep.notes.append(f"l* = m = {m}: no column of R_m carries the l* entry")

    rep.single_rows_scan = [i for i, n in enumerate(rep.row_counts, start=1) if n == 1]

    if coprime and params.large_level:
        im, ip = sentinel_rows(params)
        rep.i_minus, rep.i_plus = im, ip
        in_range = 1 <= im <= m and 1 <= ip <= m
        res["sentinel_rows_in_range"] = in_range
        if rep.single_rows_scan != sorted({im, ip}):
            rep.notes.append(
                f"single-nonzero rows by scan {rep.single_rows_scan} differ from closed forms ({im}, {ip})"
            )
        if in_range:
            res["sentinel_rows_single"] = len(rows_of[im]) == 1 and len(rows_of[ip]) == 1
            if res["sentinel_rows_single"]:
                rep.l_minus_col, rep.l_plus_col = rows_of[im][0], rows_of[ip][0]
                res["sentinel_cols_distinct"] = rep.l_minus_col != rep.l_plus_col
                lcol = None if rep.l_star is None else rep.l_star + 1
                pair = {rep.l_minus_col, rep.l_plus_col}
                if q % 2 == 1 or q >= 8:
                    res["sentinel_cols_avoid_first_and_lstar"] = 1 not in pair and lcol not in pair
                if q % 2 == 0:
                    res["sentinel_q4_first_col"] = (rep.l_minus_col == 1) == (q == 4)
                    res["sentinel_q6_lstar_col"] = (rep.l_minus_col == lcol) == (q == 6)
            else:
                res["sentinel_cols_distinct"] = False
            res["other_rows_exactly_2"] = all(
                n == 2 for i, n in enumerate(rep.row_counts, start=1) if i not in (im, ip)
            )
        else:
            res["sentinel_rows_single"] = False
            res["sentinel_cols_distinct"] = False
            res["other_rows_exactly_2"] = False
        res["nonzero_count_2m_minus_2"] = rm.nnz() == 2 * m - 2
        try:
            rep.l_prime = find_lprime(params)
            res["lprime_unique_bottom_rows"] = True
        except StructureError as exc:
            res["lprime_unique_bottom_rows"] = False
            rep.notes.append(str(exc))
        res["lstar_at_most_m_minus_1"] = rep.l_star is not None and 1 <= rep.l_star <= m - 1

    rep.clause_results = res

    try:
        rep.det_monomial, rep.schedule_trace = cofactor_det(params)
    except StructureError as exc:
        rep.det_error = str(exc)
    if coprime and params.large_level:
        rep.schedule = check_schedule(params, rep.det_monomial)
    if coprime and m >= 2:
        rep.pairing_violations = len(pairing_violations(params))
        rep.gh_violations = len(gh_violations(params))
    return rep


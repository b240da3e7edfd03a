"""Sparse exact linear algebra over a field.

Vectors are ``dict`` maps from column index to a nonzero field element.
Row reduction, rank and kernels are computed by sympy's sparse
``DomainMatrix`` over ``QQ_I``, or over ``QQ`` when the inputs are
``Fraction`` values; results come back in the caller's scalar type.
"""
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

SparseVec = Dict[int, Any]
LinearMap = Dict[int, SparseVec]


def clean(vec: SparseVec) -> SparseVec:
    return {c: v for c, v in vec.items() if v}


def axpy(target: SparseVec, coeff: Any, vec: SparseVec) -> None:
    """target += coeff * vec, in place; drops entries that cancel."""
    if not coeff:
        return
    for col, value in vec.items():
        new = target[col] + coeff * value if col in target else coeff * value
        if new:
            target[col] = new
        else:
            target.pop(col, None)


def scale(vec: SparseVec, coeff: Any) -> SparseVec:
    if not coeff:
        return {}
    return clean({c: coeff * v for c, v in vec.items()})


def add(a: SparseVec, b: SparseVec) -> SparseVec:
    out = dict(a)
    axpy(out, 1, b)
    return out


def sub(a: SparseVec, b: SparseVec) -> SparseVec:
    out = dict(a)
    axpy(out, -1, b)
    return out


def same(a: SparseVec, b: SparseVec) -> bool:
    return not sub(a, b)


class _Field(NamedTuple):
    domain: Any
    to_domain: Callable[[Any], Any]
    from_domain: Callable[[Any], Any]


def _fraction_in(value: Any) -> Any:
    frac = Fraction(value)
    return QQ(frac.numerator, frac.denominator)


def _fraction_out(value: Any) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


def _field_of(rows: Iterable[SparseVec]) -> _Field:
    """QQ for Fraction data, QQ_I for everything else."""
    values = [v for row in rows for v in row.values()]
    if values and all(isinstance(v, (Fraction, int)) for v in values):
        return _Field(QQ, _fraction_in, _fraction_out)
    return _Field(QQ_I, QQ_I.convert, lambda v: v)


def _matrix(rows: Sequence[SparseVec], n_cols: int, field: _Field) -> DomainMatrix:
    entries = {i: {c: field.to_domain(v) for c, v in row.items()} for i, row in enumerate(rows) if row}
    return DomainMatrix(entries, (len(rows), n_cols), field.domain)


def _width(rows: Iterable[SparseVec], n_cols: Optional[int] = None) -> int:
    return max([n_cols or 0] + [max(row) + 1 for row in rows if row])


class EchelonBasis:
    """Reduced row echelon basis of a subspace.

    Rows are keyed by pivot column, the pivot is the smallest column of the
    row, pivot entries are 1 and every pivot column is zero in all other rows.
    """

    def __init__(self, vectors: Iterable[SparseVec] = (), n_cols: Optional[int] = None):
        rows = [r for r in (clean(v) for v in vectors) if r]
        self.n_cols = _width(rows, n_cols)
        self.rows: Dict[int, SparseVec] = {}
        if not rows:
            return
        field = _field_of(rows)
        reduced, pivots = _matrix(rows, self.n_cols, field).rref()
        table = reduced.to_sdm()
        for i, pivot in enumerate(pivots):
            self.rows[pivot] = {c: field.from_domain(v) for c, v in table[i].items()}

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> List[int]:
        return sorted(self.rows)

    def reduce(self, vec: SparseVec) -> SparseVec:
        """Normal form of ``vec`` modulo the span: zero on every pivot column."""
        out = clean(vec)
        for pivot in [c for c in out if c in self.rows]:
            axpy(out, -out[pivot], self.rows[pivot])
        return out

    def contains(self, vec: SparseVec) -> bool:
        return not self.reduce(vec)

    def free_columns(self, n_cols: int) -> List[int]:
        return [c for c in range(n_cols) if c not in self.rows]


def rank(vectors: Iterable[SparseVec]) -> int:
    rows = [r for r in (clean(v) for v in vectors) if r]
    if not rows:
        return 0
    return _matrix(rows, _width(rows), _field_of(rows)).rank()


def solve(equations: Sequence[SparseVec], rhs: Sequence[Any], n_unknowns: int) -> Optional[SparseVec]:
    """One solution of ``equations[i] . x = rhs[i]``, or None if inconsistent.

    The right-hand side is carried as column ``n_unknowns``; a pivot there
    means the system reads 0 = 1. Free unknowns are set to zero.
    """
    augmented = []
    for row, value in zip(equations, rhs):
        aug = clean(row)
        if value:
            aug[n_unknowns] = value
        augmented.append(aug)
    basis = EchelonBasis(augmented, n_cols=n_unknowns + 1)
    if n_unknowns in basis.rows:
        return None
    return clean({p: row.get(n_unknowns, 0) for p, row in basis.rows.items()})


def kernel(vectors: Sequence[SparseVec]) -> List[SparseVec]:
    """Basis of {x : sum_j x_j * vectors[j] = 0} over ``len(vectors)`` unknowns.

    One vector per free column, with a 1 in that column.
    """
    n = len(vectors)
    # transpose: equation per coordinate column
    equations: Dict[int, SparseVec] = {}
    for j, vec in enumerate(vectors):
        for col, value in clean(vec).items():
            equations.setdefault(col, {})[j] = value
    field = _field_of(list(equations.values()) or [v for v in vectors])
    if not equations:
        return [{j: field.from_domain(field.domain.one)} for j in range(n)]
    reduced, pivots = _matrix(list(equations.values()), n, field).rref()
    null = reduced.nullspace_from_rref(pivots).to_sdm()
    return [{c: field.from_domain(v) for c, v in null[i].items()} for i in sorted(null)]

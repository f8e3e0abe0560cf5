"""Exact matrices over an interned ring, with the linear algebra the workloads need.

Everything here is exact: rational row reduction uses ``Fraction``, prime
field determinants use machine integers reduced mod p, and nothing ever
rounds.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from ..errors import ValidationError
from .polynomials import Polynomial
from .primes import is_prime
from .rings import (
    ContextHandle,
    IntegerRing,
    PrimeField,
    RationalField,
    UnivariatePolyRing,
    MultivariatePolyRing,
    domain_for,
    intern_context,
)


class ExactMatrix:
    __slots__ = ("parent", "nrows", "ncols", "entries")

    def __init__(self, parent: ContextHandle, nrows: int, ncols: int, entries):
        if nrows < 0 or ncols < 0:
            raise ValidationError("matrix dimensions must be nonnegative")
        domain = domain_for(parent.descriptor)
        entries = tuple(domain.coerce(e) for e in entries)
        if len(entries) != nrows * ncols:
            raise ValidationError(
                f"expected {nrows * ncols} entries for a {nrows}x{ncols} matrix, got {len(entries)}"
            )
        self.parent = parent
        self.nrows = nrows
        self.ncols = ncols
        self.entries = entries

    @classmethod
    def from_rows(cls, parent: ContextHandle, rows):
        rows = [list(r) for r in rows]
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValidationError("ragged rows")
        return cls(parent, nrows, ncols, [e for r in rows for e in r])

    @classmethod
    def zero(cls, parent: ContextHandle, nrows: int, ncols: int):
        domain = domain_for(parent.descriptor)
        return cls(parent, nrows, ncols, [domain.zero] * (nrows * ncols))

    def entry(self, i: int, j: int):
        return self.entries[i * self.ncols + j]

    def row(self, i: int):
        return list(self.entries[i * self.ncols : (i + 1) * self.ncols])

    def rows(self):
        return [self.row(i) for i in range(self.nrows)]

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def transpose(self) -> "ExactMatrix":
        entries = [self.entry(i, j) for j in range(self.ncols) for i in range(self.nrows)]
        return ExactMatrix(self.parent, self.ncols, self.nrows, entries)

    def __add__(self, other):
        self._check_compat(other)
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValidationError("matrix shapes differ")
        domain = domain_for(self.parent.descriptor)
        entries = [domain.add(a, b) for a, b in zip(self.entries, other.entries)]
        return ExactMatrix(self.parent, self.nrows, self.ncols, entries)

    def __mul__(self, other):
        self._check_compat(other)
        if self.ncols != other.nrows:
            raise ValidationError("inner matrix dimensions differ")
        domain = domain_for(self.parent.descriptor)
        entries = []
        for i in range(self.nrows):
            for j in range(other.ncols):
                acc = domain.zero
                for k in range(self.ncols):
                    acc = domain.add(acc, domain.mul(self.entry(i, k), other.entry(k, j)))
                entries.append(acc)
        return ExactMatrix(self.parent, self.nrows, other.ncols, entries)

    def _check_compat(self, other):
        if not isinstance(other, ExactMatrix):
            raise TypeError(f"cannot combine ExactMatrix with {type(other).__name__}")
        if other.parent != self.parent:
            raise ValidationError("matrices over different rings")

    def __eq__(self, other):
        return (
            isinstance(other, ExactMatrix)
            and self.parent == other.parent
            and (self.nrows, self.ncols) == (other.nrows, other.ncols)
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.parent, self.nrows, self.ncols, self.entries))

    def __repr__(self):
        return f"ExactMatrix({self.nrows}x{self.ncols} over {self.parent.descriptor!r})"


# ----------------------------------------------------------------------------
# Modular reduction ZZ[...] -> Fp[...]
# ----------------------------------------------------------------------------


def reduce_poly_mod_prime(p: Polynomial, prime: int) -> Polynomial:
    """Reduce a polynomial with integer coefficients mod ``prime``."""
    desc = p.parent.descriptor
    if not isinstance(desc, (UnivariatePolyRing, MultivariatePolyRing)):
        raise ValidationError("expected a polynomial over a polynomial ring")
    if not isinstance(desc.base, IntegerRing):
        raise ValidationError("reduction needs integer coefficients")
    if not is_prime(prime):
        raise ValidationError(f"{prime} is not prime")
    if isinstance(desc, UnivariatePolyRing):
        target_desc = UnivariatePolyRing(PrimeField(prime), desc.symbol)
    else:
        target_desc = MultivariatePolyRing(PrimeField(prime), desc.symbols)
    target = intern_context(target_desc)
    terms = [(m, c % prime) for m, c in p.terms]
    return Polynomial(target, [(m, c) for m, c in terms if c != 0])


def reduce_mod_prime(m: ExactMatrix, prime: int) -> ExactMatrix:
    """Entry-wise reduction of a matrix over ZZ[t] to one over Fp[t]."""
    entries = [reduce_poly_mod_prime(e, prime) for e in m.entries]
    if entries:
        target = entries[0].parent
    else:
        desc = m.parent.descriptor
        if not isinstance(desc, UnivariatePolyRing) or not isinstance(desc.base, IntegerRing):
            raise ValidationError("expected a matrix over a univariate ring over ZZ")
        if not is_prime(prime):
            raise ValidationError(f"{prime} is not prime")
        target = intern_context(UnivariatePolyRing(PrimeField(prime), desc.symbol))
    return ExactMatrix(target, m.nrows, m.ncols, entries)


# ----------------------------------------------------------------------------
# Determinants over Fp[t] by evaluation + interpolation
# ----------------------------------------------------------------------------


def _det_mod_p(rows: list[list[int]], p: int) -> int:
    """Determinant of an integer matrix mod p by Gaussian elimination."""
    n = len(rows)
    det = 1
    for col in range(n):
        pivot_row = None
        for r in range(col, n):
            if rows[r][col] % p:
                pivot_row = r
                break
        if pivot_row is None:
            return 0
        if pivot_row != col:
            rows[col], rows[pivot_row] = rows[pivot_row], rows[col]
            det = -det
        pivot = rows[col][col] % p
        det = det * pivot % p
        inv = pow(pivot, -1, p)
        base = rows[col]
        for r in range(col + 1, n):
            factor = rows[r][col] * inv % p
            if factor:
                row = rows[r]
                for c in range(col, n):
                    row[c] = (row[c] - factor * base[c]) % p
    return det % p


def _eval_poly_mod_p(poly: Polynomial, powers: list[int], p: int) -> int:
    acc = 0
    for m, c in poly.terms:
        acc += c * powers[m[0]]
    return acc % p


def _interpolate_mod_p(xs: list[int], ys: list[int], p: int) -> list[int]:
    """Dense coefficients of the unique polynomial with poly(xs[i]) = ys[i] mod p."""
    n = len(xs)
    # Master polynomial prod (x - x_i), then synthetic division per point.
    master = [1]
    for x in xs:
        master = [0] + master
        for j in range(len(master) - 1):
            master[j] = (master[j] - master[j + 1] * x) % p
    coeffs = [0] * n
    for x, y in zip(xs, ys):
        if y == 0:
            continue
        # master / (x - x_i) by synthetic division, highest degree first.
        quotient = [0] * n
        carry = master[n]
        for d in range(n - 1, -1, -1):
            quotient[d] = carry
            carry = (master[d] + carry * x) % p
        denom = 0
        power = 1
        for q in quotient:
            denom = (denom + q * power) % p
            power = power * x % p
        scale = y * pow(denom, -1, p) % p
        for d in range(n):
            coeffs[d] = (coeffs[d] + scale * quotient[d]) % p
    return coeffs


def det_univariate_over_prime_field(m: ExactMatrix, degree_bound: int) -> Polynomial:
    """det of a square matrix over Fp[t], via evaluation at degree_bound + 1
    points, scalar determinants, and Lagrange interpolation.

    Requires p > degree_bound so that enough distinct evaluation points exist.
    """
    desc = m.parent.descriptor
    if not isinstance(desc, UnivariatePolyRing) or not isinstance(desc.base, PrimeField):
        raise ValidationError("expected a matrix over a univariate ring over a prime field")
    if not m.is_square:
        raise ValidationError("determinant of a nonsquare matrix")
    if degree_bound < 0:
        raise ValidationError("degree bound must be nonnegative")
    p = desc.base.p
    if p <= degree_bound:
        raise ValidationError(
            f"insufficient evaluation points: p={p} but degree bound is {degree_bound}"
        )
    n = m.nrows
    max_deg = max((e.degree() for e in m.entries), default=0)
    max_deg = max(max_deg, 0)
    xs = list(range(degree_bound + 1))
    ys = []
    for x in xs:
        powers = [1] * (max_deg + 1)
        for d in range(1, max_deg + 1):
            powers[d] = powers[d - 1] * x % p
        rows = [
            [_eval_poly_mod_p(m.entry(i, j), powers, p) for j in range(n)]
            for i in range(n)
        ]
        ys.append(_det_mod_p(rows, p))
    coeffs = _interpolate_mod_p(xs, ys, p)
    return Polynomial(
        m.parent,
        sorted(
            (((d,), c) for d, c in enumerate(coeffs) if c),
            key=lambda t: t[0],
            reverse=True,
        ),
    )


# ----------------------------------------------------------------------------
# Exact rational row reduction
# ----------------------------------------------------------------------------


def rref_over_Q(m: ExactMatrix) -> tuple[ExactMatrix, tuple[int, ...]]:
    """Reduced row echelon form with exact Fraction arithmetic."""
    if not isinstance(m.parent.descriptor, RationalField):
        raise ValidationError("rref_over_Q expects a matrix over QQ")
    rows = [list(r) for r in m.rows()]
    nrows, ncols = m.nrows, m.ncols
    pivots = []
    pivot_row = 0
    for col in range(ncols):
        if pivot_row >= nrows:
            break
        sel = None
        for r in range(pivot_row, nrows):
            if rows[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        rows[pivot_row], rows[sel] = rows[sel], rows[pivot_row]
        inv = Fraction(1) / rows[pivot_row][col]
        rows[pivot_row] = [v * inv for v in rows[pivot_row]]
        for r in range(nrows):
            if r != pivot_row and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[pivot_row])]
        pivots.append(col)
        pivot_row += 1
    flat = [e for r in rows for e in r]
    return ExactMatrix(m.parent, nrows, ncols, flat), tuple(pivots)


def _canonicalize_vector(vec: list[Fraction]) -> tuple[int, ...]:
    """Scale to integer entries with content 1 and positive leading entry."""
    lcm = 1
    for v in vec:
        lcm = lcm * v.denominator // gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in vec]
    content = 0
    for v in ints:
        content = gcd(content, v)
    if content > 1:
        ints = [v // content for v in ints]
    for v in ints:
        if v != 0:
            if v < 0:
                ints = [-x for x in ints]
            break
    return tuple(ints)


def nullspace_over_Q(m: ExactMatrix) -> list[tuple[int, ...]]:
    """Basis of the right kernel, one canonical primitive integer vector per
    free column of the reduced row echelon form."""
    reduced, pivots = rref_over_Q(m)
    pivot_set = set(pivots)
    free_cols = [c for c in range(m.ncols) if c not in pivot_set]
    basis = []
    for free in free_cols:
        vec = [Fraction(0)] * m.ncols
        vec[free] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -reduced.entry(r, free)
        basis.append(_canonicalize_vector(vec))
    return basis

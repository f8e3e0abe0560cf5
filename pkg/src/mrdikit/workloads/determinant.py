"""Determinants of ZZ[t] matrices through modular images and CRT lifting.

Each prime gives one modular image of the determinant (computed by
evaluation, scalar Gaussian elimination, interpolation); the images are
combined coefficient-wise with the balanced CRT lift.  Primes are taken
descending from just below 2^31 until their product clears twice the provable
coefficient bound, so the signed lift is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from ..algebra.matrices import (
    ExactMatrix,
    det_univariate_over_prime_field,
    reduce_mod_prime,
)
from ..algebra.polynomials import Polynomial
from ..algebra.primes import crt_combine_balanced, descending_primes
from ..algebra.rings import IntegerRing, UnivariatePolyRing
from ..errors import ValidationError
from ..ipc.registry import register_function

PRIME_CEILING = 2**31


def _require_zz_t_square(m: ExactMatrix) -> None:
    desc = m.parent.descriptor
    if not isinstance(desc, UnivariatePolyRing) or not isinstance(desc.base, IntegerRing):
        raise ValidationError("expected a matrix over a univariate polynomial ring over ZZ")
    if not m.is_square:
        raise ValidationError("determinant of a nonsquare matrix")


def degree_bound(m: ExactMatrix) -> int:
    """Row-wise bound on deg(det): sum over rows of the largest entry degree."""
    _require_zz_t_square(m)
    total = 0
    for i in range(m.nrows):
        row_max = max((m.entry(i, j).degree() for j in range(m.ncols)), default=-1)
        total += max(row_max, 0)
    return total


def _poly_l1(p: Polynomial) -> int:
    return sum(abs(c) for _, c in p.terms)


def coefficient_bound(m: ExactMatrix) -> int:
    """Product of row sums of entry l1-norms; bounds every |det coefficient|.

    Expanding det as a signed sum over permutations, each coefficient of the
    result is at most the permanent of the matrix of l1-norms, which is at
    most this product.
    """
    _require_zz_t_square(m)
    bound = 1
    for i in range(m.nrows):
        row_sum = sum(_poly_l1(m.entry(i, j)) for j in range(m.ncols))
        bound *= row_sum
    return bound


@dataclass
class DetJob:
    """The plan for one modular determinant run."""

    matrix: ExactMatrix
    degree_bound: int
    coefficient_bound: int
    primes: list[int] = field(default_factory=list)


def det_mod_p(matrix: ExactMatrix, p: int) -> Polynomial:
    """One modular image: det(matrix mod p) over Fp[t]."""
    bound = degree_bound(matrix)
    return det_univariate_over_prime_field(reduce_mod_prime(matrix, p), bound)


register_function("det_mod_p", det_mod_p)


def _usable_primes(stream: Iterator[int], floor: int) -> Iterator[int]:
    for p in stream:
        if p > floor:
            yield p


def _combine(matrix, residue_polys, primes) -> Polynomial:
    degrees = sorted({mono[0] for poly in residue_polys for mono, _ in poly.terms})
    terms = []
    for degree in degrees:
        residues = [poly.coefficient((degree,)) for poly in residue_polys]
        lifted = crt_combine_balanced(residues, primes)
        if lifted:
            terms.append(((degree,), lifted))
    return Polynomial.from_terms(matrix.parent, terms)


def modular_determinant(
    m: ExactMatrix,
    pool=None,
    heuristic: bool = False,
    prime_stream: Optional[Iterator[int]] = None,
    job: Optional[DetJob] = None,
) -> Polynomial:
    """Exact determinant of a square matrix over ZZ[t].

    With a pool, per-prime images run through ``parallel_map``; the serial
    and pooled paths produce structurally identical results.  ``heuristic``
    stops as soon as the lifted result survives two extra primes unchanged
    instead of clearing the provable bound.  ``job``, when given, records the
    plan (bounds and primes used).
    """
    _require_zz_t_square(m)
    bound_b = coefficient_bound(m)
    bound_d = degree_bound(m)
    if job is not None:
        job.matrix = m
        job.degree_bound = bound_d
        job.coefficient_bound = bound_b
    if bound_b == 0:
        return Polynomial.zero(m.parent)  # a row vanished; det is 0
    stream = _usable_primes(
        prime_stream if prime_stream is not None else descending_primes(PRIME_CEILING),
        bound_d,
    )

    def run_batch(primes):
        if pool is None:
            return [det_mod_p(m, p) for p in primes]
        return pool.parallel_map("det_mod_p", [(m, p) for p in primes])

    if not heuristic:
        primes = []
        product = 1
        while product <= 2 * bound_b:
            try:
                p = next(stream)
            except StopIteration:
                raise ValidationError("prime stream exhausted before clearing the bound")
            primes.append(p)
            product *= p
        residues = run_batch(primes)
        if job is not None:
            job.primes = list(primes)
        return _combine(m, residues, primes)

    # Heuristic: extend prime by prime until two consecutive extensions leave
    # the lifted polynomial unchanged.  Batches only affect how much work is
    # wasted past the stopping point, never the result.
    batch = max(len(pool.workers), 1) if pool is not None else 1
    primes: list[int] = []
    residues: list[Polynomial] = []
    previous = None
    stable = 0
    while True:
        fresh = []
        for _ in range(batch):
            try:
                fresh.append(next(stream))
            except StopIteration:
                raise ValidationError("prime stream exhausted during heuristic run")
        new_residues = run_batch(fresh)
        for p, r in zip(fresh, new_residues):
            primes.append(p)
            residues.append(r)
            combined = _combine(m, residues, primes)
            if previous is not None and combined == previous:
                stable += 1
            else:
                stable = 0
            previous = combined
            if len(primes) >= 3 and stable >= 2:
                if job is not None:
                    job.primes = list(primes)
                return combined

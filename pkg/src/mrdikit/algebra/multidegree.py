"""Grouping monomials of a fixed total degree by their Z^k multidegree."""

from __future__ import annotations

from typing import Iterator, Sequence

from ..errors import ValidationError
from .polynomials import Monomial, monomial_key
from .rings import ContextHandle, ring_arity

Multidegree = tuple[int, ...]


def iter_monomials(arity: int, total_degree: int) -> Iterator[Monomial]:
    """All exponent vectors of length ``arity`` summing to ``total_degree``."""
    if arity == 1:
        yield (total_degree,)
        return
    for first in range(total_degree, -1, -1):
        for rest in iter_monomials(arity - 1, total_degree - first):
            yield (first,) + rest


def monomial_multidegree(m: Monomial, variable_degrees: Sequence[Multidegree]) -> Multidegree:
    k = len(variable_degrees[0])
    acc = [0] * k
    for e, deg in zip(m, variable_degrees):
        if e:
            for j in range(k):
                acc[j] += e * deg[j]
    return tuple(acc)


def monomials_by_multidegree(
    ring: ContextHandle,
    variable_degrees: Sequence[Multidegree],
    total_degree: int,
) -> dict[Multidegree, list[Monomial]]:
    """Group every monomial of exactly ``total_degree`` by its multidegree.

    The multidegree of x^e is the exponent-weighted sum of the per-variable
    degree vectors.  Groups are keyed by multidegree (ascending key order) and
    each group lists its monomials in degree-lex order, leading monomial first.
    """
    arity = ring_arity(ring.descriptor)
    if len(variable_degrees) != arity:
        raise ValidationError(
            f"got {len(variable_degrees)} variable degrees for a ring with {arity} symbols"
        )
    if total_degree < 0:
        raise ValidationError("total degree must be nonnegative")
    degs = [tuple(d) for d in variable_degrees]
    k = len(degs[0]) if degs else 0
    if any(len(d) != k for d in degs):
        raise ValidationError("variable degree vectors must share one length")
    groups: dict[Multidegree, list[Monomial]] = {}
    for mono in iter_monomials(arity, total_degree):
        groups.setdefault(monomial_multidegree(mono, degs), []).append(mono)
    result = {}
    for md in sorted(groups):
        result[md] = sorted(groups[md], key=monomial_key, reverse=True)
    return result

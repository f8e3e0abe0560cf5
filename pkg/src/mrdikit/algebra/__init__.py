from .rings import (
    ZZ,
    QQ,
    GF,
    ContextHandle,
    IntegerRing,
    MultivariatePolyRing,
    PrimeField,
    RationalField,
    RingDescriptor,
    UnivariatePolyRing,
    domain_for,
    intern_context,
    ring_arity,
    ring_symbols,
)
from .polynomials import (
    Monomial,
    Polynomial,
    describe_ring,
    monomial_key,
    monomial_mul,
    polynomial_ring,
    univariate_ring,
)
from .matrices import (
    ExactMatrix,
    det_univariate_over_prime_field,
    nullspace_over_Q,
    reduce_mod_prime,
    reduce_poly_mod_prime,
    rref_over_Q,
)
from .multidegree import (
    Multidegree,
    iter_monomials,
    monomial_multidegree,
    monomials_by_multidegree,
)
from .primes import crt_combine_balanced, descending_primes, is_prime

__all__ = [
    "ZZ",
    "QQ",
    "GF",
    "ContextHandle",
    "ExactMatrix",
    "IntegerRing",
    "Monomial",
    "Multidegree",
    "MultivariatePolyRing",
    "Polynomial",
    "PrimeField",
    "RationalField",
    "RingDescriptor",
    "UnivariatePolyRing",
    "crt_combine_balanced",
    "describe_ring",
    "descending_primes",
    "det_univariate_over_prime_field",
    "domain_for",
    "intern_context",
    "is_prime",
    "iter_monomials",
    "monomial_key",
    "monomial_mul",
    "monomial_multidegree",
    "monomials_by_multidegree",
    "nullspace_over_Q",
    "polynomial_ring",
    "reduce_mod_prime",
    "reduce_poly_mod_prime",
    "ring_arity",
    "ring_symbols",
    "rref_over_Q",
    "univariate_ring",
]

import threading

import pytest

from mrdikit.algebra import (
    GF,
    QQ,
    ZZ,
    IntegerRing,
    MultivariatePolyRing,
    PrimeField,
    RationalField,
    UnivariatePolyRing,
    intern_context,
)
from mrdikit.errors import ValidationError


def test_interning_same_descriptor_same_token():
    a = intern_context(MultivariatePolyRing(RationalField(), ("x", "y")))
    b = intern_context(MultivariatePolyRing(RationalField(), ("x", "y")))
    assert a is b
    assert a.token == b.token


def test_symbol_order_distinguishes_contexts():
    a = intern_context(MultivariatePolyRing(RationalField(), ("x", "y")))
    b = intern_context(MultivariatePolyRing(RationalField(), ("y", "x")))
    assert a.token != b.token


def test_base_ring_distinguishes_contexts():
    a = intern_context(UnivariatePolyRing(IntegerRing(), "t"))
    b = intern_context(UnivariatePolyRing(RationalField(), "t"))
    assert a.token != b.token


def test_duplicate_symbols_rejected():
    with pytest.raises(ValidationError):
        MultivariatePolyRing(RationalField(), ("x", "x"))


def test_empty_symbols_rejected():
    with pytest.raises(ValidationError):
        MultivariatePolyRing(RationalField(), ())


def test_prime_field_requires_prime():
    with pytest.raises(ValidationError):
        PrimeField(15)
    assert GF(101).descriptor == PrimeField(101)


def test_builtin_handles():
    assert ZZ is intern_context(IntegerRing())
    assert QQ is intern_context(RationalField())


def test_concurrent_interning_yields_one_handle():
    desc = MultivariatePolyRing(RationalField(), ("a", "b", "c"))
    results = []

    def worker():
        results.append(intern_context(desc))

    threads = [threading.Thread(target=worker) for _ in range(16)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len({h.token for h in results}) == 1


def test_nested_ring_descriptors_intern_independently():
    inner = UnivariatePolyRing(IntegerRing(), "t")
    outer = UnivariatePolyRing(inner, "u")
    hi = intern_context(inner)
    ho = intern_context(outer)
    assert hi.token != ho.token
    assert intern_context(outer) is ho

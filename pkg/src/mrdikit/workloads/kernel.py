"""Kernel components of a monomial map, degree by degree.

The map sends each source variable to a single target term, which induces a
Z^k grading on the source (the image exponent vectors).  For every total
degree up to the requested bound, source monomials are grouped by
multidegree; each group gives a small matrix whose rows are the image
coefficient vectors, and the rational nullspace of its transpose yields the
kernel elements supported on that group.  Row reductions of distinct groups
are independent, which is what the pool parallelizes.

Minimalization is pure linear algebra: inside a group, kernel vectors already
reachable as lower-degree generators times monomials are dropped by extending
a basis of that product span.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..algebra.matrices import ExactMatrix, nullspace_over_Q
from ..algebra.multidegree import Multidegree, monomials_by_multidegree
from ..algebra.polynomials import Monomial, Polynomial
from ..algebra.rings import QQ, ContextHandle, MultivariatePolyRing, RationalField
from ..errors import ContextMismatchError, ValidationError
from ..ipc.registry import register_function
from ..mrdi.codec import (
    _register_poly_context,
    register_codec,
)
from ..mrdi.document import TypeNode
from ..mrdi.states import SerializerState


@dataclass(frozen=True)
class MonomialMap:
    """A ring map sending each source variable to one nonzero target term."""

    source: ContextHandle
    target: ContextHandle
    images: tuple[Polynomial, ...]

    def __post_init__(self):
        for ring, name in ((self.source, "source"), (self.target, "target")):
            desc = ring.descriptor
            if not isinstance(desc, MultivariatePolyRing) or not isinstance(
                desc.base, RationalField
            ):
                raise ValidationError(f"{name} must be a multivariate ring over QQ")
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        arity = len(self.source.descriptor.symbols)
        if len(images) != arity:
            raise ValidationError(
                f"need {arity} images (one per source variable), got {len(images)}"
            )
        for img in images:
            if img.parent != self.target:
                raise ValidationError("images must live in the target ring")
            if len(img.terms) != 1:
                raise ValidationError("images must be single nonzero terms")
            if sum(img.terms[0][0]) == 0:
                raise ValidationError("image monomials must be nonconstant")

    @property
    def variable_degrees(self) -> tuple[Multidegree, ...]:
        """The induced grading: deg(x_i) is the image monomial's exponents."""
        return tuple(img.terms[0][0] for img in self.images)


def evaluate_map(phi: MonomialMap, p: Polynomial) -> Polynomial:
    """Substitute the images for the variables of ``p``."""
    if p.parent != phi.source:
        raise ContextMismatchError("polynomial does not live in the map's source ring")
    result = Polynomial.zero(phi.target)
    for mono, coeff in p.terms:
        term = Polynomial.constant(phi.target, coeff)
        for image, exponent in zip(phi.images, mono):
            if exponent:
                term = term * image**exponent
        result = result + term
    return result


# -- serialization of monomial maps ------------------------------------------


def _map_build_type(phi: MonomialMap, state: SerializerState) -> TypeNode:
    return TypeNode(
        "MonomialMap",
        {
            "source": _register_poly_context(phi.source, state),
            "target": _register_poly_context(phi.target, state),
        },
    )


def _map_build_data(phi: MonomialMap, state: SerializerState):
    from ..mrdi.codec import _encode_poly_data

    return {"images": [_encode_poly_data(img, state.mode) for img in phi.images]}


def _map_decode(tn: TypeNode, data, state) -> MonomialMap:
    from ..errors import SchemaError
    from ..mrdi.codec import _decode_poly_data, _resolve_context
    from ..mrdi.document import is_uuid_text

    params = tn.params
    if not isinstance(params, dict) or set(params) != {"source", "target"}:
        raise SchemaError("MonomialMap needs source and target context parameters")
    if not (is_uuid_text(params["source"]) and is_uuid_text(params["target"])):
        raise SchemaError("MonomialMap context parameters must be UUIDs")
    source = _resolve_context(params["source"], state)
    target = _resolve_context(params["target"], state)
    if not isinstance(data, dict) or "images" not in data or not isinstance(data["images"], list):
        raise SchemaError("MonomialMap payload needs an images sequence")
    images = tuple(
        _decode_poly_data(target, raw, state, f"images/{i}")
        for i, raw in enumerate(data["images"])
    )
    return MonomialMap(source, target, images)


register_codec(MonomialMap, "MonomialMap", _map_build_type, _map_build_data, _map_decode)


# -- per-multidegree row reduction --------------------------------------------


def kernel_block(image_matrix: ExactMatrix, span_matrix: ExactMatrix) -> ExactMatrix:
    """New kernel directions of one multidegree group.

    ``image_matrix`` has one row per group monomial (its image coefficients
    over the target monomial basis).  ``span_matrix`` rows span the part of
    the kernel already generated at lower degree.  Returns a matrix whose
    rows are nullspace vectors of the transpose that extend the span to a
    basis of the group's kernel.
    """
    if span_matrix.ncols != image_matrix.nrows:
        raise ValidationError("span vectors must have one entry per group monomial")
    vectors = nullspace_over_Q(image_matrix.transpose())
    width = image_matrix.nrows

    # Incremental elimination: rows already in the span reduce to zero.
    eliminated: list[tuple[int, list[Fraction]]] = []

    def reduce(vec):
        vec = [Fraction(v) for v in vec]
        for pivot, row in eliminated:
            factor = vec[pivot]
            if factor:
                vec = [a - factor * b for a, b in zip(vec, row)]
        return vec

    def insert(vec):
        for pivot, value in enumerate(vec):
            if value:
                inv = Fraction(1) / value
                eliminated.append((pivot, [v * inv for v in vec]))
                return True
        return False

    for i in range(span_matrix.nrows):
        insert(reduce(span_matrix.row(i)))

    accepted = []
    for vec in vectors:
        reduced = reduce(vec)
        if insert(reduced):
            accepted.append(vec)
    entries = [Fraction(v) for vec in accepted for v in vec]
    return ExactMatrix(QQ, len(accepted), width, entries)


register_function("kernel_block", kernel_block)


def _image_row(phi: MonomialMap, mono: Monomial) -> tuple[Multidegree, Fraction]:
    """Target monomial and coefficient of the image of one source monomial."""
    coeff = Fraction(1)
    exponents = [0] * len(phi.target.descriptor.symbols)
    for image, e in zip(phi.images, mono):
        if e:
            img_mono, img_coeff = image.terms[0]
            coeff *= Fraction(img_coeff) ** e
            for j, a in enumerate(img_mono):
                exponents[j] += e * a
    return tuple(exponents), coeff


def _group_tasks(phi: MonomialMap, monos: list[Monomial], span_rows: list[list[Fraction]]):
    """Build the (image, span) matrix pair for one multidegree group."""
    columns: list[Multidegree] = []
    rows = []
    for mono in monos:
        target_mono, coeff = _image_row(phi, mono)
        if target_mono not in columns:
            columns.append(target_mono)
        row = [Fraction(0)] * len(columns)
        row[columns.index(target_mono)] = coeff
        rows.append(row)
    width = len(columns)
    entries = []
    for row in rows:
        entries.extend(row + [Fraction(0)] * (width - len(row)))
    image_matrix = ExactMatrix(QQ, len(rows), width, entries)
    span_entries = [v for row in span_rows for v in row]
    span_matrix = ExactMatrix(QQ, len(span_rows), len(monos), span_entries)
    return image_matrix, span_matrix


def components_of_kernel(
    phi: MonomialMap,
    total_degree: int,
    pool=None,
    minimalize: bool = True,
) -> dict[Multidegree, list[Polynomial]]:
    """Kernel generators of ``phi`` grouped by multidegree, up to ``total_degree``.

    Degrees are processed in increasing order; within one total degree every
    multidegree group is an independent row-reduction task (sent through the
    pool when one is given).  With ``minimalize`` (the default) vectors lying
    in the span of lower-degree generators times monomials are dropped, so
    the output generates minimally in the per-multidegree linear sense; with
    it off every group contributes a full kernel basis.
    """
    if total_degree < 1:
        raise ValidationError("total degree must be at least 1")
    degs = phi.variable_degrees
    k = len(degs[0])
    # All generators found so far: (degree, multidegree, polynomial).
    generators: list[tuple[int, Multidegree, Polynomial]] = []
    components: dict[Multidegree, list[Polynomial]] = {}
    monomial_groups_cache: dict[int, dict[Multidegree, list[Monomial]]] = {}

    def groups_for(degree: int):
        if degree not in monomial_groups_cache:
            monomial_groups_cache[degree] = monomials_by_multidegree(
                phi.source, degs, degree
            )
        return monomial_groups_cache[degree]

    for t in range(1, total_degree + 1):
        groups = groups_for(t)
        tasks = []
        for md, monos in groups.items():
            if len(monos) < 2:
                continue
            span_rows: list[list[Fraction]] = []
            if minimalize and generators:
                position = {mono: i for i, mono in enumerate(monos)}
                for gen_degree, gen_md, gen in generators:
                    remaining = t - gen_degree
                    if remaining < 1:
                        continue
                    delta = tuple(a - b for a, b in zip(md, gen_md))
                    if any(c < 0 for c in delta):
                        continue
                    for mono in groups_for(remaining).get(delta, ()):
                        product = gen * Polynomial.from_terms(
                            phi.source, [(mono, Fraction(1))]
                        )
                        row = [Fraction(0)] * len(monos)
                        for pmono, pcoeff in product.terms:
                            row[position[pmono]] = Fraction(pcoeff)
                        span_rows.append(row)
            image_matrix, span_matrix = _group_tasks(phi, monos, span_rows)
            tasks.append((md, monos, image_matrix, span_matrix))

        if pool is None:
            outcomes = [kernel_block(im, sp) for _, _, im, sp in tasks]
        else:
            outcomes = pool.parallel_map(
                "kernel_block", [(im, sp) for _, _, im, sp in tasks]
            )

        for (md, monos, _, _), new_rows in zip(tasks, outcomes):
            for i in range(new_rows.nrows):
                poly = Polynomial.from_terms(
                    phi.source,
                    [
                        (mono, new_rows.entry(i, j))
                        for j, mono in enumerate(monos)
                        if new_rows.entry(i, j) != 0
                    ],
                )
                generators.append((t, md, poly))
                components.setdefault(md, []).append(poly)
    return components

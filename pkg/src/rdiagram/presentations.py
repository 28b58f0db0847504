"""Finitely generated abelian groups as presentations.

A module (over the integers) is stored as a generator count together with a
relation lattice inside the generator space: the group is
``Z^gens / relations``.  This single representation covers everything the
pipeline manipulates — free groups, ``(Z/p)^k``, and mixed groups like
``Z^a + (Z/p)^b`` — without a zoo of special-cased types.

Isomorphism classification happens through :meth:`ZModulePresentation.normal_form`,
which returns the free rank and the ascending chain of invariant factors
(Smith normal form of the relation matrix).  By the structure theorem this
pair is a complete isomorphism invariant, so comparing normal forms is how
all "these two constructions give the same module" checks are phrased.

Elements are coordinate vectors on the generators; two vectors represent
the same element exactly when their difference lies in the relation
lattice.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .intlinalg import (
    IntMatrix,
    Lattice,
    column_span,
    preimage_lattice,
    snf,
)

__all__ = [
    "ZModulePresentation",
    "ModuleMap",
    "normalize",
    "check_map",
    "quotient",
    "kernel_of_map",
    "p_torsion",
]


class ZModulePresentation:
    """The abelian group ``Z^gens / relations``."""

    __slots__ = ("gens", "relations", "_normal_form")

    def __init__(self, gens: int, relations: Lattice):
        if relations.ambient != gens:
            raise ValueError("relation lattice must live in the generator space")
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "relations", relations)
        object.__setattr__(self, "_normal_form", None)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("ZModulePresentation is immutable")

    @staticmethod
    def free(n: int) -> "ZModulePresentation":
        return ZModulePresentation(n, Lattice.zero(n))

    @staticmethod
    def fp_elementary(p: int, n: int) -> "ZModulePresentation":
        """The group ``(Z/p)^n`` presented with relations ``p * e_i``."""
        return ZModulePresentation(n, Lattice.scaled_full(n, p))

    def normal_form(self) -> tuple[int, tuple[int, ...]]:
        """``(free_rank, invariant_factors)`` — a complete isomorphism invariant.

        Invariant factors are the Smith diagonal entries of the relation
        matrix that exceed 1, in ascending divisibility order.
        """
        cached = self._normal_form
        if cached is None:
            B = self.relations.basis_matrix()
            _, D, _ = snf(B)
            diag = [D.entries[i][i] for i in range(min(D.rows, D.cols))]
            nonzero = [d for d in diag if d]
            factors = tuple(d for d in nonzero if d > 1)
            cached = (self.gens - len(nonzero), factors)
            object.__setattr__(self, "_normal_form", cached)
        return cached

    @property
    def free_rank(self) -> int:
        return self.normal_form()[0]

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return self.normal_form()[1]

    def is_trivial(self) -> bool:
        return self.normal_form() == (0, ())

    def elements_equal(self, v: Sequence[int], w: Sequence[int]) -> bool:
        diff = [int(a) - int(b) for a, b in zip(v, w)]
        if len(diff) != self.gens:
            raise ValueError("element vectors have wrong length")
        return self.relations.contains(diff)

    def quotient_by(self, extra: Iterable[Sequence[int]]) -> "ZModulePresentation":
        rels = self.relations.sum(Lattice.from_generators(self.gens, extra))
        return ZModulePresentation(self.gens, rels)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ZModulePresentation)
            and self.gens == other.gens
            and self.relations == other.relations
        )

    def __hash__(self) -> int:
        return hash((self.gens, self.relations))

    def __repr__(self) -> str:
        rank, factors = self.normal_form()
        return f"ZModulePresentation(gens={self.gens}, rank={rank}, factors={list(factors)})"


class ModuleMap:
    """A homomorphism between presented groups, as a matrix on generators.

    Well-definedness (relations map into relations) is verified on
    construction unless ``unchecked=True`` is passed; the escape hatch
    exists so that :func:`check_map` can evaluate candidate matrices
    without raising.
    """

    __slots__ = ("source", "target", "matrix")

    def __init__(
        self,
        source: ZModulePresentation,
        target: ZModulePresentation,
        matrix: IntMatrix,
        *,
        unchecked: bool = False,
    ):
        if matrix.rows != target.gens or matrix.cols != source.gens:
            raise ValueError(
                f"matrix shape {matrix.rows}x{matrix.cols} does not map "
                f"{source.gens} generators to {target.gens}"
            )
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "matrix", matrix)
        if not unchecked and not check_map(self):
            raise ValueError("map does not carry source relations into target relations")

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("ModuleMap is immutable")

    @staticmethod
    def identity(pres: ZModulePresentation) -> "ModuleMap":
        return ModuleMap(pres, pres, IntMatrix.identity(pres.gens))

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        return self.matrix.mul_vec(v)

    def compose(self, inner: "ModuleMap") -> "ModuleMap":
        """``self after inner``."""
        if inner.target is not self.source and inner.target != self.source:
            raise ValueError("maps do not compose")
        return ModuleMap(inner.source, self.target, self.matrix @ inner.matrix)

    def kernel_lattice(self) -> Lattice:
        """All generator vectors whose image is zero in the target module."""
        return preimage_lattice(self.matrix, self.target.relations)

    def is_injective(self) -> bool:
        # The kernel lattice always contains the source relations; the map is
        # injective precisely when nothing else is in it.
        return self.kernel_lattice() == self.source.relations

    def is_surjective(self) -> bool:
        image = column_span(self.matrix).sum(self.target.relations)
        return image == Lattice.full(self.target.gens)

    def cokernel(self) -> ZModulePresentation:
        rels = self.target.relations.sum(column_span(self.matrix))
        return ZModulePresentation(self.target.gens, rels)

    def __repr__(self) -> str:
        return f"ModuleMap({self.source!r} -> {self.target!r})"


def normalize(gens: int, rels: Lattice) -> ZModulePresentation:
    """Build a presentation and force its normal form to be computed."""
    pres = ZModulePresentation(gens, rels)
    pres.normal_form()
    return pres


def check_map(f: ModuleMap) -> bool:
    """True iff every source relation generator lands in the target relations."""
    return all(
        f.target.relations.contains(f.matrix.mul_vec(col))
        for col in f.source.relations.basis
    )


def quotient(
    M: ZModulePresentation, sub: Iterable[Sequence[int]]
) -> tuple[ZModulePresentation, ModuleMap]:
    """Quotient of ``M`` by the submodule generated by ``sub``.

    Returns the quotient presentation (same generators, enlarged relations)
    and the projection map, which is the identity on generators.
    """
    result = M.quotient_by(sub)
    projection = ModuleMap(M, result, IntMatrix.identity(M.gens))
    return result, projection


def kernel_of_map(f: ModuleMap) -> list[tuple[int, ...]]:
    """Generators of ``ker f`` as a submodule of the source.

    These are basis vectors of the lattice ``{x : f(x) = 0 in the target}``;
    the list always generates at least the source relations, which present
    the zero element.
    """
    if not check_map(f):
        raise ValueError("kernel of an ill-defined map is not meaningful")
    return list(f.kernel_lattice().basis)


def p_torsion(M: ZModulePresentation, p: int) -> list[tuple[int, ...]]:
    """Generators of ``M[p] = {x : p*x = 0}`` inside ``M``."""
    mul_p = IntMatrix.identity(M.gens).scale(p)
    return list(preimage_lattice(mul_p, M.relations).basis)

"""Reducing separated presentations to R-diagrams.

A *separated presentation* of a module M is a morphism f: K -> S of
separated diagrams with M = coker f.  An *R-diagram* is the fully reduced
form: K is a single F_p space sitting inside both S_1 and S_2 through
injective maps q_i with p-torsion images, and the bar-level map is zero.

The passage from one to the other quotients K by a carefully chosen
sub-diagram L = (L_1, Lbar, L_2) and S by f(L).  Three elementary
reductions (kill the kernels of K's structure maps; kill a complement of
ker fbar; kill the kernels of f_1, f_2) compose to the same result as a
single combined quotient, and both routes are implemented so they can be
checked against each other.

Every reduction validates the hypotheses it relies on and re-verifies
separatedness of its output; the theory guarantees these hold, so a
failure is a bug, reported loudly with the violated condition's name.
"""

from __future__ import annotations

from .intlinalg import IntMatrix, Lattice, preimage_lattice
from .fplinalg import (
    FpMatrix,
    FpSubspace,
    fp_complement,
    quotient_projection,
    validate_prime,
)
from .presentations import ModuleMap, ZModulePresentation
from .pullback import (
    DiagramMorphism,
    PullbackDiagram,
    is_separated,
)

__all__ = [
    "HypothesisViolation",
    "SeparatedPresentation",
    "SubDiagram",
    "RDiagram",
    "RDiagramReport",
    "free_diagram",
    "quotient_presentation",
    "reduce_K",
    "reduce_barf",
    "reduce_monos",
    "reduce_sequential",
    "reduce_combined",
    "validate_rdiagram",
    "rdiagram_as_presentation",
]


class HypothesisViolation(ValueError):
    """A reduction was attempted whose named hypothesis fails to hold."""

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        super().__init__(f"{condition}: {detail}" if detail else condition)


class SeparatedPresentation:
    """A morphism K -> S of separated diagrams, presenting coker f.

    Wraps a ``DiagramMorphism`` (which already guarantees commuting
    squares) and re-verifies that both endpoint diagrams are separated.
    """

    __slots__ = ("morphism",)

    def __init__(self, morphism: DiagramMorphism):
        for side, D in (("source", morphism.source), ("target", morphism.target)):
            report = is_separated(D)
            if not report.separated:
                raise ValueError(f"the {side} diagram is not separated: {report}")
        object.__setattr__(self, "morphism", morphism)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("SeparatedPresentation is immutable")

    @property
    def p(self) -> int:
        return self.morphism.source.p

    @property
    def K(self) -> PullbackDiagram:
        return self.morphism.source

    @property
    def S(self) -> PullbackDiagram:
        return self.morphism.target

    @property
    def f1(self) -> ModuleMap:
        return self.morphism.f1

    @property
    def f2(self) -> ModuleMap:
        return self.morphism.f2

    @property
    def fbar(self) -> FpMatrix:
        return self.morphism.fbar

    def __repr__(self) -> str:
        return f"SeparatedPresentation({self.K!r} -> {self.S!r})"


class SubDiagram:
    """A sub-diagram (L_1, Lbar, L_2) of the K side of a presentation.

    ``L1``/``L2`` are lattices in the generator spaces of K_1/K_2, ``Lbar``
    a subspace of Kbar; the restrictions of K's structure maps are the
    implicit maps u_i, so the components must satisfy q_i(L_i) <= Lbar.
    """

    __slots__ = ("L1", "Lbar", "L2")

    def __init__(self, K: PullbackDiagram, L1: Lattice, Lbar: FpSubspace, L2: Lattice):
        if L1.ambient != K.M1.gens or L2.ambient != K.M2.gens:
            raise ValueError("sub-diagram lattices must live in the generator spaces")
        if Lbar.ambient != K.mbar_dim or Lbar.p != K.p:
            raise ValueError("Lbar must be a subspace of Kbar")
        for lat, mat, name in ((L1, K.p1, "L1"), (L2, K.p2, "L2")):
            for v in lat.basis:
                if not Lbar.contains(mat.mul_vec(v)):
                    raise ValueError(f"structure map carries {name} outside Lbar at {v}")
        object.__setattr__(self, "L1", L1)
        object.__setattr__(self, "Lbar", Lbar)
        object.__setattr__(self, "L2", L2)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("SubDiagram is immutable")

    def side(self, i: int) -> Lattice:
        return self.L1 if i == 1 else self.L2


def free_diagram(p: int, rank: int) -> PullbackDiagram:
    """The separated diagram (Z^rank, F_p^rank, Z^rank) of the free module."""
    validate_prime(p)
    free = ZModulePresentation.free(rank)
    eye = FpMatrix.identity(p, rank)
    return PullbackDiagram(p, free, free, rank, eye, eye)


def _elementary_diagram(p: int, dim: int) -> PullbackDiagram:
    """The diagram ((Z/p)^dim, F_p^dim, (Z/p)^dim; id, id)."""
    E = ZModulePresentation.fp_elementary(p, dim)
    eye = FpMatrix.identity(p, dim)
    return PullbackDiagram(p, E, E, dim, eye, eye)


def _image_subspace(q: FpMatrix, L: Lattice) -> FpSubspace:
    return FpSubspace.from_vectors(q.p, q.rows, [q.mul_vec(v) for v in L.basis])


def _subspace_preimage(q: FpMatrix, V: FpSubspace) -> Lattice:
    """The integer lattice {x : q(x) in V mod p}."""
    d = q.rows
    target = Lattice.from_generators(d, list(V.basis)).sum(Lattice.scaled_full(d, q.p))
    return preimage_lattice(q.lift(), target)


def _apply_quotient(
    pres: SeparatedPresentation, L: SubDiagram, *, quotient_target_right: bool
) -> SeparatedPresentation:
    """Quotient K by L and S by f(L), componentwise.

    With ``quotient_target_right`` the whole of S is quotiented (Sbar by
    fbar(Lbar) and S_2 by f_2(L_2)); without it only S_1 changes, which is
    the one-sided form and requires fbar(Lbar) = 0 and f_2(L_2) = 0 to
    remain well-defined — enforced structurally by the commuting-square
    and well-definedness checks of the rebuilt morphism.
    """
    p = pres.p
    K, S = pres.K, pres.S

    newK1 = ZModulePresentation(K.M1.gens, K.M1.relations.sum(L.L1))
    newK2 = ZModulePresentation(K.M2.gens, K.M2.relations.sum(L.L2))
    projK, sectionK = quotient_projection(L.Lbar)
    newK = PullbackDiagram(p, newK1, newK2, projK.rows, projK @ K.p1, projK @ K.p2)

    f1L1 = Lattice.from_generators(
        S.M1.gens, [pres.f1.matrix.mul_vec(v) for v in L.L1.basis]
    )
    newS1 = ZModulePresentation(S.M1.gens, S.M1.relations.sum(f1L1))
    if quotient_target_right:
        f2L2 = Lattice.from_generators(
            S.M2.gens, [pres.f2.matrix.mul_vec(v) for v in L.L2.basis]
        )
        newS2 = ZModulePresentation(S.M2.gens, S.M2.relations.sum(f2L2))
        fbarLbar = FpSubspace.from_vectors(
            p, S.mbar_dim, [pres.fbar.mul_vec(l) for l in L.Lbar.basis]
        )
    else:
        newS2 = S.M2
        fbarLbar = FpSubspace.zero(p, S.mbar_dim)
    projS, _ = quotient_projection(fbarLbar)
    newS = PullbackDiagram(p, newS1, newS2, projS.rows, projS @ S.p1, projS @ S.p2)

    newf1 = ModuleMap(newK1, newS1, pres.f1.matrix)
    newf2 = ModuleMap(newK2, newS2, pres.f2.matrix)
    newfbar = projS @ pres.fbar @ sectionK
    return SeparatedPresentation(DiagramMorphism(newK, newS, newf1, newf2, newfbar))


def quotient_presentation(
    pres: SeparatedPresentation, L: SubDiagram, mode: str
) -> SeparatedPresentation:
    """Quotient a presentation by a sub-diagram of K, checking hypotheses.

    ``mode="full"`` requires each u_i: L_i -> Lbar surjective and fbar
    injective on Lbar, and quotients all six components.  In
    ``mode="target-only"`` only u_2 must be surjective, with f_2(L_2) = 0
    and fbar(Lbar) = 0; then S_1 alone is quotiented by f_1(L_1).
    Violations raise ``HypothesisViolation`` naming the failed condition.
    """
    K = pres.K
    if mode == "full":
        for i in (1, 2):
            if _image_subspace(K.structure_map(i), L.side(i)) != L.Lbar:
                raise HypothesisViolation(
                    f"u{i}-not-surjective", "L{} does not map onto Lbar".format(i)
                )
        if pres.fbar.kernel().intersect(L.Lbar).dim:
            raise HypothesisViolation(
                "fbar-not-injective-on-Lbar", "ker fbar meets Lbar"
            )
        return _apply_quotient(pres, L, quotient_target_right=True)
    if mode == "target-only":
        if _image_subspace(K.p2, L.L2) != L.Lbar:
            raise HypothesisViolation("u2-not-surjective", "L2 does not map onto Lbar")
        for v in L.L2.basis:
            if not pres.S.M2.relations.contains(pres.f2.matrix.mul_vec(v)):
                raise HypothesisViolation("f2-nonzero-on-L2", f"f2({v}) != 0")
        for l in L.Lbar.basis:
            if any(pres.fbar.mul_vec(l)):
                raise HypothesisViolation("fbar-nonzero-on-Lbar", f"fbar({l}) != 0")
        return _apply_quotient(pres, L, quotient_target_right=False)
    raise ValueError(f"unknown mode {mode!r}")


def _standardize_K(pres: SeparatedPresentation) -> SeparatedPresentation:
    """Re-coordinatize the K side onto Kbar.

    Requires each structure map q_i to be an isomorphism of modules
    K_i -> Kbar (which holds after the K-side kernels have been
    quotiented away); the result has K literally of the form
    ((Z/p)^d, F_p^d, (Z/p)^d; id, id), with the f_i rewritten through
    integer lifts of the inverse isomorphisms.
    """
    p = pres.p
    K = pres.K
    d = K.mbar_dim
    newK = _elementary_diagram(p, d)
    newmaps = []
    for i in (1, 2):
        q = K.structure_map(i)
        mod = K.component(i)
        ker_lat = preimage_lattice(q.lift(), Lattice.scaled_full(d, p))
        if not mod.relations.contains_lattice(ker_lat):
            raise AssertionError(
                f"structure map {i} of K is not injective; quotient the kernels first"
            )
        f = pres.morphism.component(i)
        cols = []
        for r in range(d):
            e = [int(t == r) for t in range(d)]
            w = q.solve(e)
            if w is None:
                raise AssertionError(f"structure map {i} of K is not surjective")
            cols.append(f.matrix.mul_vec(w))
        target = pres.S.component(i)
        newmaps.append(
            ModuleMap(
                newK.component(i), target, IntMatrix.from_cols(cols, rows=target.gens)
            )
        )
    morphism = DiagramMorphism(newK, pres.S, newmaps[0], newmaps[1], pres.fbar)
    return SeparatedPresentation(morphism)


def reduce_K(pres: SeparatedPresentation) -> SeparatedPresentation:
    """Kill the kernels of K's structure maps.

    Quotients by the sub-diagram (ker q_1, 0, ker q_2) and then rewrites
    K in Kbar coordinates, so all three K components become F_p^d with
    identity structure maps.
    """
    K = pres.K
    p = pres.p
    zero_bar = FpSubspace.zero(p, K.mbar_dim)
    L = SubDiagram(
        K,
        _subspace_preimage(K.p1, zero_bar),
        zero_bar,
        _subspace_preimage(K.p2, zero_bar),
    )
    return _standardize_K(quotient_presentation(pres, L, mode="full"))


def reduce_barf(pres: SeparatedPresentation) -> SeparatedPresentation:
    """Kill a complement of ker fbar, so the reduced fbar is exactly zero."""
    K = pres.K
    Lbar = fp_complement(pres.fbar.kernel())
    L = SubDiagram(
        K,
        _subspace_preimage(K.p1, Lbar),
        Lbar,
        _subspace_preimage(K.p2, Lbar),
    )
    out = quotient_presentation(pres, L, mode="full")
    if not out.fbar.is_zero():
        raise AssertionError("reduction failed to annihilate fbar")
    return out


def _swap(pres: SeparatedPresentation) -> SeparatedPresentation:
    """Exchange the two sides of both diagrams."""

    def flip(D: PullbackDiagram) -> PullbackDiagram:
        return PullbackDiagram(D.p, D.M2, D.M1, D.mbar_dim, D.p2, D.p1)

    m = DiagramMorphism(
        flip(pres.K), flip(pres.S), pres.f2, pres.f1, pres.fbar
    )
    return SeparatedPresentation(m)


def _mono_step(pres: SeparatedPresentation) -> SeparatedPresentation:
    """One-sided quotient making f_2 injective (requires fbar = 0)."""
    K = pres.K
    L2 = pres.f2.kernel_lattice()
    Lbar = _image_subspace(K.p2, L2)
    L1 = _subspace_preimage(K.p1, Lbar)
    L = SubDiagram(K, L1, Lbar, L2)
    return quotient_presentation(pres, L, mode="target-only")


def reduce_monos(pres: SeparatedPresentation) -> SeparatedPresentation:
    """Make both f_1 and f_2 injective.  Requires fbar = 0.

    First quotients away ker f_2 (one-sided, touching only S_1 on the
    target), then the mirror image for f_1; the second step preserves the
    injectivity gained in the first, which is asserted at the end.
    """
    if not pres.fbar.is_zero():
        raise HypothesisViolation("fbar-not-zero", "run the fbar reduction first")
    out = _mono_step(pres)
    out = _swap(_mono_step(_swap(out)))
    for i in (1, 2):
        if not out.morphism.component(i).is_injective():
            raise AssertionError(f"f{i} failed to become injective")
    return out


def reduce_sequential(pres: SeparatedPresentation) -> "RDiagram":
    """The three elementary reductions in order, then extraction."""
    return _extract_rdiagram(reduce_monos(reduce_barf(reduce_K(pres))))


def reduce_combined(pres: SeparatedPresentation) -> "RDiagram":
    """Single-shot reduction by the combined sub-diagram.

    With T_i = ker f_i, Tbar_i = q_i(T_i) and U a complement of ker fbar,
    quotients by L = (q_1^{-1}(U + Tbar_2) + T_1, U + Tbar_1 + Tbar_2,
    q_2^{-1}(U + Tbar_1) + T_2).  This sub-diagram does not satisfy the
    stepwise hypotheses, but the resulting quotient is the same as running
    the three elementary reductions; the result is validated as an
    R-diagram and the vanishing of the reduced fbar is asserted.
    """
    K = pres.K
    T1 = pres.f1.kernel_lattice()
    T2 = pres.f2.kernel_lattice()
    Tbar1 = _image_subspace(K.p1, T1)
    Tbar2 = _image_subspace(K.p2, T2)
    U = fp_complement(pres.fbar.kernel())
    L = SubDiagram(
        K,
        _subspace_preimage(K.p1, U.sum(Tbar2)).sum(T1),
        U.sum(Tbar1).sum(Tbar2),
        _subspace_preimage(K.p2, U.sum(Tbar1)).sum(T2),
    )
    out = _apply_quotient(pres, L, quotient_target_right=True)
    if not out.fbar.is_zero():
        raise AssertionError("combined reduction failed to annihilate fbar")
    return _extract_rdiagram(out)


class RDiagram:
    """The reduced form: K = F_p^kdim mapped into S_1 and S_2.

    ``q1``/``q2`` are integer matrices sending the standard basis of K to
    generator coordinates of the S components.  Construction checks shapes
    only; ``validate_rdiagram`` decides the semantic conditions.
    """

    __slots__ = ("p", "kdim", "S", "q1", "q2")

    def __init__(self, p: int, kdim: int, S: PullbackDiagram, q1: IntMatrix, q2: IntMatrix):
        validate_prime(p)
        if S.p != p:
            raise ValueError("S has a different p")
        if (q1.rows, q1.cols) != (S.M1.gens, kdim):
            raise ValueError("q1 has the wrong shape")
        if (q2.rows, q2.cols) != (S.M2.gens, kdim):
            raise ValueError("q2 has the wrong shape")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "kdim", kdim)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "q1", q1)
        object.__setattr__(self, "q2", q2)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("RDiagram is immutable")

    def structure_matrix(self, i: int) -> IntMatrix:
        return self.q1 if i == 1 else self.q2

    def __repr__(self) -> str:
        return (
            f"RDiagram(p={self.p}, kdim={self.kdim}, S1={self.S.M1.normal_form()}, "
            f"Sbar_dim={self.S.mbar_dim}, S2={self.S.M2.normal_form()})"
        )


class RDiagramReport:
    """Pass/fail per R-diagram condition, with witnesses for failures."""

    __slots__ = ("checks",)

    def __init__(self, checks: tuple):
        object.__setattr__(self, "checks", checks)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("RDiagramReport is immutable")

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.checks)

    def failed(self) -> list[str]:
        return [name for name, passed, _ in self.checks if not passed]

    def __repr__(self) -> str:
        shown = ", ".join(
            f"{name}={'ok' if passed else f'FAIL({witness})'}"
            for name, passed, witness in self.checks
        )
        return f"RDiagramReport({shown})"


def validate_rdiagram(rd: RDiagram) -> RDiagramReport:
    """Check every R-diagram condition.

    - q_i well-defined: p * (each column) lies in the relations of S_i;
    - q_i injective as a module map out of (Z/p)^kdim;
    - p_i after q_i vanishes mod p;
    - the S diagram is separated.
    """
    checks = []
    full_k = Lattice.scaled_full(rd.kdim, rd.p)
    for i in (1, 2):
        q = rd.structure_matrix(i)
        mod = rd.S.component(i)
        bad = next(
            (
                j
                for j in range(rd.kdim)
                if not mod.relations.contains([rd.p * x for x in q.column(j)])
            ),
            None,
        )
        checks.append((f"q{i}-torsion-image", bad is None, bad))
        ker = preimage_lattice(q, mod.relations)
        mono = full_k.contains_lattice(ker)
        witness = None
        if not mono:
            witness = next(col for col in ker.basis if not full_k.contains(col))
        checks.append((f"q{i}-mono", mono, witness))
        composite = rd.S.structure_map(i) @ FpMatrix.from_int(q, rd.p)
        checks.append((f"p{i}q{i}-zero", composite.is_zero(), None))
    sep = is_separated(rd.S)
    checks.append(("s-separated", sep.separated, sep.witnesses or None))
    return RDiagramReport(tuple(checks))


def _extract_rdiagram(pres: SeparatedPresentation) -> RDiagram:
    """Read an R-diagram off a fully reduced presentation."""
    if not pres.fbar.is_zero():
        raise AssertionError("fbar must vanish before extracting an R-diagram")
    std = _standardize_K(pres)
    rd = RDiagram(
        std.p, std.K.mbar_dim, std.S, std.f1.matrix, std.f2.matrix
    )
    report = validate_rdiagram(rd)
    if not report.ok:
        raise AssertionError(f"reduction produced an invalid R-diagram: {report}")
    return rd


def rdiagram_as_presentation(rd: RDiagram) -> SeparatedPresentation:
    """Re-wrap an R-diagram as a separated presentation (K elementary)."""
    K = _elementary_diagram(rd.p, rd.kdim)
    f1 = ModuleMap(K.M1, rd.S.M1, rd.q1)
    f2 = ModuleMap(K.M2, rd.S.M2, rd.q2)
    fbar = FpMatrix.zeros(rd.p, rd.S.mbar_dim, rd.kdim)
    return SeparatedPresentation(DiagramMorphism(K, rd.S, f1, f2, fbar))

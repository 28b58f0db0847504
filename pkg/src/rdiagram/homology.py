"""Homology of complexes of free modules over a p-pullback ring.

A complex is stored as parallel integer differentials (d1, d2) that agree
mod p; the bar differential is their common reduction.  For a degree n
the pipeline builds a canonical separated diagram Q for ker d, rewrites
the incoming differential in Q's generators to obtain a separated
presentation of H^n, and reduces that to an R-diagram.  A closed-form
evaluation of the reduced components acts as an independent cross-check.

The canonical presentation here is strictly more general than building
Q from the five generator sets alone: the span of those generators can
be a proper submodule of ker d (mixed kernel classes appear whenever the
reductions of ker d1 and ker d2 intersect beyond the reduction of their
integer intersection).  The extra generators repair this, and the
embedding of the resulting pullback is checked against the brute-force
kernel lattice on every construction.
"""

from __future__ import annotations

from typing import Sequence

from .intlinalg import (
    IntMatrix,
    Lattice,
    kernel_basis,
    lattice_intersection,
    preimage_lattice,
    snf,
    solve_in_span,
)
from .fplinalg import (
    FpMatrix,
    FpSubspace,
    fp_complement,
    fp_solve,
    quotient_projection,
    relative_complement,
    validate_prime,
)
from .presentations import ModuleMap, ZModulePresentation
from .pullback import DiagramMorphism, PullbackDiagram, Separation, separate_presented
from .reduction import RDiagram, SeparatedPresentation, free_diagram, reduce_combined

__all__ = [
    "ChainComplexR",
    "ComplexReport",
    "GeneratorSets",
    "CanonicalKernel",
    "ClosedFormComponents",
    "congruent_kernel_lattice",
    "validate_complex",
    "kernel_split",
    "generator_sets",
    "canonical_kernel_presentation",
    "rewrite_differential",
    "homology_presentation",
    "closed_form_components",
    "homology_rdiagram",
]


def congruent_kernel_lattice(p: int, d1: IntMatrix, d2: IntMatrix) -> Lattice:
    """The lattice {(u, v) : d1 u = 0, d2 v = 0, u = v mod p}.

    This is the brute-force model of ker d inside Z^m + Z^m, used as the
    reference the canonical presentation is checked against.
    """
    if d1.cols != d2.cols or d1.rows != d2.rows:
        raise ValueError("the pair must share shapes")
    m = d1.cols
    dom = kernel_basis(d1).direct_sum(kernel_basis(d2))
    eye = IntMatrix.identity(m)
    congruence = preimage_lattice(
        eye.hstack(eye.scale(-1)), Lattice.scaled_full(m, p)
    )
    return lattice_intersection(dom, congruence)


class ChainComplexR:
    """A complex of free modules, one (d1, d2) pair per differential.

    ``degrees[k]`` is the differential out of term k; shapes must chain
    (columns of one equal rows of the previous).  ``ranks`` may be given
    explicitly for complexes with no differentials at all.  Congruence
    mod p and vanishing compositions are semantic conditions reported by
    ``validate_complex``, not enforced here.
    """

    __slots__ = ("p", "degrees", "ranks")

    def __init__(
        self,
        p: int,
        degrees: Sequence[tuple[IntMatrix, IntMatrix]],
        ranks: Sequence[int] | None = None,
    ):
        validate_prime(p)
        degrees = tuple((d1, d2) for d1, d2 in degrees)
        for d1, d2 in degrees:
            if (d1.rows, d1.cols) != (d2.rows, d2.cols):
                raise ValueError("paired differentials must share shapes")
        for (a1, _), (b1, _) in zip(degrees, degrees[1:]):
            if b1.cols != a1.rows:
                raise ValueError("consecutive differentials do not chain")
        if ranks is None:
            if not degrees:
                raise ValueError("ranks are required when there are no differentials")
            ranks = [d.cols for d, _ in degrees] + [degrees[-1][0].rows]
        ranks = tuple(int(r) for r in ranks)
        if any(r < 0 for r in ranks):
            raise ValueError("ranks must be nonnegative")
        if degrees:
            expected = tuple(d.cols for d, _ in degrees) + (degrees[-1][0].rows,)
            if ranks != expected:
                raise ValueError("explicit ranks disagree with differential shapes")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "ranks", ranks)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("ChainComplexR is immutable")

    @property
    def terms(self) -> int:
        return len(self.ranks)

    def rank(self, k: int) -> int:
        return self.ranks[k]

    def pair(self, k: int) -> tuple[IntMatrix, IntMatrix]:
        """The differential out of term k, zero outside the complex."""
        if 0 <= k < len(self.degrees):
            return self.degrees[k]
        if k == -1:
            z = IntMatrix.zeros(self.rank(0), 0)
            return z, z
        if k == self.terms - 1:
            z = IntMatrix.zeros(0, self.rank(k))
            return z, z
        raise ValueError(f"no differential at position {k}")


class ComplexReport:
    """Located congruence/composition failures; empty means valid."""

    __slots__ = ("failures",)

    def __init__(self, failures: tuple):
        object.__setattr__(self, "failures", failures)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("ComplexReport is immutable")

    @property
    def ok(self) -> bool:
        return not self.failures

    def __repr__(self) -> str:
        if self.ok:
            return "ComplexReport(valid)"
        return f"ComplexReport({list(self.failures)!r})"


def validate_complex(C: ChainComplexR) -> ComplexReport:
    """Check the mod-p congruence and d after d = 0, per degree and entry."""
    failures = []
    for k, (d1, d2) in enumerate(C.degrees):
        for i in range(d1.rows):
            for j in range(d1.cols):
                if (d1.entries[i][j] - d2.entries[i][j]) % C.p:
                    failures.append(("congruence", k, (i, j)))
    for k in range(len(C.degrees) - 1):
        for label, pick in (("composition-d1", 0), ("composition-d2", 1)):
            comp = C.degrees[k + 1][pick] @ C.degrees[k][pick]
            for i in range(comp.rows):
                for j in range(comp.cols):
                    if comp.entries[i][j]:
                        failures.append((label, k, (i, j)))
    return ComplexReport(tuple(failures))


def kernel_split(f: IntMatrix, g: IntMatrix) -> tuple[list, list]:
    """Split ker f = K + U with K = ker f ∩ ker g, both parts free.

    The coordinates of K inside ker f form a saturated sublattice, so a
    Smith transform of its basis yields a unimodular change of basis of
    the coordinate space whose leading columns span K and whose trailing
    columns span a genuine integral complement.  Both the sum equality
    and the zero intersection are verified before returning.
    """
    if f.cols != g.cols:
        raise ValueError("the two maps must share their domain")
    B = kernel_basis(f)
    r = B.rank
    Bmat = B.basis_matrix()
    inner = kernel_basis(g @ Bmat)
    s = inner.rank
    M = inner.basis_matrix()
    U, _, _ = snf(M)
    Uinv = _unimodular_inverse(U)
    kcols = [Uinv.column(j) for j in range(s)]
    ucols = [Uinv.column(j) for j in range(s, r)]
    K = [tuple(Bmat.mul_vec(c)) for c in kcols]
    Ub = [tuple(Bmat.mul_vec(c)) for c in ucols]
    ambient = f.cols
    ksp = Lattice.from_generators(ambient, K)
    usp = Lattice.from_generators(ambient, Ub)
    if ksp.sum(usp) != B or lattice_intersection(ksp, usp).rank:
        raise AssertionError("kernel splitting failed to be a direct sum")
    return K, Ub


def _unimodular_inverse(U: IntMatrix) -> IntMatrix:
    from .intlinalg import hnf

    H, T = hnf(U)
    if H != IntMatrix.identity(U.rows):
        raise ValueError("matrix is not unimodular")
    return T


class GeneratorSets:
    """The five generator families attached to a congruent pair.

    ``v12`` spans ker d1 ∩ ker d2; ``v1``/``v2`` complete it to bases of
    the respective kernels; ``vbar`` completes the reductions of both
    kernels to a basis of ker dbar; ``vbarc`` completes ker dbar to the
    whole mod-p space.
    """

    __slots__ = ("v12", "v1", "v2", "vbar", "vbarc")

    def __init__(self, v12, v1, v2, vbar, vbarc):
        object.__setattr__(self, "v12", tuple(map(tuple, v12)))
        object.__setattr__(self, "v1", tuple(map(tuple, v1)))
        object.__setattr__(self, "v2", tuple(map(tuple, v2)))
        object.__setattr__(self, "vbar", tuple(map(tuple, vbar)))
        object.__setattr__(self, "vbarc", tuple(map(tuple, vbarc)))

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("GeneratorSets is immutable")


def generator_sets(d1: IntMatrix, d2: IntMatrix, p: int) -> GeneratorSets:
    """Compute all five generator families for a congruent pair."""
    validate_prime(p)
    m = d1.cols
    v12, v1 = kernel_split(d1, d2)
    v12b, v2 = kernel_split(d2, d1)
    if Lattice.from_generators(m, v12) != Lattice.from_generators(m, v12b):
        raise AssertionError("the two kernel splits disagree on the intersection")
    kerbar = FpMatrix.from_int(d1, p).kernel()
    reduced = FpSubspace.from_vectors(p, m, list(v12) + list(v1) + list(v2))
    vbar = relative_complement(reduced, kerbar)
    vbarc = list(fp_complement(kerbar).basis)
    return GeneratorSets(v12, v1, v2, vbar, vbarc)


class CanonicalKernel:
    """Separated diagram of ker d together with its construction data.

    ``plain_form`` records whether the plain five-set generators already
    span the kernel (no mixed classes were needed); the embedded pullback
    equals the brute-force kernel lattice either way.
    """

    __slots__ = ("separation", "sets", "mixed", "kernel_lattice")

    def __init__(self, separation: Separation, sets: GeneratorSets, mixed, kernel_lattice):
        object.__setattr__(self, "separation", separation)
        object.__setattr__(self, "sets", sets)
        object.__setattr__(self, "mixed", tuple(mixed))
        object.__setattr__(self, "kernel_lattice", kernel_lattice)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("CanonicalKernel is immutable")

    @property
    def diagram(self) -> PullbackDiagram:
        return self.separation.diagram

    @property
    def plain_form(self) -> bool:
        return not self.mixed


def canonical_kernel_presentation(d1: IntMatrix, d2: IntMatrix, p: int) -> CanonicalKernel:
    """Separated presentation of {(x, y) : d1 x = 0, d2 y = 0, x = y mod p}.

    Generators, in order: diagonal classes of the kernel intersection,
    mixed classes (one per dimension by which the reduced kernels meet
    beyond the reduced intersection), then p-scaled one-sided classes.
    The pullback of the resulting diagram, embedded back into Z^m + Z^m,
    is asserted to equal the kernel lattice exactly.
    """
    gs = generator_sets(d1, d2, p)
    m = d1.cols
    v1full = list(gs.v12) + list(gs.v1)
    v2full = list(gs.v12) + list(gs.v2)
    q1span = FpSubspace.from_vectors(p, m, v1full)
    q2span = FpSubspace.from_vectors(p, m, v2full)
    meet = q1span.intersect(q2span)
    diag_span = FpSubspace.from_vectors(p, m, list(gs.v12))
    mixed = []
    if meet != diag_span:
        B1 = IntMatrix.from_cols(v1full, rows=m)
        B2 = IntMatrix.from_cols(v2full, rows=m)
        B1bar = FpMatrix.from_int(B1, p)
        B2bar = FpMatrix.from_int(B2, p)
        for z in relative_complement(diag_span, meet):
            c1 = fp_solve(B1bar, z)
            c2 = fp_solve(B2bar, z)
            if c1 is None or c2 is None:  # pragma: no cover - meet is in both spans
                raise AssertionError("mixed class has no preimage in a kernel")
            mixed.append((tuple(B1.mul_vec(c1)), tuple(B2.mul_vec(c2))))
    gens = (
        [tuple(v) + tuple(v) for v in gs.v12]
        + [u + w for u, w in mixed]
        + [tuple(p * x for x in v) + (0,) * m for v in gs.v1]
        + [(0,) * m + tuple(p * x for x in v) for v in gs.v2]
    )
    lat = congruent_kernel_lattice(p, d1, d2)
    sep = separate_presented(p, m, m, lat, Lattice.zero(2 * m), generators=gens)
    if sep.embedded_pullback_lattice() != lat:
        raise AssertionError("embedded pullback differs from the kernel lattice")
    return CanonicalKernel(sep, gs, mixed, lat)


def rewrite_differential(
    d_prev: tuple[IntMatrix, IntMatrix], canon: CanonicalKernel
) -> DiagramMorphism:
    """Express an incoming differential in the kernel diagram's generators.

    Each standard generator e_j of the free source is sent to the class
    of the pair (d1 e_j, d2 e_j).  Coordinates are found by presented-
    module membership solving; failure to solve means the image is not in
    the kernel (an invalid complex) and raises with the offending column.
    The bar component is computed along both structure-map routes, which
    must agree.
    """
    d1p, d2p = d_prev
    sep = canon.separation
    p = sep.p
    D = sep.diagram
    ell = d1p.cols
    K = free_diagram(p, ell)
    cols1, cols2 = [], []
    for j in range(ell):
        pair = tuple(d1p.column(j)) + tuple(d2p.column(j))
        try:
            cols1.append(sep.class_coordinates(pair, side=1))
            cols2.append(sep.class_coordinates(pair, side=2))
        except ValueError as exc:
            raise ValueError(
                f"differential column {j} cannot be expressed in the kernel "
                f"presentation: {exc}"
            ) from exc
    m1 = IntMatrix.from_cols(cols1, rows=D.M1.gens)
    m2 = IntMatrix.from_cols(cols2, rows=D.M2.gens)
    fbar = D.p1 @ FpMatrix.from_int(m1, p)
    other = D.p2 @ FpMatrix.from_int(m2, p)
    if fbar != other:
        raise AssertionError("the two routes to the bar component disagree")
    f1 = ModuleMap(K.M1, D.M1, m1)
    f2 = ModuleMap(K.M2, D.M2, m2)
    return DiagramMorphism(K, D, f1, f2, fbar)


def _require_valid(C: ChainComplexR, n: int) -> None:
    if not 0 <= n < C.terms:
        raise ValueError(f"degree {n} outside the complex (0..{C.terms - 1})")
    report = validate_complex(C)
    if not report.ok:
        raise ValueError(f"invalid complex: {report}")


def homology_presentation(C: ChainComplexR, n: int) -> SeparatedPresentation:
    """Separated presentation of H^n: free source of rank C^{n-1} onto ker d."""
    _require_valid(C, n)
    dout1, dout2 = C.pair(n)
    canon = canonical_kernel_presentation(dout1, dout2, C.p)
    return SeparatedPresentation(rewrite_differential(C.pair(n - 1), canon))


class ClosedFormComponents:
    """Reduced components evaluated directly, bypassing diagram quotients."""

    __slots__ = ("p", "kdim", "sbar_dim", "s1", "s2", "q1", "q2")

    def __init__(self, p, kdim, sbar_dim, s1, s2, q1, q2):
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "kdim", kdim)
        object.__setattr__(self, "sbar_dim", sbar_dim)
        object.__setattr__(self, "s1", s1)
        object.__setattr__(self, "s2", s2)
        object.__setattr__(self, "q1", q1)
        object.__setattr__(self, "q2", q2)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("ClosedFormComponents is immutable")


def closed_form_components(C: ChainComplexR, n: int) -> ClosedFormComponents:
    """Evaluate the reduced components of H^n in one pass.

    With T_i the kernel of the rewritten component f_i and U a complement
    of ker fbar, the sub-diagram quotiented away in the general reduction
    is (q1^{-1}(U + Tbar_2) + T_1, U + Tbar_1 + Tbar_2, q2^{-1}(U + Tbar_1)
    + T_2); here the source structure maps are identities, so everything
    is evaluated directly on the kernel diagram's presentations: each S_i
    is Q_i modulo f_i of its sub-diagram component, Sbar is Qbar modulo
    the image of fbar, and the K space is the quotient of F_p^ell by the
    bar component of the sub-diagram.  T_i is computed as an honest
    kernel rather than from the one-sided generator families: the
    families can overshoot it whenever a kernel element's partner class
    is not a p-th multiple of a module element, and the direct kernels
    stay correct in that case too.
    """
    _require_valid(C, n)
    p = C.p
    dout1, dout2 = C.pair(n)
    canon = canonical_kernel_presentation(dout1, dout2, p)
    morphism = rewrite_differential(C.pair(n - 1), canon)
    D = canon.diagram
    f1, f2, fbar = morphism.f1, morphism.f2, morphism.fbar
    ell = f1.matrix.cols

    T1 = f1.kernel_lattice()
    T2 = f2.kernel_lattice()
    Tbar1 = FpSubspace.from_vectors(p, ell, [v for v in T1.basis])
    Tbar2 = FpSubspace.from_vectors(p, ell, [v for v in T2.basis])
    U = fp_complement(fbar.kernel())
    Lbar = U.sum(Tbar1).sum(Tbar2)
    kdim = ell - Lbar.dim

    im_fbar = FpSubspace.from_vectors(
        p, D.mbar_dim, [fbar.column(j) for j in range(ell)]
    )
    fbar_Lbar = FpSubspace.from_vectors(
        p, D.mbar_dim, [fbar.mul_vec(v) for v in Lbar.basis]
    )
    if fbar_Lbar != im_fbar:
        raise AssertionError("the sub-diagram fails to cover the bar image")
    sbar_dim = D.mbar_dim - im_fbar.dim

    def side_quotient(fmap, Tself, Tbar_other):
        lifted = Lattice.from_generators(ell, list(U.sum(Tbar_other).basis))
        L = lifted.sum(Lattice.scaled_full(ell, p)).sum(Tself)
        image = Lattice.from_generators(
            fmap.target.gens, [fmap.matrix.mul_vec(v) for v in L.basis]
        )
        return ZModulePresentation(
            fmap.target.gens, fmap.target.relations.sum(image)
        ), L

    s1, L1 = side_quotient(f1, T1, Tbar2)
    s2, L2 = side_quotient(f2, T2, Tbar1)

    _, section = quotient_projection(Lbar)
    lifts = [section.column(j) for j in range(kdim)]
    q1 = IntMatrix.from_cols([f1.matrix.mul_vec(w) for w in lifts], rows=s1.gens)
    q2 = IntMatrix.from_cols([f2.matrix.mul_vec(w) for w in lifts], rows=s2.gens)
    if lifts and Lbar.dim:
        shifted = [a + b for a, b in zip(lifts[0], Lbar.basis[0])]
        if not s1.elements_equal(q1.column(0), f1.matrix.mul_vec(shifted)):
            raise AssertionError("component map depends on the choice of lift")
        if not s2.elements_equal(q2.column(0), f2.matrix.mul_vec(shifted)):
            raise AssertionError("component map depends on the choice of lift")
    return ClosedFormComponents(p, kdim, sbar_dim, s1, s2, q1, q2)


def _divisibility_check(C: ChainComplexR, n: int, gs_out: GeneratorSets) -> None:
    """One-sided images of the incoming differential must be p-divisible.

    A generator of the complement of the kernel intersection on side 2
    dies under d2, so its d1-image vanishes mod p; both the raw entries
    and the coordinates on the one-sided kernel generators must then be
    divisible by p.  Violation indicates corrupted inputs and is fatal.
    """
    p = C.p
    din1, din2 = C.pair(n - 1)
    w = generator_sets(din1, din2, p)
    for label, dmat, vecs, basis in (
        ("d1-image of a side-2 generator", din1, w.v2, list(gs_out.v12) + list(gs_out.v1)),
        ("d2-image of a side-1 generator", din2, w.v1, list(gs_out.v12) + list(gs_out.v2)),
    ):
        for vec in vecs:
            image = dmat.mul_vec(vec)
            if any(x % p for x in image):
                raise ArithmeticError(f"{label} is not divisible by {p}: {image}")
            if not basis and any(image):
                raise ArithmeticError(f"{label} lies outside the kernel")
            if basis:
                coords = solve_in_span(
                    IntMatrix.from_cols(basis, rows=dmat.rows), image
                )
                if coords is None:
                    raise ArithmeticError(f"{label} lies outside the kernel")
                offset = len(gs_out.v12)
                if any(c % p for c in coords[offset:]):
                    raise ArithmeticError(
                        f"{label} has one-sided coordinates not divisible by {p}"
                    )


def homology_rdiagram(C: ChainComplexR, n: int) -> RDiagram:
    """The R-diagram of H^n, with the closed form verified against it."""
    _require_valid(C, n)
    dout1, dout2 = C.pair(n)
    canon = canonical_kernel_presentation(dout1, dout2, C.p)
    _divisibility_check(C, n, canon.sets)
    pres = SeparatedPresentation(rewrite_differential(C.pair(n - 1), canon))
    rd = reduce_combined(pres)
    cf = closed_form_components(C, n)
    agree = (
        rd.kdim == cf.kdim
        and rd.S.mbar_dim == cf.sbar_dim
        and rd.S.M1.normal_form() == cf.s1.normal_form()
        and rd.S.M2.normal_form() == cf.s2.normal_form()
    )
    if not agree:
        raise AssertionError(
            "closed-form components disagree with the reduced diagram: "
            f"kdim {cf.kdim} vs {rd.kdim}, sbar {cf.sbar_dim} vs {rd.S.mbar_dim}, "
            f"S1 {cf.s1.normal_form()} vs {rd.S.M1.normal_form()}, "
            f"S2 {cf.s2.normal_form()} vs {rd.S.M2.normal_form()}"
        )
    return rd

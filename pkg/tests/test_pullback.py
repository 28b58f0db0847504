"""Ring arithmetic, separation, and morphism criteria: frozen cases + properties."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdiagram.fplinalg import FpMatrix, fp_rank
from rdiagram.intlinalg import IntMatrix, Lattice
from rdiagram.presentations import ModuleMap, ZModulePresentation
from rdiagram.pullback import (
    DiagramMorphism,
    LatticeRModule,
    PPRElement,
    PullbackDiagram,
    epi_conditions,
    is_mono,
    is_mono_direct,
    is_separated,
    kernel_diagram,
    pullback_group,
    quotient_ring_check,
    separate,
    separate_morphism,
    separate_presented,
)
from rdiagram.randomgen import (
    random_block_morphism,
    random_rmodule,
    rclose,
)


class TestRingElements:
    def test_unit_acts_trivially(self):
        one = PPRElement.one(5)
        assert one.act_on_pair((3, -1), (7,)) == ((3, -1), (7,))
        x = PPRElement(5, 2, 7)
        assert one * x == x

    def test_ideal_generators_multiply_to_zero(self):
        assert PPRElement(2, 2, 0) * PPRElement(2, 0, 2) == PPRElement.zero(2)

    def test_addition(self):
        assert PPRElement(2, 3, 1) + PPRElement(2, 1, 3) == PPRElement(2, 4, 4)

    def test_congruence_enforced(self):
        with pytest.raises(ValueError):
            PPRElement(2, 1, 0)

    def test_mixing_p_rejected(self):
        with pytest.raises(ValueError):
            PPRElement(2, 1, 1) * PPRElement(3, 1, 1)

    def test_bar_residue(self):
        assert PPRElement(3, 4, 7).bar == 1


@pytest.mark.parametrize("p", [2, 3, 5])
def test_quotient_ring_check(p):
    assert quotient_ring_check(p)


def _free_diagram(p, n):
    eye = FpMatrix.identity(p, n)
    free = ZModulePresentation.free(n)
    return PullbackDiagram(p, free, free, n, eye, eye)


class TestPullbackGroup:
    def test_free_rank_one_recovers_the_ring(self):
        pg = pullback_group(_free_diagram(2, 1))
        assert pg.matching.basis == ((1, 1), (0, 2))
        assert pg.presentation.normal_form() == (2, ())
        pg.as_rmodule()  # closure must hold

    def test_zero_middle_gives_direct_sum(self):
        M1 = ZModulePresentation(1, Lattice.from_generators(1, [(4,)]))  # Z/4
        M2 = ZModulePresentation.free(2)
        D = PullbackDiagram(3, M1, M2, 0, FpMatrix.zeros(3, 0, 1), FpMatrix.zeros(3, 0, 2))
        assert pullback_group(D).presentation.normal_form() == (2, (4,))

    def test_identity_maps_give_diagonal(self):
        for p in (2, 3):
            E = ZModulePresentation.fp_elementary(p, 1)
            eye = FpMatrix.identity(p, 1)
            D = PullbackDiagram(p, E, E, 1, eye, eye)
            assert pullback_group(D).presentation.normal_form() == (0, (p,))


class TestSeparate:
    def test_ring_itself(self):
        sep = separate(LatticeRModule.free(2, 1))
        D = sep.diagram
        assert D.M1.normal_form() == (1, ())
        assert D.M2.normal_form() == (1, ())
        assert D.mbar_dim == 1
        assert is_separated(D).separated

    def test_zero_module(self):
        S = LatticeRModule(3, 1, 1, Lattice.zero(2))
        sep = separate(S)
        assert sep.diagram.M1.is_trivial()
        assert sep.diagram.M2.is_trivial()
        assert sep.diagram.mbar_dim == 0

    def test_first_ideal(self):
        # S = P_1 = {(2a, 0)} inside Z + Z at p = 2
        S = LatticeRModule.from_generators(2, 1, 1, [(2, 0)])
        sep = separate(S)
        assert sep.diagram.M1.normal_form() == (1, ())
        assert sep.diagram.M2.normal_form() == (0, (2,))
        assert sep.diagram.mbar_dim == 1
        assert sep.p1s == Lattice.from_generators(2, [(4, 0)])
        assert sep.embedded_pullback_lattice() == S.lattice
        assert pullback_group(sep.diagram).presentation.normal_form() == (1, ())

    def test_non_closed_input_rejected(self):
        # (0,p)*(1,2) = (0,4) falls outside the span of (1,2)
        with pytest.raises(ValueError):
            LatticeRModule.from_generators(2, 1, 1, [(1, 2)])


class TestIsSeparated:
    @pytest.mark.parametrize("p,n", [(2, 1), (3, 2), (5, 3)])
    def test_free_diagram_separated(self, p, n):
        report = is_separated(_free_diagram(p, n))
        assert report.preseparated and report.separated
        assert report.witnesses == ()

    def test_zero_structure_map_not_preseparated(self):
        free = ZModulePresentation.free(1)
        D = PullbackDiagram(
            2, free, free, 1, FpMatrix.zeros(2, 1, 1), FpMatrix.identity(2, 1)
        )
        report = is_separated(D)
        assert not report.preseparated and not report.separated
        assert ("not-surjective", 1, None) in report.witnesses

    def test_naive_kernel_diagram_not_separated(self):
        # kernels of d1 = [2 0], d2 = [0 2] at p = 2, mapped into ker dbar = F_2^2
        free = ZModulePresentation.free(1)
        p1 = FpMatrix.from_rows(2, [[0], [1]])
        p2 = FpMatrix.from_rows(2, [[1], [0]])
        D = PullbackDiagram(2, free, free, 2, p1, p2)
        report = is_separated(D)
        assert not report.preseparated
        assert not report.separated


class TestSeparateMorphism:
    def test_identity_blocks_give_identity_triple(self):
        sep = separate(LatticeRModule.free(3, 2))
        eye = IntMatrix.identity(2)
        m = separate_morphism(eye, eye, sep, sep)
        k = len(sep.generators)
        for j in range(k):
            e = tuple(int(t == j) for t in range(k))
            assert m.source.M1.elements_equal(m.f1.matrix.column(j), e)
            assert m.source.M2.elements_equal(m.f2.matrix.column(j), e)
        assert m.fbar == FpMatrix.identity(3, sep.diagram.mbar_dim)

    def test_multiplication_by_ideal_generator(self):
        # (x, y) -> (2x, 0) on R at p = 2: f1 = 2*id, f2 = 0, fbar = 0
        sep = separate(LatticeRModule.free(2, 1))
        m = separate_morphism(
            IntMatrix.from_rows([[2]]), IntMatrix.from_rows([[0]]), sep, sep
        )
        k = len(sep.generators)
        for j in range(k):
            doubled = tuple(2 * int(t == j) for t in range(k))
            assert m.target.M1.elements_equal(m.f1.matrix.column(j), doubled)
            assert m.target.M2.elements_equal(m.f2.matrix.column(j), (0,) * k)
        assert m.fbar.is_zero()

    def test_zero_map_gives_zero_triple(self):
        sep = separate(LatticeRModule.free(2, 2))
        z = IntMatrix.zeros(2, 2)
        m = separate_morphism(z, z, sep, sep)
        assert m.f1.matrix.is_zero() and m.f2.matrix.is_zero() and m.fbar.is_zero()

    def test_image_escaping_target_rejected(self):
        src = separate(LatticeRModule.free(2, 1))
        tgt = separate(LatticeRModule.from_generators(2, 1, 1, [(2, 0)]))
        with pytest.raises(ValueError):
            separate_morphism(
                IntMatrix.from_rows([[1]]), IntMatrix.from_rows([[1]]), src, tgt
            )


class TestMono:
    def test_identity_is_mono(self):
        D = _free_diagram(3, 2)
        m = DiagramMorphism.identity(D)
        assert is_mono(m) and is_mono_direct(m)

    def test_scaling_by_p_is_mono(self):
        sep = separate(LatticeRModule.free(2, 1))
        m = separate_morphism(
            IntMatrix.from_rows([[2]]), IntMatrix.from_rows([[2]]), sep, sep
        )
        assert is_mono(m) and is_mono_direct(m)

    def test_zero_out_of_elementary_diagram_not_mono(self):
        p = 2
        E = ZModulePresentation.fp_elementary(p, 1)
        eye = FpMatrix.identity(p, 1)
        K = PullbackDiagram(p, E, E, 1, eye, eye)
        T = _free_diagram(p, 1)
        zero = ModuleMap(E, T.M1, IntMatrix.zeros(1, 1))
        m = DiagramMorphism(K, T, zero, zero, FpMatrix.zeros(p, 1, 1))
        assert not is_mono(m)
        assert not is_mono_direct(m)


class TestEpi:
    def test_identity_all_conditions_hold(self):
        m = DiagramMorphism.identity(_free_diagram(2, 2))
        report = epi_conditions(m)
        assert report.cond1 and report.cond2 and report.cond3 and report.cond4
        assert report.direct

    def test_zero_onto_nonzero_all_false(self):
        sep = separate(LatticeRModule.free(2, 1))
        z = IntMatrix.zeros(1, 1)
        m = separate_morphism(z, z, sep, sep)
        report = epi_conditions(m)
        assert not report.any_condition()
        assert not report.direct

    def test_kernel_diagram_of_identity_is_zero(self):
        m = DiagramMorphism.identity(_free_diagram(3, 2))
        kd = kernel_diagram(m)
        assert kd.kerfbar.dim == 0
        assert kd.diagram.M1.is_trivial()
        assert kd.diagram.M2.is_trivial()


# ---------------------------------------------------------------------------
# properties over seeded random modules and morphisms
# ---------------------------------------------------------------------------

ps = st.sampled_from([2, 3, 5])
seeds = st.integers(min_value=0, max_value=10**9)


@given(p=ps, seed=seeds, a=st.integers(1, 3), b=st.integers(1, 3))
@settings(max_examples=120, deadline=None)
def test_separate_recovers_module(p, seed, a, b):
    S = random_rmodule(random.Random(seed), p, a, b)
    sep = separate(S)
    assert sep.embedded_pullback_lattice() == S.lattice


@given(p=ps, seed=seeds, a=st.integers(1, 3), b=st.integers(1, 3))
@settings(max_examples=60, deadline=None)
def test_pullback_of_separated_diagram_is_free_of_module_rank(p, seed, a, b):
    S = random_rmodule(random.Random(seed), p, a, b)
    sep = separate(S)
    pres = pullback_group(sep.diagram).presentation
    assert pres.normal_form() == (S.lattice.rank, ())


def _reseparate(D):
    """Separate the honest pullback module (matching lattice mod relations)."""
    pg = pullback_group(D)
    return separate_presented(
        D.p, D.M1.gens, D.M2.gens, pg.matching, pg.relations
    ).diagram


@given(p=ps, seed=seeds, a=st.integers(1, 3), b=st.integers(1, 3))
@settings(max_examples=60, deadline=None)
def test_separate_after_pullback_reproduces_components(p, seed, a, b):
    S = random_rmodule(random.Random(seed), p, a, b)
    D = separate(S).diagram
    again = _reseparate(D)
    assert again.M1.normal_form() == D.M1.normal_form()
    assert again.M2.normal_form() == D.M2.normal_form()
    assert again.mbar_dim == D.mbar_dim


def test_separate_after_pullback_on_torsion_diagram():
    # the diagonal Z/p diagram is separated; its pullback must round-trip
    for p in (2, 3):
        E = ZModulePresentation.fp_elementary(p, 1)
        eye = FpMatrix.identity(p, 1)
        D = PullbackDiagram(p, E, E, 1, eye, eye)
        assert is_separated(D).separated
        again = _reseparate(D)
        assert again.M1.normal_form() == (0, (p,))
        assert again.M2.normal_form() == (0, (p,))
        assert again.mbar_dim == 1


@given(p=ps, seed=seeds, a=st.integers(1, 2), b=st.integers(1, 2))
@settings(max_examples=60, deadline=None)
def test_closed_sublattices_separate_cleanly(p, seed, a, b):
    rng = random.Random(seed)
    S = random_rmodule(rng, p, a, b)
    picked = [col for col in S.lattice.basis if rng.random() < 0.7]
    scaled = [tuple(rng.choice((1, p)) * x for x in col) for col in picked]
    sub = rclose(p, a, b, Lattice.from_generators(a + b, scaled))
    report = is_separated(separate(LatticeRModule(p, a, b, sub)).diagram)
    assert report.separated


@given(p=ps, seed=seeds)
@settings(max_examples=120, deadline=None)
def test_mono_criterion_agrees_with_direct_kernel(p, seed):
    rng = random.Random(seed)
    src = random_rmodule(rng, p, rng.randint(1, 2), rng.randint(1, 2))
    m, _, _ = random_block_morphism(rng, src, rng.randint(1, 2), rng.randint(1, 2))
    assert is_mono(m) == is_mono_direct(m)


@given(p=ps, seed=seeds)
@settings(max_examples=80, deadline=None)
def test_epi_conditions_imply_direct_surjectivity(p, seed):
    rng = random.Random(seed)
    src = random_rmodule(rng, p, rng.randint(1, 2), rng.randint(1, 2))
    m, _, _ = random_block_morphism(rng, src, rng.randint(1, 2), rng.randint(1, 2))
    report = epi_conditions(m)
    if report.any_condition():
        assert report.direct


@given(p=ps, seed=seeds)
@settings(max_examples=60, deadline=None)
def test_image_closure_morphisms_are_direct_epis(p, seed):
    rng = random.Random(seed)
    src = random_rmodule(rng, p, rng.randint(1, 2), rng.randint(1, 2))
    m, _, _ = random_block_morphism(
        rng, src, rng.randint(1, 2), rng.randint(1, 2), extra_target_gens=0
    )
    assert epi_conditions(m).direct

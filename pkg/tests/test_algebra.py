from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gradedlie.algebra import (
    BasisElement,
    GradedAlgebra,
    InvalidAlgebraError,
)
from gradedlie import builders
from gradedlie.builders import WindowSpec


def unit(i):
    return {i: Fraction(1)}


def el(alg, **coeffs):
    """Element from label=coefficient keyword pairs ('L_1' spelled 'L_1')."""
    return {alg.index_of(lbl): Fraction(c) for lbl, c in coeffs.items()}


def sv_el(alg, pairs):
    return {alg.index_of(lbl): Fraction(c) for lbl, c in pairs.items()}


class TestBracket:
    def test_sv_l1_lm1(self, sv2):
        # central part vanishes at n = -1
        out = sv2.bracket(sv_el(sv2, {"L_1": 1}), sv_el(sv2, {"L_-1": 1}))
        assert out == sv_el(sv2, {"L_0": -2})

    def test_sv_l2_lm2_central(self, sv2):
        out = sv2.bracket(sv_el(sv2, {"L_2": 1}), sv_el(sv2, {"L_-2": 1}))
        assert out == sv_el(sv2, {"L_0": -4, "C": Fraction(-1, 2)})

    def test_sv_m_y_zero(self, sv2):
        assert sv2.bracket(sv_el(sv2, {"M_1": 1}), sv_el(sv2, {"Y_1/2": 1})) == {}

    def test_out_of_range_index(self, sv2):
        with pytest.raises(ValueError):
            sv2.bracket({999: Fraction(1)}, unit(0))

    def test_bilinearity(self, sv2):
        x = sv_el(sv2, {"L_1": 2, "M_-1": Fraction(1, 3)})
        y = sv_el(sv2, {"L_-2": 1, "Y_1/2": -1})
        z = sv_el(sv2, {"L_0": 5})
        lhs = sv2.bracket(x, {k: v for k, v in {**y, **z}.items()})
        # y and z have disjoint support here, so the merge above is y + z
        rhs = sv2.bracket(x, y)
        for k, v in sv2.bracket(x, z).items():
            rhs[k] = rhs.get(k, Fraction(0)) + v
        assert lhs == {k: v for k, v in rhs.items() if v}


class TestNBracket:
    def test_sv_triple(self, sv2):
        out = sv2.n_bracket(
            [sv_el(sv2, {"L_1": 1}), sv_el(sv2, {"L_-1": 1}), sv_el(sv2, {"L_1": 1})]
        )
        assert out == sv_el(sv2, {"L_1": -2})

    def test_repeated_argument_vanishes(self, sv2):
        x = sv_el(sv2, {"L_2": 1, "M_1": 3})
        y = sv_el(sv2, {"Y_-1/2": 1, "L_-1": 2})
        assert sv2.n_bracket([x, y, y]) == {}

    def test_sl2_h_h_e(self, sl2):
        # oracle: direct 2x2 matrix commutators
        def comm(a, b):
            n = 2
            return [
                [
                    sum(a[i][k] * b[k][j] - b[i][k] * a[k][j] for k in range(n))
                    for j in range(n)
                ]
                for i in range(n)
            ]

        e = [[0, 1], [0, 0]]
        h = [[1, 0], [0, -1]]
        expected = comm(h, comm(h, e))
        assert expected == [[0, 4], [0, 0]]  # 4·e
        out = sl2.n_bracket([unit(sl2.index_of("H_1"))] * 2 + [unit(sl2.index_of("E(1,2)"))])
        assert out == {sl2.index_of("E(1,2)"): Fraction(4)}

    def test_length_contract(self, sl2):
        with pytest.raises(ValueError):
            sl2.n_bracket([unit(0)])

    def test_n2_matches_bracket(self, sv2):
        x = sv_el(sv2, {"L_1": 1, "Y_1/2": 2})
        y = sv_el(sv2, {"L_-1": 3})
        assert sv2.n_bracket([x, y]) == sv2.bracket(x, y)


class TestRootFunctional:
    def test_sv_l0_l3(self, sv4):
        out = sv4.root_functional(sv4.index_of("L_0"), sv4.index_of("L_3"))
        assert out == 3

    def test_sv_m0_l3(self, sv4):
        out = sv4.root_functional(sv4.index_of("M_0"), sv4.index_of("L_3"))
        assert out == 0

    def test_sv_half_integer_eigenvalue(self, sv4):
        out = sv4.root_functional(sv4.index_of("L_0"), sv4.index_of("Y_1/2"))
        assert out == Fraction(1, 2)

    def test_sl2_h_e(self, sl2):
        assert sl2.root_functional(sl2.index_of("H_1"), sl2.index_of("E(1,2)")) == 2

    def test_non_cartan_index_rejected(self, sl2):
        with pytest.raises(ValueError):
            sl2.root_functional(sl2.index_of("E(1,2)"), 0)

    def test_non_eigenvector_reported(self):
        basis = [
            BasisElement(0, "h", (0,)),
            BasisElement(1, "a", (0,)),
            BasisElement(2, "b", (0,)),
        ]
        alg = GradedAlgebra(
            "twist", 1, basis, {(0, 1): ((2, Fraction(1)),)}, [0]
        )
        with pytest.raises(InvalidAlgebraError):
            alg.root_functional(0, 1)


class TestRootsPresent:
    def test_sv_window_one(self, sv1):
        spaces = {r.degree: r for r in sv1.roots_present()}
        assert set(spaces) == {(-2,), (-1,), (0,), (1,), (2,)}
        assert {sv1.label(i) for i in spaces[(2,)].members} == {"L_1", "M_1"}
        assert {sv1.label(i) for i in spaces[(1,)].members} == {"Y_1/2"}
        assert all(r.paired for r in spaces.values())
        assert spaces[(0,)].members == ()  # degree zero is all cartan here

    def test_counterexample(self, k_alg):
        spaces = {r.degree: r for r in k_alg.roots_present()}
        nonzero = {d: r for d, r in spaces.items() if d != (0,)}
        assert set(nonzero) == {(1,), (-1,)}
        assert all(r.paired for r in nonzero.values())

    def test_sl2(self, sl2):
        spaces = {r.degree: r for r in sl2.roots_present()}
        assert {sl2.label(i) for i in spaces[(1,)].members} == {"E(1,2)"}
        assert {sl2.label(i) for i in spaces[(-1,)].members} == {"E(2,1)"}
        assert spaces[(1,)].paired and spaces[(-1,)].paired


class TestSafeTuples:
    def test_inside_window(self, sv4):
        assert sv4.is_safe_tuple([(2,), (2,), (2,)], (0,))

    def test_boundary_partial_sums(self, sv4):
        assert sv4.is_safe_tuple([(8,), (8,), (-8,)], (0,))

    def test_escaping_partial_sum(self, sv4):
        assert not sv4.is_safe_tuple([(8,), (8,), (8,)], (0,))

    def test_gamma_shift_escapes(self, sv4):
        # plain sums stay inside, but the shifted total 8 + 1 does not
        assert not sv4.is_safe_tuple([(8,), (0,)], (1,))

    def test_complete_algebra_always_safe(self, sl2):
        assert sl2.is_safe_tuple([(1,), (1,), (-1,)], (-2,))

    def test_length_contract(self, sv4):
        with pytest.raises(ValueError):
            sv4.is_safe_tuple([(0,)], (0,))


class TestAdMatrix:
    def test_sl2_h_diagonal(self, sl2):
        m = sl2.ad_matrix(unit(sl2.index_of("H_1")))
        rows = [r.to_dict() for r in m.rows]
        assert rows == [{0: 2}, {1: -2}, {}]

    def test_k_m1(self, k_alg):
        m = k_alg.ad_matrix(unit(k_alg.index_of("M_1")))
        rows = [r.to_dict() for r in m.rows]
        # maps L_0 (index 0) to -M_1 (index 1), everything else to zero
        assert rows == [{}, {0: -1}, {}]

    def test_zero_element(self, sv2):
        m = sv2.ad_matrix({})
        assert all(r.is_zero() for r in m.rows)
        assert m.num_rows == sv2.dim


class TestValidate:
    def test_builders_are_valid(self, sv1, sv2, sv4, k_alg, sl2, sl3, witt1):
        for alg in (sv1, sv2, sv4, k_alg, sl2, sl3, witt1):
            report = alg.validate()
            assert report.empty, (alg.name, report.violations[:3])

    def test_tampered_sv_fails_jacobi(self, sv2):
        tampered = dict(sv2.brackets)
        i, j = sv2.index_of("L_-1"), sv2.index_of("L_1")
        key = (min(i, j), max(i, j))
        assert key in tampered
        tampered[key] = ((sv2.index_of("L_0"), Fraction(-3)),)
        alg = GradedAlgebra(
            "sv-tampered", 1, sv2.basis, tampered, sv2.cartan, truncated=True
        )
        report = alg.validate()
        assert any(v.kind == "jacobi" for v in report.violations)

    def test_cartan_nonzero_degree(self):
        basis = [BasisElement(0, "x", (1,)), BasisElement(1, "y", (-1,))]
        alg = GradedAlgebra("bad-cartan", 1, basis, {}, [0])
        report = alg.validate()
        assert any(v.kind == "cartan-degree" for v in report.violations)

    def test_grading_violation(self):
        basis = [
            BasisElement(0, "h", (0,)),
            BasisElement(1, "x", (1,)),
            BasisElement(2, "y", (-1,)),
        ]
        alg = GradedAlgebra(
            "bad-grading", 1, basis, {(1, 2): ((1, Fraction(1)),)}, [0]
        )
        report = alg.validate()
        assert any(v.kind == "grading" for v in report.violations)

    def test_degree_zero_non_cartan_warns(self):
        basis = [BasisElement(0, "h", (0,)), BasisElement(1, "z", (0,))]
        alg = GradedAlgebra("warned", 1, basis, {}, [0])
        report = alg.validate()
        assert report.valid
        assert any(v.kind == "degree-zero" for v in report.warnings)


class TestStructuralInvariants:
    @settings(max_examples=80, deadline=None)
    @given(st.data())
    def test_antisymmetry(self, sv2, data):
        i = data.draw(st.integers(0, sv2.dim - 1))
        j = data.draw(st.integers(0, sv2.dim - 1))
        xy = sv2.bracket(unit(i), unit(j))
        yx = sv2.bracket(unit(j), unit(i))
        assert xy == {k: -v for k, v in yx.items()}
        assert sv2.bracket(unit(i), unit(i)) == {}

    @settings(max_examples=80, deadline=None)
    @given(st.data())
    def test_grading_of_products(self, sv2, data):
        i = data.draw(st.integers(0, sv2.dim - 1))
        j = data.draw(st.integers(0, sv2.dim - 1))
        out = sv2.bracket(unit(i), unit(j))
        want = tuple(
            a + b for a, b in zip(sv2.degree_of(i), sv2.degree_of(j))
        )
        assert all(sv2.degree_of(k) == want for k in out)

    def test_cartan_power_identity(self, sv2, sl3):
        # iterating a Cartan element N-1 times scales by the root power
        for alg, h_lbl, x_lbl in [
            (sv2, "L_0", "Y_3/2"),
            (sv2, "L_0", "M_-2"),
            (sl3, "H_1", "E(1,3)"),
        ]:
            h = alg.index_of(h_lbl)
            x = alg.index_of(x_lbl)
            a = alg.root_functional(h, x)
            for n in (3, 4, 5):
                out = alg.n_bracket([unit(h)] * (n - 1) + [unit(x)])
                assert out == ({x: a ** (n - 1)} if a else {})

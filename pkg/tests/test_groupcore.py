from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from geomcrystal import groupcore as gc
from geomcrystal.errors import NotInBigCell, NotTotallyPositive
from geomcrystal.rootsys import WeylElt, build_type_a, reduced_words

F = Fraction
positive = st.fractions(min_value=F(1, 10), max_value=10, max_denominator=12)


def as_list(g):
    return [[F(v) for v in row] for row in np.asarray(g)]


@st.composite
def generator_product(draw, n=None, length=6):
    """Exact product of random x_i, y_i and torus factors (lands in the big cell)."""
    n = draw(st.sampled_from([2, 3, 4])) if n is None else n
    g = gc.identity(n, exact=True)
    for _ in range(length):
        kind = draw(st.sampled_from("xyh"))
        i = draw(st.integers(1, n - 1))
        c = draw(positive)
        factor = {"x": gc.chevalley_x, "y": gc.chevalley_y, "h": gc.coroot_power}[kind](n, i, c)
        g = g @ factor
    return g


def test_chevalley_examples():
    assert as_list(gc.chevalley_x(2, 1, F(3))) == [[1, 3], [0, 1]]
    assert as_list(gc.chevalley_y(3, 2, F(5))) == [[1, 0, 0], [0, 1, 0], [0, 5, 1]]
    c = F(2, 3)
    assert as_list(gc.x_minus(2, 1, c)) == [[1 / c, 0], [1, c]]
    assert np.array_equal(gc.exp_cartan(np.zeros(3)), np.eye(3))


def test_weyl_representatives():
    assert as_list(gc.weyl_rep(WeylElt.simple(2, 1), exact=True)) == [[0, -1], [1, 0]]
    for n in (3, 4):
        for i in range(1, n):
            s = WeylElt.simple(n, i)
            assert as_list(gc.weyl_rep_bb(s, True) @ gc.weyl_rep(s, True)) == as_list(gc.identity(n, True))
    s1, s2 = (gc.weyl_rep(WeylElt.simple(3, i), True) for i in (1, 2))
    assert as_list(s1 @ s2 @ s1) == as_list(s2 @ s1 @ s2)


@pytest.mark.parametrize("n", [3, 4])
def test_weyl_rep_is_word_independent(n):
    rs = build_type_a(n)
    for w in rs.elements():
        products = set()
        for word in reduced_words(w):
            g = gc.identity(n, True)
            for i in word:
                g = g @ gc.weyl_rep(WeylElt.simple(n, i), True)
            products.add(tuple(map(tuple, as_list(g))))
        assert products == {tuple(map(tuple, as_list(gc.weyl_rep(w, True))))}


def test_gauss_examples():
    g = gc.to_exact(np.array([[1, 2], [3, 7]]))
    tri = gc.gauss_decompose(g)
    assert as_list(tri.n_part) == [[1, 0], [3, 1]]
    assert as_list(tri.a_part) == [[1, 0], [0, 1]]
    assert as_list(tri.u_part) == [[1, 2], [0, 1]]
    d = gc.torus([F(2), F(1, 2)])
    tri = gc.gauss_decompose(d)
    assert as_list(tri.a_part) == as_list(d)
    with pytest.raises(NotInBigCell) as err:
        gc.gauss_decompose(gc.to_exact(np.array([[0, -1], [1, 0]])))
    assert err.value.index == 1


@given(generator_product())
def test_gauss_round_trip_exact(g):
    tri = gc.gauss_decompose(g)
    assert as_list(tri.n_part @ tri.a_part @ tri.u_part) == as_list(g)
    n = g.shape[0]
    for r in range(n):
        assert tri.n_part[r, r] == 1 and tri.u_part[r, r] == 1
        for c in range(r + 1, n):
            assert tri.n_part[r, c] == 0 and tri.u_part[c, r] == 0


@given(st.integers(0, 2**31))
def test_gauss_round_trip_float(seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(4, 4)) + 4 * np.eye(4)
    tri = gc.gauss_decompose(g)
    assert np.max(np.abs(tri.n_part @ tri.a_part @ tri.u_part - g)) <= 1e-10 * np.max(np.abs(g))


@given(st.data())
def test_gauss_identities(data):
    n = data.draw(st.sampled_from([2, 3, 4]))
    g1 = data.draw(generator_product(n))
    g2 = data.draw(generator_product(n))
    lhs = gc.part_zero_plus(g1 @ g2)
    rhs = gc.part_zero_plus(gc.part_zero_plus(g1) @ g2)
    assert as_list(lhs) == as_list(rhs)
    a = gc.torus(data.draw(st.lists(positive, min_size=n, max_size=n)))
    assert as_list(gc.part_plus(g1 @ a)) == as_list(gc.inverse(a) @ gc.part_plus(g1) @ a)


def test_minor_examples():
    assert gc.minor_principal(gc.identity(3, True), 2) == 1
    s, xi = F(3, 7), F(5, 2)
    N = gc.chevalley_y(2, 1, s)
    assert gc.minor_principal(gc.chevalley_x(2, 1, xi) @ N, 1) == 1 + xi * s
    w0 = WeylElt.longest(2)
    assert gc.minor_generalized(N, w0, WeylElt.identity(2), 1) == s


def test_total_positivity_examples():
    assert not gc.is_totally_positive_N(gc.identity(3, True))
    assert gc.is_totally_positive_N(gc.chevalley_y(2, 1, F(1, 3)))
    b, d, e = F(1), F(3), F(2)
    x = gc.to_exact(np.array([[1, 0, 0], [1, 1, 0], [3, 2, 1]]))
    assert b * e - d <= 0
    assert not gc.is_totally_positive_N(x)


@given(st.lists(positive, min_size=3, max_size=3))
def test_positive_y_products_are_totally_positive(c):
    x = gc.chevalley_y(3, 1, c[0]) @ gc.chevalley_y(3, 2, c[1]) @ gc.chevalley_y(3, 1, c[2])
    assert gc.is_totally_positive_N(x)


def test_involution_examples():
    a, b, c = F(2), F(3), F(5)
    d = (1 + b * c) / a
    g = gc.to_exact(np.array([[a, b], [c, d]]))
    assert as_list(gc.involution_iota(g)) == [[d, b], [c, a]]
    for n in (2, 3, 4):
        w0 = gc.weyl_rep(WeylElt.longest(n), True)
        assert as_list(gc.involution_schutz(w0)) == as_list(w0)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_iota_on_generators(n):
    t = F(7, 3)
    for i in range(1, n):
        for gen in (gc.chevalley_x, gc.chevalley_y):
            assert as_list(gc.involution_iota(gen(n, i, t))) == as_list(gen(n, i, t))
    v = np.arange(n, dtype=float) - (n - 1) / 2
    assert np.allclose(gc.involution_iota(gc.exp_cartan(v)), gc.exp_cartan(-v))


@given(st.data())
def test_schutz_reverses_words_with_star(data):
    n = data.draw(st.sampled_from([2, 3, 4]))
    word = data.draw(st.lists(st.integers(1, n - 1), min_size=1, max_size=6))
    params = data.draw(st.lists(positive, min_size=len(word), max_size=len(word)))
    lhs = gc.involution_schutz(gc.x_word(n, word, params))
    rhs = gc.x_word(n, [n - i for i in reversed(word)], list(reversed(params)))
    assert as_list(lhs) == as_list(rhs)


@given(generator_product(), generator_product())
def test_involutions_are_involutive_antiautomorphisms(g, h):
    if g.shape != h.shape:
        return
    for inv in (gc.involution_iota, gc.involution_schutz, gc.involution_transpose):
        assert as_list(inv(inv(g))) == as_list(g)
    for inv in (gc.involution_iota, gc.involution_schutz, gc.involution_transpose):
        assert as_list(inv(g @ h)) == as_list(inv(h) @ inv(g))
    iota = gc.involution_iota
    assert as_list(gc.involution_schutz(g)) == as_list(iota(gc.involution_schutz(iota(g))))


def test_t_of_w_examples():
    assert as_list(gc.t_of_w(WeylElt.longest(2), True)) == [[-1, 0], [0, -1]]
    assert as_list(gc.t_of_w(WeylElt.identity(3), True)) == as_list(gc.identity(3, True))
    assert as_list(gc.t_of_w(WeylElt.longest(3), True)) == as_list(gc.identity(3, True))


@pytest.mark.parametrize("n", [3, 4])
def test_t_of_w_is_a_sign_diagonal(n):
    rs = build_type_a(n)
    rho = np.array(rs.rho_check_exact, dtype=object)
    for w in rs.elements():
        t = gc.t_of_w(w, True)
        diag = [t[k, k] for k in range(n)]
        assert set(diag) <= {1, -1}
        assert as_list(t - np.diag(diag)) == [[0] * n] * n
        expected = [(-1) ** int(v) for v in rho - w.act(rho)]
        assert diag == expected


@given(st.data())
def test_factor_upper_recovers_parameters(data):
    n = data.draw(st.sampled_from([3, 4]))
    rs = build_type_a(n)
    word = data.draw(st.sampled_from(sorted(reduced_words(rs.w0()))))
    params = data.draw(st.lists(positive, min_size=len(word), max_size=len(word)))
    assert gc.factor_upper(gc.x_word(n, word, params), word) == params


def test_factor_upper_rejects_non_positive():
    with pytest.raises(NotTotallyPositive):
        gc.factor_upper(gc.x_word(3, (1, 2, 1), [F(1), F(-1), F(1)]), (1, 2, 1))


def test_det_is_one_on_generators():
    g = gc.x_minus_word(4, (1, 2, 3, 1), [F(2), F(3), F(1, 2), F(5)])
    assert gc.det(g) == 1

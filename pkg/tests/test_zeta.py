import os
from math import isqrt

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from cilab import zeta
from cilab.counter import count_many
from cilab.errors import ReconstructionError
from cilab.poly import random_ci, spec_from_strings
from cilab.zeta import (MiddlePolynomial, apply_functional_equation, betti_numbers,
                        euler_characteristic_ci, middle_betti, middle_power_sums,
                        newton_reconstruct, predict_count, verify_rh)

h, T = sympy.symbols("h T")


def chi_oracle(N, degrees):
    """Chern-class formula evaluated with sympy's rational series expansion."""
    n = N - len(degrees)
    expr = (1 + h) ** (N + 1)
    for d in degrees:
        expr = expr / (1 + d * h)
    coeff = sympy.series(expr, h, 0, n + 1).removeO().coeff(h, n)
    return int(sympy.prod(degrees) * coeff)


def poly_from_eigenvalues(alphas):
    P = sympy.Poly(sympy.expand(sympy.prod([1 - a * T for a in alphas])), T)
    coeffs = [int(c) for c in reversed(P.all_coeffs())]
    return tuple(coeffs + [0] * (len(alphas) + 1 - len(coeffs)))


@pytest.mark.parametrize("N,degrees,chi", [
    (2, (2,), 2), (2, (3,), 0), (3, (2,), 4), (2, (4,), -4),
])
def test_euler_characteristic_examples(N, degrees, chi):
    assert chi_oracle(N, degrees) == chi
    assert euler_characteristic_ci(N, degrees) == chi


@pytest.mark.parametrize("N,degrees", [
    (2, (5,)), (3, (3,)), (3, (4,)), (3, (2, 2)), (4, (2, 3)), (4, (3,)), (5, (2, 2, 2)),
    (5, (3, 3)), (6, (2,)), (4, (2, 2)),
])
def test_euler_characteristic_vs_oracle(N, degrees):
    assert euler_characteristic_ci(N, degrees) == chi_oracle(N, degrees)


def test_curve_euler_characteristic_matches_genus_formula():
    from cilab.theorems import genus_formula
    for degrees in [(2,), (3,), (4,), (5,), (2, 2), (2, 3), (2, 2, 2), (3, 3)]:
        N = len(degrees) + 1
        assert euler_characteristic_ci(N, degrees) == 2 - 2 * genus_formula(degrees)


def test_middle_betti():
    assert middle_betti(2, (3,)) == 2
    assert middle_betti(3, (2,)) == 2
    assert middle_betti(2, (4,)) == 6
    assert middle_betti(3, (3,)) == 7   # cubic surface
    assert middle_betti(3, (4,)) == 22  # K3
    assert betti_numbers(3, (2,)) == [1, 0, 2, 0, 1]
    assert middle_betti(2, (2,)) == 0


def test_power_sums_examples():
    assert middle_power_sums([6], 1, 5).S == (0,)
    assert middle_power_sums([5 + 1 - 3], 1, 5).S == (3,)
    assert middle_power_sums([16], 2, 3).S == (6,)


def test_newton_examples():
    assert newton_reconstruct([], 0).coeffs == (1,)
    for a in range(-4, 5):
        assert newton_reconstruct([a, a * a - 10], 2).coeffs == (1, -a, 5)
    assert newton_reconstruct([6, 18], 2).coeffs == (1, -6, 9) == poly_from_eigenvalues([3, 3])


def test_newton_non_integral():
    with pytest.raises(ReconstructionError, match="c_2"):
        newton_reconstruct([1, 2], 2)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=6))
def test_newton_vs_sympy_expansion(alphas):
    S = [sum(a**d for a in alphas) for d in range(1, len(alphas) + 1)]
    assert newton_reconstruct(S, len(alphas)).coeffs == poly_from_eigenvalues(alphas)


def test_functional_equation_split_quadric():
    P = apply_functional_equation([6], 2, 3, 2)
    assert P.coeffs == (1, -6, 9) and P.sign == 1


def test_functional_equation_nonsplit_quadric_needs_check():
    # eigenvalues {2, -2} on a quadric surface over F_2: P = 1 - 4T^2, sign -1
    with pytest.raises(ReconstructionError, match="both signs"):
        apply_functional_equation([0], 2, 2, 2)
    # N_2 = (1 + 2^4) + (2^2 + (-2)^2) = 25
    P = apply_functional_equation([0], 2, 2, 2, check=(2, 25))
    assert P.coeffs == (1, 0, -4) and P.sign == -1


def test_functional_equation_degenerate_b1():
    P = apply_functional_equation([3], 1, 3, 2)
    assert P.coeffs == (1, -3) and P.sign == -1
    with pytest.raises(ReconstructionError):
        apply_functional_equation([2], 1, 3, 2)


def _quartic_counts(p, seed, upto):
    spec = random_ci(2, (4,), p, seed=seed, probe_depth=upto)
    return spec, count_many(spec, upto)


@pytest.mark.parametrize("p,seed", [(2, 1), (3, 1), (3, 2)])
def test_functional_equation_matches_full_newton(p, seed):
    spec, counts = _quartic_counts(p, seed, 6)
    S = middle_power_sums(counts, 1, p).S
    full = newton_reconstruct(S, 6, p, 1)
    half = apply_functional_equation(S[:3], 6, p, 1, check=(4, counts[3]))
    assert full.coeffs == half.coeffs


def test_shallow_probe_singular_quartic_is_refused():
    # smooth over F_2, F_4, F_8 but with 4 singular points over F_16
    spec = random_ci(2, (4,), 2, seed=1, probe_depth=3)
    counts = count_many(spec, 7)
    from cilab.counter import count_projective
    assert count_projective(spec, 4, smooth=True).anomalies
    S = middle_power_sums(counts, 1, 2).S
    with pytest.raises(ReconstructionError):
        apply_functional_equation(S[:3], 6, 2, 1, check=(4, counts[3]))
    P = newton_reconstruct(S, 6, 2, 1)
    assert not verify_rh(P, 2, 1).passed
    assert predict_count(P, 1, 2, 7) != counts[6]


@pytest.mark.skipif(not os.environ.get("CILAB_SLOW"), reason="set CILAB_SLOW=1 (~2 min count)")
def test_functional_equation_quartic_f5_full():
    spec, counts = _quartic_counts(5, 1, 6)
    S = middle_power_sums(counts, 1, 5).S
    assert newton_reconstruct(S, 6, 5, 1).coeffs == \
        apply_functional_equation(S[:3], 6, 5, 1, check=(4, counts[3])).coeffs


def test_verify_rh_examples():
    q = 5
    for a in range(-(isqrt(4 * q)), isqrt(4 * q) + 1):
        assert verify_rh(MiddlePolynomial((1, -a, q), q, 1), q, 1).passed
    nodal = verify_rh(MiddlePolynomial((1, -(q + 1), q), q, 1), q, 1)
    assert not nodal.passed and not nodal.moduli_ok
    split = verify_rh(MiddlePolynomial((1, -6, 9), 3, 2), 3, 2)
    assert split.passed and split.sign == 1
    assert verify_rh(MiddlePolynomial((1,), 5, 1), 5, 1).passed


def test_verify_rh_k3_scale_precision():
    # b = 22 with a high-multiplicity eigenvalue: (1 - 2T)^{22} for q = 2, n = 2
    coeffs = poly_from_eigenvalues([2] * 12 + [-2] * 10)
    rep = verify_rh(MiddlePolynomial(coeffs, 2, 2), 2, 2)
    assert rep.symmetric and rep.moduli_ok and rep.coeff_bound_ok


def test_predict_count_examples():
    one = MiddlePolynomial((1,), 5, 1)
    assert [predict_count(one, 1, 5, d) for d in (1, 2, 3)] == [6, 26, 126]
    spec = spec_from_strings(5, 2, ["x*y - z^2"])
    assert count_many(spec, 3) == [6, 26, 126]
    a, q = 2, 5
    ell = MiddlePolynomial((1, -a, q), q, 1)
    assert predict_count(ell, 1, q, 2) == q * q + 1 - (a * a - 2 * q)
    assert predict_count(MiddlePolynomial((1, -6, 9), 3, 2), 2, 3, 2) == 100


weil_factor = st.integers(2, 7).flatmap(
    lambda q: st.tuples(st.just(q), st.lists(st.integers(-isqrt(4 * q), isqrt(4 * q)),
                                              min_size=0, max_size=4)))


@settings(max_examples=80, deadline=None)
@given(weil_factor)
def test_roundtrip_counts_and_power_sums(data):
    q, traces = data
    P = sympy.Integer(1)
    for a in traces:
        P *= 1 - a * T + q * T**2
    coeffs = tuple(int(c) for c in reversed(sympy.Poly(sympy.expand(P), T).all_coeffs()))
    mp = MiddlePolynomial(coeffs, q, 1)
    counts = [predict_count(mp, 1, q, d) for d in range(1, len(coeffs) + 2)]
    S = middle_power_sums(counts, 1, q).S
    assert list(S) == zeta.power_sums_from_poly(coeffs, len(counts))
    b = len(coeffs) - 1
    assert newton_reconstruct(S, b).coeffs == coeffs
    assert zeta.symmetry_sign(coeffs, q, 1) == 1


def test_reconstruct_from_counts_and_betti_inference():
    spec = spec_from_strings(3, 3, ["x*y - z*w"])
    counts = count_many(spec, 3)
    assert counts == [16, 100, 784]
    P = zeta.reconstruct(counts, 3, (2,), 3)
    assert P.coeffs == (1, -6, 9)
    assert zeta.infer_betti_from_counts(counts, 2, 3) == 2 == middle_betti(3, (2,))

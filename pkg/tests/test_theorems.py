from decimal import Decimal
from fractions import Fraction

import pytest

from cilab import theorems
from cilab.errors import SectionError
from cilab.counter import count_many, count_projective
from cilab.poly import random_ci, spec_from_strings
from cilab.theorems import (VerificationReport, check_fermat_family, check_genus_vs_zeta,
                            check_katz_betti_bounds, check_theorem_a, check_theorem_b,
                            empirical_constant, genus_formula, genus_two_absent)

from conftest import brute_force_count


def test_theorem_a_cubic_f5():
    spec = spec_from_strings(5, 2, ["y^2*z - x^3 - z^3"])
    assert brute_force_count(spec, 1) == 6
    rep = check_theorem_a(spec, [6])
    assert rep.passed and rep.squared
    assert (rep.lhs, rep.rhs) == (0, 5 * 5 * 5)  # 0 <= (2+1+2) sqrt 5, squared
    assert rep.inputs["constant"] == 5


def test_theorem_a_fermat_q2(fermat_cubic2):
    rep = check_theorem_a(fermat_cubic2, count_projective(fermat_cubic2, 2).count, m=2)
    assert rep.inputs["deviation"] == 4 and rep.inputs["constant"] == 5
    assert (rep.lhs, rep.rhs) == (16, 100) and rep.passed  # 4 <= 10


def test_theorem_a_split_quadric(split_quadric3):
    rep = check_theorem_a(split_quadric3, [16])
    assert not rep.squared
    assert rep.inputs["lower_betti_sum"] == 3  # b_2 + b_0
    assert (rep.lhs, rep.rhs) == (3, 18) and rep.passed


def test_theorem_a_missing_counts(conic5):
    with pytest.raises(ValueError):
        check_theorem_a(conic5, [], m=1)


def test_theorem_b_conic(conic5):
    rep = check_theorem_b(conic5, 2)
    assert rep.inputs["affine_count"] == 4
    assert rep.inputs["constant"] == 2 + 2 + 2
    assert (rep.lhs, rep.rhs) == (1, 36 * 5) and rep.passed


def test_theorem_b_fermat(fermat_cubic2):
    rep = check_theorem_b(fermat_cubic2, 2, m=2)
    assert rep.inputs["affine_count"] == 6
    assert rep.inputs["betti_sum_D"] == 3
    assert rep.passed and rep.lhs == 4  # |6 - 4|^2


def test_theorem_b_vacuous_and_missing_d(conic5):
    rep = check_theorem_b(conic5, 2, counts={"total": 6, "section": 2}, d_param=1)
    assert any("vacuous" in note for note in rep.notes) and rep.passed
    with pytest.raises(SectionError):
        check_theorem_b(conic5, 2, counts={"total": 6, "section": 2})
    nodal = spec_from_strings(5, 2, ["y^2*z - x^3 - x^2*z"])
    with pytest.raises(SectionError):
        check_theorem_b(nodal, 0)


def test_katz_examples():
    small, large = theorems.katz_bounds(2, 1, 3)
    assert small == 3888
    reps = check_katz_betti_bounds(2, 1, 3, 4)
    assert all(r.passed for r in reps)
    assert check_katz_betti_bounds(2, 1, 4, 8)[0].rhs == 6174
    quad = check_katz_betti_bounds(3, 1, 2, 4)
    assert quad[1].rhs == Fraction(65, 48) * 2 * 21**5 and quad[1].passed


def test_genus_formula():
    assert genus_formula((3,)) == 1
    assert genus_formula((2,)) == 0
    assert genus_formula((2, 2)) == 1
    assert genus_formula((4,)) == 3
    assert genus_formula((5,)) == 6
    with pytest.raises(ValueError):
        genus_formula(())


def test_genus_formula_nonnegative_integer_on_all_tuples():
    import itertools
    for n in range(1, 5):
        for degs in itertools.product(range(2, 6), repeat=n):
            assert genus_formula(degs) >= 0


def test_genus_two_absent():
    rep = genus_two_absent(6, 6)
    assert rep.passed and rep.inputs["genus_two_tuples"] == []
    assert rep.inputs["tuples"] == sum(5**n for n in range(1, 6))


@pytest.mark.parametrize("N,degrees,p,expected", [
    (2, (3,), 5, 2), (2, (4,), 5, 6), (3, (2, 2), 3, 2),
])
def test_genus_vs_zeta(N, degrees, p, expected):
    spec = random_ci(N, degrees, p, seed=3, probe_depth=3)
    upto = 4 if degrees == (4,) else 3
    rep = check_genus_vs_zeta(spec, count_many(spec, upto))
    assert rep.lhs == expected and rep.passed


@pytest.mark.parametrize("q,count,g", [(2, 9, 1), (3, 28, 3), (4, 65, 6)])
def test_fermat_family(q, count, g):
    reps = check_fermat_family(q)
    assert all(r.passed for r in reps)
    assert reps[0].lhs == count and reps[1].lhs == g and reps[2].lhs == 2 * g


def test_empirical_constant():
    conics = [check_theorem_a(random_ci(2, (2,), 5, seed=s, probe_depth=1),
                              count_many(random_ci(2, (2,), 5, seed=s, probe_depth=1), 1))
              for s in range(3)]
    assert empirical_constant(conics) == {1: Decimal(0)}
    curves = []
    traces = []
    for s in range(6):
        spec = random_ci(2, (3,), 5, seed=s, probe_depth=2)
        N1 = count_projective(spec, 1).count
        traces.append(abs(6 - N1))
        curves.append(check_theorem_a(spec, N1))
    emp = empirical_constant(curves)[1]
    assert abs(emp - Decimal(max(traces)) / Decimal(5).sqrt()) < Decimal("1e-25")
    assert emp <= 2
    fermat = spec_from_strings(2, 2, ["x^3 + y^3 - z^3"])
    assert empirical_constant([check_theorem_a(fermat, 9, m=2)]) == {1: Decimal(2)}
    with pytest.raises(ValueError):
        empirical_constant([])


def test_report_self_audit():
    rep = check_theorem_a(spec_from_strings(5, 2, ["y^2*z - x^3 - z^3"]), 6)
    d = rep.to_dict()
    assert VerificationReport.recheck(d) == d["pass"]
    d["lhs"] = "1000"
    assert VerificationReport.recheck(d) is False


def test_positivity_threshold():
    # 1 + q > 5 sqrt(q)  <=>  q >= 23
    assert theorems.positivity_threshold(1, 5, range(2, 40)) == 23
    assert theorems.positivity_threshold(1, 5, [2, 3]) is None

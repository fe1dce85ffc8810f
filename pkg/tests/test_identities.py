import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import oracle_terms
from horadam3 import (IndexOutOfRangeError, NonPositiveDiscriminantError, RootOfNuError, SigmaNearZeroError,
                      ZeroXError, make_spec, mH_closed, mh_closed, power_sum)
from horadam3.binet import TOL_IMAG, cubic_roots
from horadam3.identities import (SUITE, IdentityId, Mode, SpecContext, Status, SuitePlan,
                                 check_convolution, check_decomposition, check_H_square, check_h_square,
                                 check_initial_matrix, check_power_laws, check_products,
                                 check_square_scalar, check_sum_geometric, check_sum_subsequence,
                                 geometric_sum_closed, nu, run_suite, subseq_factors,
                                 sweep_sum_geometric, sweep_sum_subsequence)
from horadam3.presets import default_grid
from horadam3.sequence import TermTable

TRIB = make_spec(1, 1, 1, 0, 1, 1)
SPEC_112 = make_spec(1, 1, 1, 1, 1, 2)

coeff = st.integers(-4, 4)
nonzero = coeff.filter(lambda v: v != 0)
small_rat = st.fractions(min_value=-5, max_value=5, max_denominator=3)


@st.composite
def specs(draw):
    return make_spec(draw(coeff), draw(coeff), draw(nonzero), draw(small_rat), draw(small_rat), draw(small_rat))


def assert_pass(verdicts):
    if not isinstance(verdicts, list):
        verdicts = [verdicts]
    for v in verdicts:
        assert v.status is Status.PASS, v
        assert v.residual == 0


# -- scalar identities --------------------------------------------------------------------------

@pytest.mark.parametrize("spec, n, m", [(TRIB, 2, 1), (TRIB, 3, 2), (make_spec(2, 1, 3, 1, 2, 5), 4, 3)])
def test_convolution_examples(spec, n, m):
    assert_pass(check_convolution(spec, n, m))


def test_convolution_example_values():
    H = oracle_terms(1, 1, 1, (0, 1, 1), -3, 10)
    assert H[5] == 7 == H[3] * H[3] + (H[2] + H[1]) * H[2] + H[2] * H[1]


@settings(max_examples=50, deadline=None)
@given(specs(), st.integers(2, 25), st.integers(1, 25))
def test_convolution_property(spec, n, m):
    assert_pass(check_convolution(spec, n, m))


@pytest.mark.parametrize("n, m", [(1, 1), (2, 0), (-1, 5)])
def test_convolution_range_guard(n, m):
    with pytest.raises(IndexOutOfRangeError):
        check_convolution(TRIB, n, m)
    v = check_convolution(TRIB, n, m, exploratory=True)
    assert v.exploratory


@pytest.mark.parametrize("spec, n", [(TRIB, 3), (TRIB, 2), (make_spec(1, 2, 3, 0, 1, 1), 6),
                                     (make_spec(-3, 2, 1, 5, 5, 5), 2)])
def test_h_square_examples(spec, n):
    assert_pass(check_h_square(spec, n))


def test_h_square_hand_value():
    h = oracle_terms(1, 1, 1, (0, 1, 1), 0, 6)
    assert h[3] ** 2 + h[2] ** 2 + 2 * h[2] * h[1] == 7 == h[5]


@pytest.mark.parametrize("spec, n", [(TRIB, 5), (TRIB, 9), (SPEC_112, 4), (SPEC_112, 2)])
def test_H_square_examples(spec, n):
    assert_pass(check_H_square(spec, n))


@settings(max_examples=50, deadline=None)
@given(specs(), st.integers(2, 25))
def test_square_identities_property(spec, n):
    assert_pass([check_h_square(spec, n), check_H_square(spec, n), check_square_scalar(spec, n)])


def test_square_ranges():
    for check in (check_h_square, check_H_square):
        with pytest.raises(IndexOutOfRangeError):
            check(TRIB, 1)
    with pytest.raises(IndexOutOfRangeError):
        check_square_scalar(TRIB, -1)


@pytest.mark.parametrize("n", [0, 1, 7])
def test_square_scalar_examples(n):
    assert_pass(check_square_scalar(TRIB, n))
    assert_pass(check_square_scalar(SPEC_112, n))


def test_square_scalar_hand_value():
    H = oracle_terms(1, 1, 1, (0, 1, 1), 0, 6)
    assert H[3] ** 2 + H[2] ** 2 + 2 * H[1] * H[2] == 7 == 1 * H[4] + 1 * H[3] + 1 * H[2]


# -- geometric sums -------------------------------------------------------------------------------

def test_geometric_single_term():
    v = check_sum_geometric(TRIB, 2, 0, "h")
    assert_pass(v)
    assert geometric_sum_closed(lambda k: mh_closed(TRIB, k), TRIB, Fraction(2), 0) == mh_closed(TRIB, 0)


def test_geometric_examples():
    assert_pass(check_sum_geometric(TRIB, 2, 6, "h"))
    assert nu(TRIB, 1) == -2
    assert_pass(check_sum_geometric(TRIB, 1, 6, "H"))


@pytest.mark.parametrize("x", [2, -1, Fraction(1, 2), 3, Fraction(-7, 3)])
def test_geometric_against_direct_sum(x):
    spec = make_spec(2, -1, 3, 2, -1, 3)
    x = Fraction(x)
    direct = sum((mH_closed(spec, k) / x**k for k in range(1, 13)), mH_closed(spec, 0))
    M = lambda k: mH_closed(spec, k)  # noqa: E731
    assert geometric_sum_closed(M, spec, x, 12) == direct


def test_geometric_errors():
    with pytest.raises(ZeroXError):
        check_sum_geometric(TRIB, 0, 3)
    root_spec = make_spec(6, -11, 6, 0, 1, 6)  # (x-1)(x-2)(x-3)
    with pytest.raises(RootOfNuError):
        check_sum_geometric(root_spec, 2, 3)
    with pytest.raises(IndexOutOfRangeError):
        check_sum_geometric(TRIB, 2, -1)


@settings(max_examples=25, deadline=None)
@given(specs(), st.fractions(min_value=-4, max_value=4, max_denominator=4).filter(lambda x: x != 0),
       st.sampled_from("Hh"))
def test_geometric_sweep_matches_single_checks(spec, x, which):
    if nu(spec, x) == 0:
        return
    sweep = sweep_sum_geometric(spec, x, 8, which)
    assert_pass(sweep)
    assert sweep[8].params == check_sum_geometric(spec, x, 8, which).params


# -- arithmetic-subsequence sums -------------------------------------------------------------------

def _exact_lhs(spec, m, l, n, which):
    closed = mH_closed if which == "H" else mh_closed
    return sum((closed(spec, m * k + l) for k in range(1, n + 1)), closed(spec, l))


@pytest.mark.parametrize("spec, m, l, n, which", [
    (TRIB, 1, 1, 3, "H"), (TRIB, 2, 2, 0, "h"), (SPEC_112, 2, 3, 4, "H"), (SPEC_112, 4, 8, 10, "h"),
])
def test_subsequence_closes_with_repaired_denominator(spec, m, l, n, which):
    v = check_sum_subsequence(spec, m, l, n, which)
    assert v.mode is Mode.NUMERIC
    # the published denominator does not close; the verdict is a flagged discrepancy, not a failure
    assert v.status is Status.FLAGGED
    assert v.residual > 1e-6
    assert v.detail["residual_repaired"] <= 1e-6
    assert v.detail["exact_lhs"] == _exact_lhs(spec, m, l, n, which)


def test_repaired_denominator_from_exact_power_sums():
    # prod(root^m - 1) = t^m - e2(root^m) + p_m - 1 with e2 = (p_m^2 - p_2m) / 2
    for rst in [(1, 1, 1), (0, 1, 1), (2, -1, 3), (-3, 2, -1)]:
        roots = cubic_roots(*rst)
        for m in range(1, 5):
            p_m, p_2m = power_sum(*rst, m), power_sum(*rst, 2 * m)
            exact = Fraction(rst[2]) ** m - (p_m**2 - p_2m) / 2 + p_m - 1
            f = subseq_factors(roots, m)
            assert f.sigma_m_repaired == pytest.approx(float(exact), rel=1e-9, abs=1e-9)
            assert f.mu_m == pytest.approx(float(p_m), rel=1e-12, abs=1e-12)
            assert f.mu_imag <= TOL_IMAG * max(1.0, abs(f.mu_m))


def test_published_denominator_differs_from_repaired():
    f = subseq_factors(cubic_roots(1, 1, 1), 1)
    alpha = cubic_roots(1, 1, 1).alpha
    assert f.sigma_m - f.sigma_m_repaired == pytest.approx(2 / alpha)


def test_subsequence_errors():
    with pytest.raises(SigmaNearZeroError):
        check_sum_subsequence(make_spec(0, 0, 1, 1, 2, 3), 1, 1, 3)  # alpha = 1 exactly
    with pytest.raises(NonPositiveDiscriminantError):
        check_sum_subsequence(make_spec(6, -11, 6, 0, 1, 6), 1, 1, 3)
    with pytest.raises(IndexOutOfRangeError):
        check_sum_subsequence(TRIB, 2, 1, 3)
    with pytest.raises(IndexOutOfRangeError):
        check_sum_subsequence(TRIB, 0, 1, 3)
    assert check_sum_subsequence(TRIB, 2, 1, 3, exploratory=True).exploratory


def test_subsequence_sweep_matches_single_checks():
    sweep = sweep_sum_subsequence(SPEC_112, 3, 4, 6, "H")
    single = check_sum_subsequence(SPEC_112, 3, 4, 6, "H")
    assert sweep[-1].residual == single.residual
    assert sweep[-1].detail["exact_lhs"] == single.detail["exact_lhs"]


def test_subsequence_label_swap_invariance():
    plain, swapped = SpecContext(SPEC_112), SpecContext(SPEC_112, swap_labels=True)
    for m in range(1, 5):
        for l in range(m, m + 5):
            a = check_sum_subsequence(SPEC_112, m, l, 10, "H", ctx=plain)
            b = check_sum_subsequence(SPEC_112, m, l, 10, "H", ctx=swapped)
            assert a.status is b.status
            assert a.residual == pytest.approx(b.residual, rel=1e-6, abs=1e-12)


# -- matrix identities ----------------------------------------------------------------------------

@pytest.mark.parametrize("spec, n, m", [(TRIB, 0, 0), (TRIB, 4, 7), (make_spec(2, 1, 3, 1, 0, 2), 3, 5),
                                        (SPEC_112, -6, 4)])
def test_products_examples(spec, n, m):
    verdicts = check_products(spec, n, m)
    assert len(verdicts) == 5
    assert_pass(verdicts)


@settings(max_examples=30, deadline=None)
@given(specs(), st.integers(-12, 12), st.integers(-12, 12))
def test_products_property(spec, n, m):
    assert_pass(check_products(spec, n, m))


@pytest.mark.parametrize("spec, n", [(TRIB, 3), (SPEC_112, 5), (SPEC_112, 0), (make_spec(2, -3, 5, 1, 2, 3), -4)])
def test_decomposition_examples(spec, n):
    assert_pass(check_decomposition(spec, n))


def test_decomposition_reduces_for_tribonacci():
    assert mH_closed(TRIB, 7) == 1 * mh_closed(TRIB, 7)


@pytest.mark.parametrize("spec, n, m", [(TRIB, 4, 1), (TRIB, 2, 3), (make_spec(1, 2, 1, 2, 1, 1), 3, 2),
                                        (SPEC_112, 0, 6)])
def test_power_law_examples(spec, n, m):
    verdicts = check_power_laws(spec, n, m)
    assert {v.identity_id for v in verdicts} == {IdentityId.MIXED_SHIFT, IdentityId.POWER_LAW,
                                                 IdentityId.POWER_SQUARE, IdentityId.POWER_CUBE}
    assert_pass(verdicts)


def test_power_law_range():
    with pytest.raises(IndexOutOfRangeError):
        check_power_laws(TRIB, -1, 2)
    with pytest.raises(IndexOutOfRangeError):
        check_power_laws(TRIB, 1, 0)


def test_checks_detect_a_corrupted_sequence():
    # any H obeying the recurrence satisfies convolution, so corrupt the h table instead
    ctx = SpecContext(SPEC_112)
    ctx.h = TermTable(make_spec(1, 1, 1, 0, 1, 2))
    v = check_convolution(SPEC_112, 4, 3, ctx=ctx)
    assert v.status is Status.FAIL and v.residual > 0


def test_context_must_match_spec():
    with pytest.raises(ValueError):
        check_convolution(TRIB, 3, 3, ctx=SpecContext(SPEC_112))


# -- published initial matrix ------------------------------------------------------------------------

def test_initial_matrix_agrees_when_a_is_zero():
    assert_pass(check_initial_matrix(TRIB))


def test_initial_matrix_flagged_when_a_nonzero():
    v = check_initial_matrix(SPEC_112)
    assert v.status is Status.FLAGGED
    assert v.detail["cells"] == ["(3,2)"]
    assert v.residual == abs(SPEC_112.a)


# -- suite ---------------------------------------------------------------------------------------------

def test_empty_grid_gives_empty_report():
    report = run_suite([], n_max=5)
    assert report.verdicts == [] and report.summary == {} and report.ok


@pytest.fixture(scope="module")
def small_report():
    grid = [TRIB, SPEC_112, make_spec(6, -11, 6, 0, 1, 6), make_spec(0, 0, 1, 1, 2, 3)]
    return run_suite(grid, n_max=6, seed=3)


def test_suite_verdict_invariants(small_report):
    assert small_report.ok
    for v in small_report.verdicts:
        if v.status is Status.SKIP:
            continue
        if v.mode is Mode.EXACT:
            assert isinstance(v.residual, Fraction)
            assert v.passed == (v.residual == 0)
        else:
            assert isinstance(v.residual, float)
            assert v.passed == (v.residual <= 1e-6)


def test_nonpositive_discriminant_skips_numeric_checks(small_report):
    negative = make_spec(6, -11, 6, 0, 1, 6)
    mine = [v for v in small_report.verdicts if v.spec == negative]
    numeric = [v for v in mine if v.mode is Mode.NUMERIC]
    assert numeric and all(v.status is Status.SKIP for v in numeric)
    assert all(v.status is Status.PASS for v in mine if v.mode is Mode.EXACT
               and v.identity_id not in (IdentityId.GEOMETRIC_SUM_H, IdentityId.GEOMETRIC_SUM_h))


def test_root_weights_and_unit_root_are_skipped(small_report):
    roots_x = [v for v in small_report.verdicts if v.status is Status.SKIP and v.mode is Mode.EXACT]
    assert {dict(v.params)["x"] for v in roots_x} == {2, 3}
    sigma = [v for v in small_report.verdicts if v.spec == make_spec(0, 0, 1, 1, 2, 3)
             and v.mode is Mode.NUMERIC]
    assert any(v.status is Status.SKIP and "sigma" in v.note for v in sigma)


def test_report_json_shape(small_report):
    data = json.loads(small_report.to_json())
    assert set(data) == {"suite_version", "seed", "grid", "verdicts", "summary"}
    assert data["seed"] == 3
    first = data["verdicts"][0]
    assert {"identity_id", "spec", "params", "mode", "status", "pass", "residual"} <= set(first)
    for row in data["summary"].values():
        assert {"pass", "fail", "skip", "flagged", "worst_residual"} <= set(row)
    flagged = [v for v in data["verdicts"] if v["status"] == "flagged"]
    assert flagged and all("note" in v for v in flagged)


def test_suite_is_deterministic():
    grid = default_grid(seed=5)
    a = run_suite(grid, n_max=5, seed=5).to_json()
    b = run_suite(list(reversed(grid)), n_max=5, seed=5).to_json()
    assert a.replace(" ", "") != "" and json.loads(a)["verdicts"] == json.loads(b)["verdicts"]
    assert run_suite(grid, n_max=5, seed=5).to_json() == a


def test_keep_nonpassing_preserves_counts():
    grid = [TRIB, SPEC_112]
    full = run_suite(grid, n_max=5)
    slim = run_suite(grid, n_max=5, keep="nonpassing")
    assert full.summary == slim.summary
    assert all(not v.passed for v in slim.verdicts)
    with pytest.raises(ValueError):
        run_suite(grid, keep="some")


def test_suite_label_swap_gives_same_pass_set():
    grid = [SPEC_112, make_spec(2, -1, 3, 2, -1, 3)]
    checks = [c for c in SUITE if c.__name__ == "_suite_subsequence"]
    a = run_suite(grid, plan=SuitePlan(n_max=10), checks=checks)
    b = run_suite(grid, plan=SuitePlan(n_max=10, swap_labels=True), checks=checks)
    assert [(v.sort_key(), v.status) for v in a.verdicts] == [(v.sort_key(), v.status) for v in b.verdicts]


def test_exploratory_verdicts_never_fail_the_report():
    report = run_suite([SPEC_112], plan=SuitePlan(n_max=4, exploratory=True))
    assert report.ok
    assert any(v.exploratory for v in report.verdicts)
    assert sum(row["exploratory"] for row in report.summary.values()) > 0

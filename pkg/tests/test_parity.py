import gmpy2
import pytest
from hypothesis import given, strategies as st

from cyclosums import CVal, DivergenceError, DomainError, ParityCase, PrecisionCtx, RootOfUnity, check_parity
from cyclosums.parity import (SideError, evaluate_sides, lhs_T32, lhs_T42, msv_parity_closed,
                              msv_parity_direct, msv_parity_via_R, rhs_T32, rhs_T42, split_mrv, split_msv, split_terms,
                              tolerance)

from conftest import dist

ctx30 = PrecisionCtx(digits=30, tol=1e-20)
small_roots = st.builds(RootOfUnity, st.integers(0, 5), st.integers(1, 4))


@pytest.mark.parametrize("theorem,exps,roots", [
    ("T31", (1, 2), ("1/2", "1/2")),
    ("T31", (2, 1), ("1/3", "1/2")),
    ("T41", (1, 2), ("1", "1/4")),
    ("T41", (2, 1), ("1/2", "1/4")),
    ("T32", (1, 1, 2), ("1/2", "1/3", "1/2")),
    ("T32", (2, 2, 2), ("1/3", "2/3", "1/3")),
    ("T42", (1, 1, 2), ("1/2", "1/2", "1/4")),
    ("T42", (1, 2, 2), ("1/3", "1/4", "1")),
    ("SPLIT_S", (1, 2), ("1/2", "1/3")),
    ("SPLIT_R", (2, 1), ("1/3", "1/2")),
])
def test_identity_holds(theorem, exps, roots, ctx):
    rep = check_parity(ParityCase(theorem, exps, roots, ctx))
    assert rep.passed, rep.to_json()
    assert rep.residual < 1e-30


@pytest.mark.parametrize("theorem,exps,roots", [
    ("T31", (1, 1), ("1/2", "1/2")),
    ("T31", (1, 2), ("1/2", "1")),
    ("T32", (1, 2, 1), ("1", "1/2", "1/2")),
    ("T42", (1, 1, 1), ("1/2", "1", "1/2")),
    ("SPLIT_S", (2, 1), ("1/2", "1")),
    ("T99", (1, 2), ("1/2", "1/2")),
])
def test_inadmissible(theorem, exps, roots):
    with pytest.raises(DomainError):
        ParityCase(theorem, exps, roots)


def test_diagnostic_names_constraint():
    with pytest.raises(DivergenceError, match=r"\(q,xy\)"):
        ParityCase("T31", (1, 1), ("1/2", "1/2"))


@pytest.mark.parametrize("theorem,exps,roots", [
    ("T31", (2, 2), ("1/3", "1/4")),
    ("T41", (1, 3), ("1/2", "1/3")),
    ("T42", (2, 1, 2), ("1/2", "1/3", "1/4")),
])
def test_perturbed_rhs_fails(theorem, exps, roots):
    case = ParityCase(theorem, exps, roots, ctx30)
    lhs, rhs = evaluate_sides(case)
    bumped = rhs + CVal(gmpy2.mpc(1e-10), 0.0)
    assert dist(lhs, rhs) <= tolerance(lhs, rhs, ctx30.tol)
    assert dist(lhs, bumped) > tolerance(lhs, bumped, ctx30.tol)


@given(st.integers(1, 2), st.integers(1, 2), st.integers(2, 3), small_roots, small_roots, small_roots)
def test_quadratic_swap_symmetry(p1, p2, q, x, x1, x2):
    for lhs_f, rhs_f in ((lhs_T32, rhs_T32), (lhs_T42, rhs_T42)):
        try:
            a = rhs_f(p1, p2, q, x, x1, x2, ctx30)
        except DomainError:
            continue
        b = rhs_f(p2, p1, q, x, x2, x1, ctx30)
        assert dist(a, b) < 1e-20


@given(st.integers(1, 3), st.integers(1, 3), small_roots, small_roots)
def test_double_msv_three_routes(p, q, x, y):
    if q == 1 and y.is_one:
        return
    if (x * y).is_one and q == 1:
        return
    a = msv_parity_direct(p, q, x, y, ctx30)
    b = msv_parity_via_R(p, q, x, y, ctx30)
    assert dist(a, b) < 1e-20
    try:
        c = msv_parity_closed(p, q, x, y, ctx30)
    except DomainError:
        return
    assert dist(a, c) < 1e-20


@pytest.mark.parametrize("kind,ks,roots", [
    ("S", (1, 2), ("1/2", "1/2")),
    ("R", (2, 1), ("1/3", "1/2")),
    ("S", (2, 2), ("1/3", "1")),
])
def test_split_every_sign_pattern_matters(kind, ks, roots, ctx):
    roots = [RootOfUnity.parse(r) for r in roots]
    lhs, rhs = (split_msv if kind == "S" else split_mrv)(ks, roots, ctx)
    terms = split_terms(kind, ks, roots, ctx)
    with ctx.working():
        total = sum((v.value for _, v in terms), gmpy2.mpc(0))
        pref = rhs.value / total
        assert dist(lhs, rhs) < 1e-30
        for _, v in terms:
            assert float(abs(lhs.value - pref * (total - v.value))) > 1e-10


@pytest.mark.parametrize("branch", [0, 1])
def test_split_both_branches(branch, ctx):
    for th, ks, roots in (("SPLIT_S", (1, 2), ("1/2", "1/4")), ("SPLIT_R", (2, 2), ("1/3", "2/3"))):
        rep = check_parity(ParityCase(th, ks, roots, ctx, branch))
        assert rep.passed and rep.residual < 1e-30


def test_report_json(ctx):
    rep = check_parity(ParityCase("T31", (1, 2), ("1/2", "1/3"), ctx))
    out = rep.to_json()
    assert set(out) >= {"theorem", "params", "lhs", "rhs", "residual", "pass", "terms_used", "seconds"}
    assert out["params"] == {"p": 1, "q": 2, "x": "1/2", "y": "1/3"}
    assert len(out["lhs"]["re"]) > 45


def test_side_error_reports_side(monkeypatch, ctx):
    import cyclosums.parity as par

    def boom(*a):
        raise DomainError("nope")

    monkeypatch.setitem(par._SIDES, "T31", (par.lhs_T31, boom))
    with pytest.raises(SideError) as info:
        evaluate_sides(ParityCase("T31", (1, 2), ("1/2", "1/3"), ctx))
    assert info.value.side == "rhs"

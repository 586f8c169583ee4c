import pytest
from hypothesis import assume, given

from lambdalab.terms import (
    Abs,
    App,
    InvalidArity,
    InvalidPath,
    ParseError,
    SubCalculus,
    Var,
    alpha_eq,
    canonicalize,
    classify,
    free_vars,
    is_anf_redex,
    is_lambda_A,
    is_lambda_I,
    is_normal_form,
    mk_Cn,
    mk_I,
    mk_Mn,
    mk_Omega,
    mk_example1,
    mk_example2,
    mk_omega,
    multiplicity,
    parse,
    random_term,
    redexes,
    reduce_at,
    render,
    substitute,
    subterm_at,
    term_size,
)

from conftest import terms


I = mk_I()
OMEGA = mk_omega()
BIG_OMEGA = mk_Omega()
EX1 = mk_example1()
EX2 = mk_example2()


# ---------------------------------------------------------------------------
# parsing and printing


def test_parse_identity():
    assert parse("\\x.x") == Abs("x", Var("x"))


def test_parse_omega_squared():
    assert parse("(\\x.x x)(\\x.x x)") == BIG_OMEGA


def test_parse_application_left_associative():
    assert parse("x y z") == App(App(Var("x"), Var("y")), Var("z"))


def test_parse_lambda_body_extends_right():
    assert parse("\\x.x y") == Abs("x", App(Var("x"), Var("y")))
    assert parse("\\x.\\y.x") == Abs("x", Abs("y", Var("x")))


def test_parse_unicode_lambda():
    assert parse("λx.x") == I


def test_parse_primes_and_underscores():
    assert parse("\\x'.x_1'") == Abs("x'", Var("x_1'"))


@pytest.mark.parametrize(
    "text,pos",
    [("(\\x.x", 5), ("\\x", 2), ("x )", 2), ("", 0), ("\\1.x", 1), ("x ?", 2)],
)
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert err.value.position == pos


def test_render_minimal_parentheses():
    assert render(EX2) == "(\\x.x x) ((\\x.x) (\\x.x))"
    assert render(EX1) == "(\\x.y) ((\\x.x x) (\\x.x x))"
    assert render(App(App(Var("x"), Var("y")), Var("z"))) == "x y z"
    assert render(App(Var("x"), App(Var("y"), Var("z")))) == "x (y z)"
    assert render(Abs("x", App(Var("x"), Abs("y", Var("y"))))) == "\\x.x (\\y.y)"


@given(terms)
def test_round_trip(t):
    assert alpha_eq(parse(render(t)), t)


# ---------------------------------------------------------------------------
# free variables and alpha classes


def test_free_vars_binder_removed():
    assert free_vars(Abs("x", App(Var("x"), Var("y")))) == {"y"}


def test_free_vars_closed_term():
    assert free_vars(BIG_OMEGA) == set()


def test_free_vars_set_semantics():
    assert free_vars(App(Var("x"), Abs("y", Var("x")))) == {"x"}


def test_alpha_eq_renamed_binder():
    assert alpha_eq(Abs("x", Var("x")), Abs("y", Var("y")))


def test_alpha_eq_binding_structure_matters():
    assert not alpha_eq(Abs("x", Abs("y", Var("x"))), Abs("y", Abs("x", Var("x"))))


def test_alpha_eq_free_names_significant():
    assert not alpha_eq(Var("x"), Var("y"))


def test_canonicalize_identifies_alpha_classes():
    assert canonicalize(Abs("x", Var("x"))) == canonicalize(Abs("y", Var("y")))
    assert canonicalize(Abs("x", App(Var("x"), Var("y")))) != canonicalize(
        Abs("x", App(Var("x"), Var("z")))
    )


def test_canonicalize_deterministic():
    assert canonicalize(BIG_OMEGA) == canonicalize(mk_Omega())


@given(terms, terms)
def test_canonical_identity_iff_alpha_eq(t, u):
    assert (canonicalize(t) == canonicalize(u)) == alpha_eq(t, u)


# ---------------------------------------------------------------------------
# substitution


def test_substitute_replaces_all_occurrences():
    assert substitute(App(Var("x"), Var("x")), "x", I) == App(I, I)


def test_substitute_avoids_capture():
    result = substitute(Abs("y", Var("x")), "x", Var("y"))
    # must be \z.y for some fresh z, never \y.y
    assert isinstance(result, Abs)
    assert result.binder != "y"
    assert result.body == Var("y")
    assert alpha_eq(result, Abs("z", Var("y")))


def test_substitute_bound_occurrence_shielded():
    assert substitute(I, "x", Var("n")) == I


def test_substitute_deterministic():
    a = substitute(Abs("y", Var("x")), "x", Var("y"))
    b = substitute(Abs("y", Var("x")), "x", Var("y"))
    assert a == b


@given(terms, terms, terms)
def test_substitution_lemma(t, n, l):
    # t{n/x}{l/y} == t{l/y}{n{l/y}/x} whenever x != y and x not free in l
    assume("x" not in free_vars(l))
    left = substitute(substitute(t, "x", n), "y", l)
    right = substitute(substitute(t, "y", l), "x", substitute(n, "y", l))
    assert alpha_eq(left, right)


# ---------------------------------------------------------------------------
# redexes


def test_redexes_example2():
    assert redexes(EX2) == [(), ("arg",)]


def test_redexes_normal_form():
    assert redexes(I) == []


def test_redexes_example1():
    assert redexes(EX1) == [(), ("arg",)]


def _redex_positions(t):
    """Offset in render(t) where each redex's own text begins."""
    positions = {}

    def walk(node, path, offset):
        if isinstance(node, Var):
            return offset + len(node.name)
        if isinstance(node, Abs):
            return walk(node.body, path + ("body",), offset + 2 + len(node.binder))
        if isinstance(node.fn, Abs):
            positions[path] = offset
            end_fn = walk(node.fn, path + ("fn",), offset + 1) + 1
        else:
            end_fn = walk(node.fn, path + ("fn",), offset)
        arg_offset = end_fn + 1
        if isinstance(node.arg, Var):
            return walk(node.arg, path + ("arg",), arg_offset)
        return walk(node.arg, path + ("arg",), arg_offset + 1) + 1

    end = walk(t, (), 0)
    assert end == len(render(t))
    return positions


@given(terms)
def test_redex_order_matches_textual_beginnings(t):
    positions = _redex_positions(t)
    paths = redexes(t)
    assert set(paths) == set(positions)
    offsets = [positions[p] for p in paths]
    assert offsets == sorted(offsets)
    assert len(set(offsets)) == len(offsets)  # beginnings never tie
    # the recorded offset really is where the redex's own rendering starts
    text = render(t)
    for p in paths:
        sub = render(subterm_at(t, p))
        assert text[positions[p] : positions[p] + len(sub)] == sub


def test_reduce_at_erases_argument():
    assert reduce_at(EX1, ()) == Var("y")


def test_reduce_at_duplicates_argument():
    ii = App(I, I)
    assert reduce_at(EX2, ()) == App(ii, ii)


def test_reduce_at_omega_self_loop():
    assert alpha_eq(reduce_at(BIG_OMEGA, ()), BIG_OMEGA)


def test_reduce_at_invalid_path():
    with pytest.raises(InvalidPath):
        reduce_at(I, ())
    with pytest.raises(InvalidPath):
        reduce_at(EX2, ("fn",))
    with pytest.raises(InvalidPath):
        is_anf_redex(EX2, ("fn",))
    with pytest.raises(InvalidPath):
        multiplicity(I, ())


def test_is_normal_form():
    assert is_normal_form(I)
    assert is_normal_form(App(App(Var("x"), Abs("y", Var("y"))), Var("z")))
    assert not is_normal_form(App(I, I))


def test_is_anf_redex():
    assert not is_anf_redex(EX2, ())  # argument I I is reducible
    assert is_anf_redex(EX2, ("arg",))
    assert is_anf_redex(EX1, ("arg",))  # omega is normal


def test_multiplicity():
    assert multiplicity(EX2, ()) == 2
    assert multiplicity(EX1, ()) == 0
    assert multiplicity(App(I, Var("y")), ()) == 1


# ---------------------------------------------------------------------------
# sub-calculi


def test_subcalculus_examples():
    assert is_lambda_I(BIG_OMEGA) and not is_lambda_A(BIG_OMEGA)
    cancel = Abs("x", Var("y"))
    assert not is_lambda_I(cancel) and is_lambda_A(cancel)
    assert is_lambda_I(I) and is_lambda_A(I)


def test_classify_consistent():
    assert classify(BIG_OMEGA) is SubCalculus.LAMBDA_I
    assert classify(Abs("x", Var("y"))) is SubCalculus.LAMBDA_A
    assert classify(I) is SubCalculus.BOTH
    assert classify(App(BIG_OMEGA, Abs("x", Var("y")))) is SubCalculus.FULL


@given(terms)
def test_classify_matches_predicates(t):
    tag = classify(t)
    assert (tag in (SubCalculus.LAMBDA_I, SubCalculus.BOTH)) == is_lambda_I(t)
    assert (tag in (SubCalculus.LAMBDA_A, SubCalculus.BOTH)) == is_lambda_A(t)


# ---------------------------------------------------------------------------
# named terms


def test_builders_against_literals():
    assert mk_Cn(2) == parse("\\x.x x")
    assert mk_Cn(1) == I
    assert mk_Cn(3) == parse("\\x.x x x")
    assert mk_example1() == parse("(\\x.y)((\\x.x x)(\\x.x x))")
    assert mk_example2() == parse("(\\x.x x)((\\x.x)(\\x.x))")
    assert mk_Mn(2) == parse("(\\x.((\\y.z)((\\x.x x)(\\x.x x))) x)((\\x.x x)((\\x.x) y))")


def test_builders_reject_zero():
    with pytest.raises(InvalidArity):
        mk_Cn(0)
    with pytest.raises(InvalidArity):
        mk_Mn(0)


# ---------------------------------------------------------------------------
# random generation


def test_random_term_deterministic():
    for tag in SubCalculus:
        assert random_term(99, 12, tag) == random_term(99, 12, tag)


@pytest.mark.parametrize("tag", [SubCalculus.LAMBDA_I, SubCalculus.LAMBDA_A, SubCalculus.BOTH])
def test_random_term_respects_filter(tag):
    for seed in range(120):
        t = random_term(seed, 12, tag)
        assert term_size(t) <= 12
        if tag in (SubCalculus.LAMBDA_I, SubCalculus.BOTH):
            assert is_lambda_I(t)
        if tag in (SubCalculus.LAMBDA_A, SubCalculus.BOTH):
            assert is_lambda_A(t)


def test_random_term_rejects_bad_size():
    with pytest.raises(ValueError):
        random_term(1, 0)

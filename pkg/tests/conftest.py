import hypothesis.strategies as st
import pytest

from lambdalab.terms import Abs, App, Var, ensure_recursion_headroom

ensure_recursion_headroom()

# small shared name pool: collisions between binders and free variables are
# exactly what the alpha-machinery has to get right
names = st.sampled_from(["x", "y", "z", "u", "v"])

terms = st.recursive(
    st.builds(Var, names),
    lambda children: st.one_of(
        st.builds(Abs, names, children),
        st.builds(App, children, children),
    ),
    max_leaves=10,
)

_contexts = st.sampled_from(
    [
        lambda r: r,
        lambda r: App(r, Var("y")),
        lambda r: App(Var("y"), r),
        lambda r: Abs("z", r),
    ]
)

# terms guaranteed to contain at least one redex, in assorted contexts
reducible_terms = st.builds(
    lambda body, arg, ctx: ctx(App(Abs("x", body), arg)), terms, terms, _contexts
)


@pytest.fixture(scope="session")
def term_strategy():
    return terms

"""Store update, reverse update, and evaluation against a plain-dict model."""
import pytest
from hypothesis import given, strategies as st

from rsx.errors import UnboundVariable
from rsx.store import EMPTY_STORE, Store
from rsx.syntax import channel, lit_bool, lit_int, session, variable

x = variable("x")
y = variable("y")


def entries(store):
    return {var.base: list(values) for var, values in store.items()}


def test_update_binds_fresh_variable():
    assert entries(EMPTY_STORE.update(x, lit_int(5))) == {"x": [lit_int(5)]}


def test_update_appends_to_history():
    s = EMPTY_STORE.update(x, lit_int(5)).update(x, lit_int(7))
    assert entries(s) == {"x": [lit_int(5), lit_int(7)]}


def test_update_disjoint_binding():
    s = EMPTY_STORE.update(y, lit_bool(True)).update(x, session("s"))
    assert entries(s) == {"x": [session("s")], "y": [lit_bool(True)]}


def test_reverse_update_removes_entry():
    s = EMPTY_STORE.update(x, lit_int(5))
    assert s.reverse_update(x) == EMPTY_STORE


def test_reverse_update_pops_last_value():
    s = EMPTY_STORE.update(x, lit_int(5)).update(x, lit_int(7))
    assert entries(s.reverse_update(x)) == {"x": [lit_int(5)]}


def test_reverse_update_unbound():
    with pytest.raises(UnboundVariable):
        EMPTY_STORE.reverse_update(x)


def test_evaluate_bound_variable_gives_top():
    s = EMPTY_STORE.update(x, lit_int(5)).update(x, lit_int(7))
    assert s.evaluate(x) == lit_int(7)


def test_evaluate_non_variable_is_identity():
    assert EMPTY_STORE.evaluate(channel("a")) == channel("a")
    assert Store({x: (session("s"),)}).evaluate(lit_int(42)) == lit_int(42)


def test_evaluate_unbound_variable_is_itself():
    assert EMPTY_STORE.evaluate(y) == y


def test_operations_are_pure():
    s = EMPTY_STORE.update(x, lit_int(1))
    s.update(x, lit_int(2))
    s.update(y, lit_int(3))
    assert entries(s) == {"x": [lit_int(1)]}


# -- model-based property ----------------------------------------------------

var_names = st.sampled_from(["x", "y", "z", "w"])
values = st.one_of(
    st.integers(-5, 99).map(lit_int),
    st.booleans().map(lit_bool),
    st.sampled_from(["s", "r"]).map(session))


@given(st.lists(st.tuples(var_names, values), max_size=12))
def test_store_matches_dict_model(ops):
    store = EMPTY_STORE
    model: dict[str, list] = {}
    for name, v in ops:
        var = variable(name)
        store = store.update(var, v)
        model.setdefault(name, []).append(v)
        assert store.evaluate(var) == v
    assert entries(store) == model
    for name in list(model):
        var = variable(name)
        before = entries(store)
        store = store.reverse_update(var)
        model[name].pop()
        if not model[name]:
            del model[name]
        assert entries(store) == model
        untouched = {k: v for k, v in before.items() if k != name}
        assert {k: v for k, v in entries(store).items() if k != name} == untouched


@given(var_names, values)
def test_reverse_update_inverts_update(name, v):
    base = EMPTY_STORE.update(variable("w"), lit_int(0))
    var = variable(name)
    assert base.update(var, v).reverse_update(var) == base

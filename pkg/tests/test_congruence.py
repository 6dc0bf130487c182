"""Structural congruence, canonical forms, and decomposition."""
import itertools

from rsx.congruence import canonicalize, decompose, equiv, flatten
from rsx.surface import parse_config
from rsx.syntax import (
    CNIL, ConfRes, Monitor, Par, Running, channel, validate)

RUNNER_A = "proc[]{ ~a(x:!int.end). x!<5>. 0 } store{}"
RUNNER_B = "proc[]{ a(y:?int.end). y?(z). 0 } store{}"
POST_OPEN = ("new(s0,~s0). ("
             "proc[s0]{ y?(z). 0 } store{ y = [s0] } | "
             "proc[~s0]{ x!<5>. 0 } store{ x = [~s0] } | "
             "mon s0{ ^?int.end ; [y] ; [a] } | "
             "mon ~s0{ ^!int.end ; [x] ; [~a] })")


def test_parallel_commutes():
    assert equiv(parse_config(f"{RUNNER_A} | {RUNNER_B}"),
                 parse_config(f"{RUNNER_B} | {RUNNER_A}"))


def test_reflexive():
    m = parse_config(POST_OPEN)
    assert equiv(m, m)


def test_parallel_associates():
    a, b, c = RUNNER_A, RUNNER_B, "proc[]{ 0 } store{}"
    assert equiv(parse_config(f"({a} | {b}) | {c}"),
                 parse_config(f"{a} | ({b} | {c})"))


def test_nil_absorbed():
    assert equiv(parse_config(f"{RUNNER_A} | 0"), parse_config(RUNNER_A))
    assert canonicalize(parse_config(f"{RUNNER_A} | 0")).text == \
        canonicalize(parse_config(RUNNER_A)).text


def test_restriction_of_nil_is_nil():
    assert canonicalize(parse_config("new(n). 0")).text == "0"
    assert equiv(parse_config("new(n). 0"), CNIL)


def test_restrictions_reorder():
    m = parse_config("new(a). new(b). proc[]{ ~a(x:end). 0 } store{} "
                     "| proc[]{ b(y:end). 0 } store{}")
    n = parse_config("new(b). new(a). proc[]{ ~a(x:end). 0 } store{} "
                     "| proc[]{ b(y:end). 0 } store{}")
    assert equiv(m, n)


def test_scope_extrusion():
    m = parse_config(f"(new(b). proc[]{{ ~b(x:end). 0 }} store{{}}) | {RUNNER_B}")
    n = parse_config(f"new(b). (proc[]{{ ~b(x:end). 0 }} store{{}} | {RUNNER_B})")
    assert equiv(m, n)


def test_no_extrusion_across_a_clashing_free_name():
    # the bound channel is renamed apart from the free one, so these differ
    m = parse_config(f"(new(a). proc[]{{ ~a(x:end). 0 }} store{{}}) | {RUNNER_B}")
    n = parse_config(f"new(a). (proc[]{{ ~a(x:end). 0 }} store{{}} | {RUNNER_B})")
    assert not equiv(m, n)


def test_alpha_renaming_of_bound_sessions():
    other = POST_OPEN.replace("s0", "s7")
    assert equiv(parse_config(POST_OPEN), parse_config(other))
    assert canonicalize(parse_config(other)).text == \
        canonicalize(parse_config(POST_OPEN)).text


def test_free_names_are_observable():
    m = parse_config("proc[s0]{ 0 } store{ x = [s0] } | mon s0{ ^end ; [x] ; [a] }"
                     " | proc[~s0]{ 0 } store{ y = [~s0] }"
                     " | mon ~s0{ ^end ; [y] ; [~a] }")
    n = parse_config(m and "proc[s9]{ 0 } store{ x = [s9] } | mon s9{ ^end ; [x] ; [a] }"
                     " | proc[~s9]{ 0 } store{ y = [~s9] }"
                     " | mon ~s9{ ^end ; [y] ; [~a] }")
    assert not equiv(m, n)  # without a binder the names are different sessions


def test_canonicalize_idempotent():
    for src in (POST_OPEN, f"{RUNNER_A} | {RUNNER_B}", "0"):
        c = canonicalize(parse_config(src))
        assert canonicalize(c.to_configuration()).text == c.text


def test_canonical_form_has_normal_shape():
    c = canonicalize(parse_config(POST_OPEN))
    reparsed = parse_config(c.text)
    node = reparsed
    while isinstance(node, ConfRes):
        node = node.body
    kinds = []
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, Par):
            stack.append(n.right)
            stack.append(n.left)
        else:
            assert isinstance(n, (Running, Monitor))
            kinds.append(isinstance(n, Monitor))
    assert kinds == sorted(kinds)  # runners first, then monitors


def test_equivalence_relation_on_variants():
    base = parse_config(f"{RUNNER_A} | {RUNNER_B}")
    variants = [parse_config(f"{RUNNER_B} | {RUNNER_A}"),
                parse_config(f"({RUNNER_A} | {RUNNER_B}) | 0"),
                parse_config(f"0 | ({RUNNER_B} | {RUNNER_A})")]
    for m, n in itertools.product([base] + variants, repeat=2):
        assert equiv(m, n)
        assert equiv(n, m)


def test_closed_under_evaluation_contexts():
    m = parse_config(f"{RUNNER_A} | {RUNNER_B}")
    n = parse_config(f"{RUNNER_B} | {RUNNER_A}")
    extra = parse_config("proc[]{ b(q:?bool.end). q?(w). 0 } store{}")
    em = ConfRes(channel("c9"), Par(m, extra))
    en = ConfRes(channel("c9"), Par(n, extra))
    assert equiv(em, en)
    not_n = parse_config(RUNNER_B)
    assert not equiv(ConfRes(channel("c9"), Par(m, extra)),
                     ConfRes(channel("c9"), Par(not_n, extra)))


def test_decompose_restriction_over_parallel():
    m = parse_config(POST_OPEN)
    ctx, comps = decompose(m)
    assert [r.base for r in ctx.restrictions] == ["s0"]
    assert len(comps) == 4
    assert sum(isinstance(c, Running) for c in comps) == 2
    assert sum(isinstance(c, Monitor) for c in comps) == 2


def test_decompose_nil():
    ctx, comps = decompose(CNIL)
    assert ctx.restrictions == ()
    assert comps == []
    assert ctx.plug(comps) == CNIL


def test_decompose_plug_back_round_trip():
    srcs = [POST_OPEN,
            f"{RUNNER_A} | ({RUNNER_B} | 0)",
            "new(a). (proc[]{ ~a(x:end). 0 } store{} | new(b). proc[]{ b(y:end). 0 } store{})"]
    for src in srcs:
        m = parse_config(src)
        ctx, comps = decompose(m)
        back = ctx.plug(comps)
        validate(back)
        assert equiv(back, m)


def test_flatten_preserves_component_objects():
    m = parse_config(POST_OPEN)
    flat = flatten(m)
    again = flatten(flat.to_configuration())
    assert all(a is b for a, b in zip(flat.components, again.components))

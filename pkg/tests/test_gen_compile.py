import pytest

from genlr.gen_compile import (
    CompileError, Mode, compile_tables, dump_tables, format_entries, format_state,
    initial_state, lf_typing, load_tables, nondeterminism_report, parse_tables, save_tables,
)
from genlr.grammar import normalize, parse_grammar
from genlr.terms import canonical, core, functor_key, list_items, parse_term

from goldens import OPTIMIZED, SPLIT, STATE1, STATE2, STATE3, same_items


def _descend(t, sid):
    return {canonical(k, dontcare=True): target for k, target in t.descend.get(sid, ())}


def _goto(t, sid):
    return {canonical(k, dontcare=True): target for k, target in t.goto.get(sid, ())}


# -- the first generation states -------------------------------------------------------

def test_initial_state(sample_nf):
    st = initial_state(sample_nf)
    assert st.pos == 0 and same_items(st, STATE1)


def test_first_three_states(sample_fixed1):
    t = sample_fixed1
    assert same_items(t.states[1], STATE1)
    assert _descend(t, 1)["mod(_,_)"] == 2
    assert t.states[2].pos == 0 and same_items(t.states[2], STATE2)
    assert _descend(t, 2)["mod(_,_)"] == 3
    assert t.states[3].pos == 0 and same_items(t.states[3], STATE3)


def test_zero_depth_is_functor_only(sample_fixed0):
    assert _descend(sample_fixed0, 1)["mod(_,_)"] == 2
    assert all(k.count("(") <= 1 for k in _descend(sample_fixed0, 1))


def test_full_depth_split(sample_nf):
    t = compile_tables(sample_nf, Mode.fixed(2))
    keys = _descend(t, 1)
    for key, golden in SPLIT.items():
        assert same_items(t.states[keys[key]], [golden]), key


def test_optimized_entry(sample_auto):
    keys = _descend(sample_auto, 1)
    assert "mod(_,ynq)" in keys
    assert not any(k.startswith("mod(") and k != "mod(_,ynq)" and k.endswith(",ynq)") for k in keys)
    assert same_items(sample_auto.states[keys["mod(_,ynq)"]], [OPTIMIZED])


def test_goto_after_first_argument(sample_fixed1):
    # From the three-item state, a sleep(_) subject rules out nothing yet; the
    # successor holds the items with the dot before the second argument.
    t = sample_fixed1
    succ = t.states[_goto(t, 2)["sleep(_)"]]
    assert succ.pos == 1 and len(succ.items) == 3


def test_listing(sample_fixed1):
    text = format_state(sample_fixed1, 2)
    assert text.splitlines()[0] == "State 2"
    assert "<S, mod(V1,V2), e, e> => . <S, V1, e, e> <QM, V2, e, e>" in text
    assert "descend(1,mod(_,_),2)." in format_entries(sample_fixed1)


# -- nondeterminism ----------------------------------------------------------------------

def test_auto_is_deterministic(sample_auto):
    rep = nondeterminism_report(sample_auto)
    assert rep and set(rep.values()) == {1}


def test_functor_keys_leave_nondeterminism(sample_fixed1):
    assert max(nondeterminism_report(sample_fixed1).values()) >= 2


def test_deeper_never_worse(sample_nf):
    worst = [max(nondeterminism_report(compile_tables(sample_nf, Mode.fixed(d))).values())
             for d in (1, 2, 3)]
    assert worst == sorted(worst, reverse=True)


def test_nbar_auto_bounded(nbar_auto, nbar_fixed0):
    a, f = nondeterminism_report(nbar_auto), nondeterminism_report(nbar_fixed0)
    assert max(a.values()) <= max(f.values())


def test_no_fallback_names_state():
    g = normalize(parse_grammar('@top S.\n1: S(X) --> NP(X).\n'
                                'NP(john) ==> "John".\nNP(john) ==> "Johnny".\n'))
    with pytest.raises(CompileError, match="state 1"):
        compile_tables(g, Mode.auto(2, fallback=False))
    assert max(nondeterminism_report(compile_tables(g, Mode.auto(2))).values()) == 2


# -- examples mode -------------------------------------------------------------------------

def test_single_training_example(sample_nf):
    lf = parse_term("mod(sleep(john),ynq)")
    t = compile_tables(sample_nf, Mode.from_examples([lf]))
    key, target = t.lookup(t.descend, 1, lf)
    assert canonical(key, dontcare=True) == "mod(_,ynq)"
    assert len(t.states[target].items) == 1


def test_training_example_with_np_structure(nbar_nf, nbar_fixed0):
    lf = parse_term("mod(see(q(indef,house),mary),in(paris))")
    t = compile_tables(nbar_nf, Mode.from_examples([lf]))
    _, target = t.lookup(t.descend, 1, lf)
    assert len(t.states[target].items) == 1
    _, target0 = nbar_fixed0.lookup(nbar_fixed0.descend, 1, lf)
    assert len(nbar_fixed0.states[target0].items) == 3


# -- typing ---------------------------------------------------------------------------------

def test_typing(sample_nf, nbar_nf):
    types = lf_typing(sample_nf)
    assert types["john"] == types["mary"] == types["paris"]
    assert len({types["john"], types["today"], types["ynq"]}) == 3
    assert "sleep" not in types and "see" not in types
    nt = lf_typing(nbar_nf)
    assert nt["house"] == nt["garden"] == nt["city"] != nt["red"]


def test_singleton_lexicon():
    g = normalize(parse_grammar('@top NP.\nNP(john) ==> "John".\n'))
    assert lf_typing(g) == {"john": "john"}
    assert set(nondeterminism_report(compile_tables(g, Mode.fixed(1))).values()) == {1}


# -- invariants ------------------------------------------------------------------------------

@pytest.mark.parametrize("fixture", ["sample_fixed1", "sample_auto", "nbar_auto"])
def test_state_invariants(request, fixture):
    t = request.getfixturevalue(fixture)
    for sid, st in t.states.items():
        keys = {functor_key(core(term.args[0].args[1])) for _, term in st.items}
        arities = {len(list_items(term.args[1])[0]) for _, term in st.items}
        assert len(keys) == 1 and len(arities) == 1, sid
        if st.reductive:
            assert t.reduce.get(sid) and sid not in t.descend and sid not in t.goto
        else:
            assert sid not in t.reduce


# -- serialization --------------------------------------------------------------------------

@pytest.mark.parametrize("fixture", ["sample_fixed1", "sample_auto", "nbar_auto"])
def test_dump_round_trip(request, fixture):
    text = dump_tables(request.getfixturevalue(fixture))
    assert dump_tables(parse_tables(text)) == text
    assert text.splitlines() == sorted(text.splitlines())


def test_save_load(tmp_path, sample_auto):
    path = tmp_path / "sample.tbl"
    save_tables(sample_auto, str(path))
    assert dump_tables(load_tables(str(path))) == dump_tables(sample_auto)
    assert nondeterminism_report(load_tables(str(path))) == nondeterminism_report(sample_auto)


def test_tampered_rule_rejected(sample_auto):
    lines = dump_tables(sample_auto).splitlines()
    i = next(i for i, l in enumerate(lines) if l.startswith("rule ") and "ynq" in l)
    lines[i] = lines[i].replace("ynq", "ynx")
    with pytest.raises(CompileError, match="does not match"):
        parse_tables("\n".join(lines) + "\n")


def test_compilation_is_reproducible(sample_nf, sample_auto):
    assert dump_tables(compile_tables(sample_nf, Mode.auto())) == dump_tables(sample_auto)

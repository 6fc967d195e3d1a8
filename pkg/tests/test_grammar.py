import io

import pytest

from genlr.grammar import (
    GrammarError, check_offline_parsability, classify, normalize, parse_grammar, report_problems,
)
from genlr.terms import parse_term, variant

from oracles import lf_strings

# Normal form of the sample grammar, written as rule(LHS, RHS, PendingArgs).
NORMAL_FORM = {
    1: "rule(c('S',mod(X,Y),W0,W,[],[]), [c('S',X,W0,W1,[],[]), c('QM',Y,W1,W,[],[])], [])",
    2: "rule(c('S',Y,W0,W,[],[]), [c('VP',X^Y,W1,W,[c('NP',X,W0,W1)],[])], [])",
    3: "rule(c('VP',X^mod(Y,Z),W0,W,A0,A), [c('VP',X^Y,W0,W1,A0,A), c('AdvP',Z,W1,W,[],[])], [])",
    4: "rule(c('VP',X^mod(Y,Z),W0,W,A0,A), [c('VP',X^Y,W0,W1,A0,A), c('PP',Z,W1,W,[],[])], [])",
    5: "rule(c('VP',X,W0,W,A0,A), [c('V_i',X,W0,W,A0,A)], [])",
    6: "rule(c('VP',Y,W0,W,A0,A), [c('V_t',X^Y,W0,W1,[c('NP',X,W1,W)|A0],A)], [])",
    7: "rule(c('PP',Y,W0,W,A0,A), [c('P',X^Y,W0,W1,[c('NP',X,W1,W)|A0],A)], [])",
    8: "rule(c('NP',john,['John'|W],W,A,[]), [], A)",
    9: "rule(c('NP',mary,['Mary'|W],W,A,[]), [], A)",
    10: "rule(c('NP',paris,['Paris'|W],W,A,[]), [], A)",
    11: "rule(c('V_i',X^sleep(X),[sleeps|W],W,A,[]), [], A)",
    12: "rule(c('V_t',X^Y^see(X,Y),[sees|W],W,A,[]), [], A)",
    13: "rule(c('P',X^in(X),[in|W],W,A,[]), [], A)",
    14: "rule(c('AdvP',today,[today|W],W,A,[]), [], A)",
    15: "rule(c('QM',ynq,['?'|W],W,A,[]), [], A)",
}


def test_sample_shape(sample):
    assert sample.top == "S"
    assert len(sample.phrasal) == 7 and len(sample.lexicon) == 8


def test_classification(sample):
    chain, non_chain = classify(sample)
    assert sorted(r.id for r in chain) == [2, 5, 6, 7]
    assert sorted(r.id for r in non_chain if not r.lexical) == [1, 3, 4]
    assert all(r.kind == "non-chain" for r in sample.lexicon)


def test_lexicon_only_grammar_is_all_non_chain():
    g = parse_grammar('@top NP.\nNP(john) ==> "John".\nNP(mary) ==> "Mary".\n')
    chain, non_chain = classify(g)
    assert chain == [] and len(non_chain) == 2


@pytest.mark.parametrize("rid", sorted(NORMAL_FORM))
def test_normal_form(sample_nf, rid):
    r = sample_nf.rule(rid)
    assert variant(r.as_term(), parse_term(NORMAL_FORM[rid])), r.as_term()


def test_normal_form_kinds(sample_nf):
    assert sorted(r.id for r in sample_nf.argument_rules) == [2, 5, 6, 7]
    assert all(len(r.rhs) == 1 for r in sample_nf.argument_rules)


def test_normalize_is_idempotent(sample_nf):
    assert normalize(sample_nf) is sample_nf


def test_offline_parsability(sample_nf, nbar_nf):
    assert check_offline_parsability(sample_nf) is None
    assert check_offline_parsability(nbar_nf) is None


def test_pass_through_cycle_reported():
    g = parse_grammar("@top S.\n1: S(X) --> VP(X).\n2: VP(X) --> VP(X).\n"
                      "3: VP(X) --> V_i(X).\nV_i(X^sleep(X)) ==> \"sleeps\".\n")
    assert check_offline_parsability(normalize(g)) == ["VP", "VP"]
    err = io.StringIO()
    assert report_problems(g, err) is False
    assert "VP -> VP" in err.getvalue()


def test_empty_grammar():
    with pytest.raises(GrammarError, match="no rules"):
        parse_grammar("% nothing here\n")


def test_unbound_flow_target_names_rule():
    with pytest.raises(GrammarError, match="rule 1"):
        parse_grammar('@top S.\n1: S(X) --> NP(X), VP(X). @flow {head: 9}\nNP(a) ==> "a".\n')


def test_duplicate_rule_id():
    with pytest.raises(GrammarError):
        parse_grammar('@top S.\n1: S(X) --> A(X).\n1: S(X) --> B(X).\nA(a) ==> "a".\nB(b) ==> "b".\n')


def test_ambiguous_head_rejected():
    g = parse_grammar('@top S.\n1: S(a) --> A(a), A(a).\nA(a) ==> "a".\n')
    with pytest.raises(GrammarError, match="head"):
        normalize(g)


def test_variable_lhs_without_head_rejected():
    g = parse_grammar('@top S.\n1: S(X) --> A(a).\nA(a) ==> "a".\n')
    with pytest.raises(GrammarError):
        normalize(g)


def test_syntax_error_has_line():
    with pytest.raises(GrammarError, match="line 2"):
        parse_grammar("@top S.\n1: S(X) --> .\n")


def test_enumeration_oracle_on_hand_derivations(nbar):
    lfs = lf_strings(nbar, "S", 4)
    assert lfs["sleep(q(indef,house))"][1] == {"a house sleeps"}
    assert lfs["see(john,mary)"][1] == {"Mary sees John"}

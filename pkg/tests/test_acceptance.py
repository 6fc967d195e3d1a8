"""End-to-end acceptance checks, one test per numbered criterion."""
import time

import pytest

from genlr.gen_compile import (
    Mode, compile_tables, dump_tables, load_tables, nondeterminism_report, save_tables,
)
from genlr.generator import generate
from genlr.inversion import invert_grammar
from genlr.lr_parse import cells, cfg_of, compile_parse_tables, format_states, parse, reconstruct
from genlr.shdg import shdg_generate
from genlr.terms import canonical, parse_term, variant

from acceptance_log import record
from goldens import INVERTED, OPTIMIZED, SPLIT, STATE1, STATE2, STATE3, STATES, TABLE, same_items
from oracles import lf_strings, strings_for

P = parse_term

# criteria checked by several parametrized cases
_seven: list = []
_nine: list = []

DEEP_NBAR = [
    "sleep(q(indef,mod(house,mod(mod(red,garden),city))))",
    "see(q(indef,mod(city,mod(garden,red))),mary)",
    "mod(see(q(indef,house),mary),in(paris))",
    "sleep(q(indef,mod(mod(house,red),garden)))",
    "mod(sleep(q(indef,mod(garden,red))),ynq)",
]


def _descend(t, sid):
    return {canonical(k, dontcare=True): target for k, target in t.descend.get(sid, ())}


def _listing(tables):
    out = []
    for line in format_states(tables).splitlines():
        if line.startswith("State"):
            out.append([])
        else:
            out[-1].append(line.strip())
    return out


@pytest.fixture(scope="module")
def corpus(sample, nbar):
    """Ground S logical forms of both grammars, within derivation depth six."""
    lfs = [(sample, lf, strs) for lf, strs in lf_strings(sample, "S", 5).values()]
    lfs += [(nbar, lf, strs) for lf, strs in lf_strings(nbar, "S", 4).values()]
    return lfs


@pytest.fixture(scope="module")
def generated(corpus, sample_nf, nbar_nf):
    """Strings for every corpus LF under each generator, plus the wall time."""
    t0 = time.perf_counter()
    tables = {}
    for g, nf in ((corpus[0][0], sample_nf), (corpus[-1][0], nbar_nf)):
        tables[id(g)] = (compile_tables(nf, Mode.auto()), compile_tables(nf, Mode.fixed(0)))
    rows = []
    for g, lf, enumerated in corpus:
        auto, fixed0 = tables[id(g)]
        rows.append((g, lf,
                     set(generate(auto, "S", lf)[0]),
                     set(generate(fixed0, "S", lf)[0]),
                     set(shdg_generate(g, "S", lf)[0]),
                     strings_for(g, "S", lf), enumerated))
    return rows, time.perf_counter() - t0


def _determinism(tables, lfs):
    worst = set(nondeterminism_report(tables).values())
    bt = sum(generate(tables, "S", lf)[1].backtracks for lf in lfs)
    return worst, bt


def test_1_parse_states(backbone):
    t0 = time.perf_counter()
    tables = compile_parse_tables(cfg_of(backbone))
    dt = time.perf_counter() - t0
    got = _listing(tables)
    ok = record(1, got == STATES and len(got) == 12 and dt < 1.0,
                f"{len(got)} states, item sets equal: {got == STATES}, {dt * 1000:.1f} ms")
    assert ok


def test_2_parse_table(backbone):
    c = cells(compile_parse_tables(cfg_of(backbone)))
    diff = {k for k in set(c) | set(TABLE) if c.get(k) != TABLE.get(k)}
    ok = record(2, not diff and c[(2, "eos")] == "acc" and c[(8, "eos")] == "r7",
                f"{len(c)} cells, {len(diff)} differing")
    assert ok, sorted(diff)


def test_3_inverted_rules(sample_nf):
    inv = invert_grammar(sample_nf)
    matched = sum(1 for _, text in INVERTED
                  if sum(variant(r.as_term(), P(text)) for r in inv) == 1)
    ok = record(3, len(inv) == 15 and matched == 15, f"{len(inv)} rules, {matched}/15 matched")
    assert ok


def test_4_first_states(sample_fixed1):
    t = sample_fixed1
    d1 = _descend(t, 1).get("mod(_,_)")
    d2 = _descend(t, 2).get("mod(_,_)") if d1 == 2 else None
    checks = [same_items(t.states[1], STATE1),
              d1 == 2 and same_items(t.states[2], STATE2),
              d2 == 3 and same_items(t.states[3], STATE3)]
    ok = record(4, all(checks), f"states 1-3 equal: {checks}")
    assert ok


def test_5_lookahead_shapes(sample_nf, sample_fixed0, sample_auto):
    zero = "mod(_,_)" in _descend(sample_fixed0, 1)
    full = compile_tables(sample_nf, Mode.fixed(2))
    fkeys = _descend(full, 1)
    split = all(k in fkeys and same_items(full.states[fkeys[k]], [v]) for k, v in SPLIT.items())
    akeys = _descend(sample_auto, 1)
    ynq = [k for k in akeys if k.startswith("mod(") and k.endswith(",ynq)")]
    auto = ynq == ["mod(_,ynq)"] and same_items(sample_auto.states[akeys["mod(_,ynq)"]], [OPTIMIZED])
    ok = record(5, zero and split and auto, f"zero-depth {zero}, full-depth {split}, auto {auto}")
    assert ok


@pytest.fixture(scope="module")
def deep_sample_lfs(sample):
    return [lf for lf, _ in lf_strings(sample, "S", 6).values()]


def test_6_full_determinism(sample_auto, deep_sample_lfs):
    worst, bt = _determinism(sample_auto, deep_sample_lfs)
    ok = record(6, worst == {1} and bt == 0,
                f"reduce counts {sorted(worst)}, {len(deep_sample_lfs)} LFs, {bt} backtracks")
    assert ok


@pytest.mark.parametrize("gname,train,probe", [
    ("sample_nf", "mod(sleep(john),ynq)", ["mod(sleep(john),ynq)", "mod(sleep(mary),ynq)",
                                           "mod(see(paris,mary),ynq)"]),
    ("nbar_nf", "mod(see(q(indef,house),mary),in(paris))",
     ["mod(see(q(indef,house),mary),in(paris))", "mod(see(q(indef,garden),john),in(paris))"]),
])
def test_7_example_based(request, gname, train, probe):
    t = compile_tables(request.getfixturevalue(gname), Mode.from_examples([P(train)]))
    live = [len(t.states[t.lookup(t.descend, 1, P(lf))[1]].items) for lf in probe]
    runs = [generate(t, "S", P(lf)) for lf in probe]
    ok = live == [1] * len(probe) and all(s and st.backtracks == 0 for s, st in runs)
    detail = f"{train}: state-2 alternatives {live}, backtracks {[st.backtracks for _, st in runs]}"
    _seven.append((ok, detail))
    record(7, all(o for o, _ in _seven), "; ".join(d for _, d in _seven))
    assert ok


def test_8_completeness(generated):
    rows, dt = generated
    bad = [canonical(lf) for _, lf, a, f, s, o, e in rows if not (a == f == s == o and e <= o)]
    ok = record(8, len(rows) >= 200 and not bad and dt < 60,
                f"{len(rows)} LFs, {len(bad)} disagreements, {dt:.1f} s")
    assert ok, bad[:5]


@pytest.fixture(scope="module")
def nbar_corpus(nbar):
    lfs = [lf for text, (lf, _) in lf_strings(nbar, "S", 4).items() if "q(" in text]
    return lfs + [P(x) for x in DEEP_NBAR]


@pytest.mark.parametrize("mode", ["examples", "auto"])
def test_9_search_reduction(nbar, nbar_nf, nbar_auto, nbar_corpus, mode):
    t = compile_tables(nbar_nf, Mode.from_examples(nbar_corpus)) if mode == "examples" else nbar_auto
    worse, strict, deep = 0, 0, None
    for lf in nbar_corpus:
        strings, st = generate(t, "S", lf)
        base, sh = shdg_generate(nbar, "S", lf)
        assert set(strings) == set(base), canonical(lf)
        worse += st.choice_points > sh.choice_points
        strict += st.choice_points < sh.choice_points
        if canonical(lf) == DEEP_NBAR[0]:
            deep = (st.choice_points, sh.choice_points)
    ok = not worse and deep is not None and deep[0] < deep[1]
    _nine.append((ok, f"{mode}: {len(nbar_corpus)} LFs, {worse} worse, {strict} fewer, deepest {deep[0]} vs {deep[1]}"))
    record(9, all(o for o, _ in _nine), "; ".join(d for _, d in _nine))
    assert ok


def test_10_round_trip(generated):
    rows, _ = generated
    parsers = {}
    failures, n = [], 0
    for g, lf, strings, *_ in rows:
        tables = parsers.setdefault(id(g), compile_parse_tables(cfg_of(g)))
        for s in strings:
            n += 1
            back = {canonical(reconstruct(g, tree)[1]) for tree in parse(tables, s.split())}
            if canonical(lf) not in back:
                failures.append(s)
    ok = record(10, n > 0 and not failures, f"{n} strings, {len(failures)} failed")
    assert ok, failures[:5]


def test_11_serialization(tmp_path, sample_auto, deep_sample_lfs):
    first, second = tmp_path / "a.tbl", tmp_path / "b.tbl"
    save_tables(sample_auto, str(first))
    loaded = load_tables(str(first))
    save_tables(loaded, str(second))
    exact = first.read_bytes() == second.read_bytes() and dump_tables(loaded) == dump_tables(sample_auto)
    same = _determinism(loaded, deep_sample_lfs) == _determinism(sample_auto, deep_sample_lfs)
    ok = record(11, exact and same, f"bit-exact {exact}, determinism unchanged {same}")
    assert ok

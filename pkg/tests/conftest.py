import sys
from pathlib import Path

import pytest

from genlr import Mode, compile_tables, data_path, load_grammar, normalize

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def sample():
    return load_grammar(data_path("sample.gram"))


@pytest.fixture(scope="session")
def nbar():
    return load_grammar(data_path("nbar.gram"))


@pytest.fixture(scope="session")
def backbone():
    return load_grammar(data_path("backbone.gram"))


@pytest.fixture(scope="session")
def sample_nf(sample):
    return normalize(sample)


@pytest.fixture(scope="session")
def nbar_nf(nbar):
    return normalize(nbar)


@pytest.fixture(scope="session")
def sample_fixed1(sample_nf):
    return compile_tables(sample_nf, Mode.fixed(1))


@pytest.fixture(scope="session")
def sample_fixed0(sample_nf):
    return compile_tables(sample_nf, Mode.fixed(0))


@pytest.fixture(scope="session")
def sample_auto(sample_nf):
    return compile_tables(sample_nf, Mode.auto())


@pytest.fixture(scope="session")
def nbar_fixed0(nbar_nf):
    return compile_tables(nbar_nf, Mode.fixed(0))


@pytest.fixture(scope="session")
def nbar_auto(nbar_nf):
    return compile_tables(nbar_nf, Mode.auto())


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance")
    for n in range(1, 12):
        ok, detail = RESULTS.get(n, (False, "not run"))
        terminalreporter.write_line(f"ACCEPTANCE {n:2d} {'PASS' if ok else 'FAIL'} {detail}")

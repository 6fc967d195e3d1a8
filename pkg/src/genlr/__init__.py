"""Generation from logical forms through LR-compiled tables.

Typical use::

    from genlr import load_grammar, normalize, compile_tables, Mode, generate
    g = normalize(load_grammar("sample.gram"))
    tables = compile_tables(g, Mode.auto())
    generate(tables, "S", parse_term("mod(sleep(john), ynq)"))
"""
from importlib import resources

__version__ = "0.1.0"

from .terms import parse_term, parse_terms, canonical, variant, unify, truncate, DepthAssignment  # noqa: E402
from .grammar import load_grammar, parse_grammar, normalize, classify, check_offline_parsability  # noqa: E402
from .inversion import Inverter, invert_for, invert_grammar  # noqa: E402
from .lr_parse import cfg_of, compile_parse_tables, parse, reconstruct  # noqa: E402
from .shdg import GenStats, shdg_generate  # noqa: E402
from .gen_compile import Mode, compile_tables, nondeterminism_report, lf_typing, save_tables, load_tables  # noqa: E402
from .generator import generate, compare  # noqa: E402


def data_path(name: str) -> str:
    """Path of a bundled grammar, e.g. ``data_path("sample.gram")``."""
    return str(resources.files(__name__).joinpath("data", name))

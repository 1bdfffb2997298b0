"""Grammar analysis by pre* saturation of finite automata."""

from .analyses import (
    AnalysisReport,
    Parse,
    analyze,
    contained_in,
    contained_in_language,
    is_empty,
    is_finite,
    membership,
    nullable_variables,
    parse,
    productive_variables,
    reachable_variables,
    useless_variables,
)
from .automaton import (
    Nfa,
    accepts,
    complement,
    parse_automaton,
    pumping_pattern_automaton,
    sigma_star_automaton,
    to_dot,
    tstar_A_tstar_automaton,
    word_automaton,
)
from .grammar import (
    Grammar,
    Kind,
    NormalizedGrammar,
    Production,
    Symbol,
    build_index,
    normalize,
    occurring_symbols,
    parse_grammar,
    render_grammar,
)
from .saturation import Derivation, SaturatedAutomaton, extract_derivation, prestar_accepts, saturate

__version__ = "0.1.0"

"""k-induction model checking for a small synchronous RTL subset, with lemma suggestion.

Modules: ``frontend`` (lexer/parser), ``ir`` (transition systems),
``sat`` (CNF, CDCL, bit-blasting), ``engine`` (BMC, k-induction, oracle),
``cex`` (traces, VCD, ASCII waveforms), ``suggest`` (templates, Houdini,
LLM flows) and ``cli``.
"""

__version__ = "0.1.0"

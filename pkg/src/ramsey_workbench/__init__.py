"""Bounded verification engine for partition arrows, amalgamation, and
coloring expansions over finite relational structures.

Every verdict is relative to a loaded finite catalog and the configured
budgets; the three-valued vocabulary HOLDS / FAILS / UNKNOWN-AT-BOUND is
shared by all checkers, and every definite verdict carries a certificate
that replays by direct evaluation.
"""

__version__ = "0.1.0"

HOLDS = "HOLDS"
FAILS = "FAILS"
UNKNOWN = "UNKNOWN-AT-BOUND"

"""Exact entropy classification for coordinate shifts of K^Gamma.

A self-map of a countable index set drags coordinates around; this package
decides whether the induced shift on K^Gamma has zero or infinite algebraic
entropy, computes the combinatorial invariants behind that dichotomy, and
replays the supporting independence and trajectory-growth arguments at desk
scale with exact arithmetic throughout.
"""

from shiftent import kalgebra, fgraph, shiftcore, factorialsets, presets, cli

__all__ = ["kalgebra", "fgraph", "shiftcore", "factorialsets", "presets", "cli"]

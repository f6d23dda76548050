"""Budget allocation for estimating many means uniformly well.

The package simulates the sequential problem of splitting a fixed budget of n
samples across K distributions so that every mean estimate ends up accurate.
It provides two variance-adaptive upper-confidence strategies (ch-as, b-as),
a forced-exploration baseline (gafs-max), uniform and known-variance oracle
references, a deterministic Monte-Carlo harness, and evaluators for the
corresponding allocation and regret guarantees.
"""

__version__ = "0.1.0"

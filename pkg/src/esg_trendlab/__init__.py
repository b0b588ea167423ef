"""Corpus analytics for ESG report texts.

Turns a manifest of per-company annual report texts into topic weights,
within-industry representativeness and cross-sector distinctiveness scores,
a two-axis strategic positioning model, and a regression report tying the
two axes together.
"""

__version__ = "0.1.0"

"""Curvature of Finsler (alpha, beta)-metrics, computed two ways.

Closed forms for the spray and curvature contractions of Matsumoto-type
metrics are checked against a direct jet-based evaluation of the defining
formulas, and the published polynomial identities behind them are checked
exactly.
"""

__version__ = "0.1.0"

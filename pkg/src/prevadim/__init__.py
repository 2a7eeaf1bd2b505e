"""Fat Cantor witnesses for prevalent graph dimension: construction, random
witness functions, energy and box-counting estimators, lemma checks, horizons."""

__version__ = "0.1.0"

"""Exact computations for group actions on products of hyperbolic spaces.

Modules: ``scalar``/``linalg``/``groups``/``ball`` (exact arithmetic, normal
forms, word metrics), ``spaces`` (metric models and actions), ``quasimorph``
(quasimorphisms), ``extensions`` (central extensions and Euler cocycles),
``verify`` (properness, coboundedness and crystallographic checks) and ``cli``.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import BudgetError, ContractError, HypactError, RankError, StructuralError  # noqa: E402

__all__ = ["__version__", "HypactError", "ContractError", "StructuralError", "RankError", "BudgetError"]

"""Dietary-constraint recipe rewriting toolkit.

Corpus ingest, constraint tagging, step alignment, prompt grammars,
rewrite strategies, and automatic evaluation, glued together by the
``recipe-rewriter`` command-line pipeline.
"""

from recipe_rewriter.corpus import Corpus, Recipe
from recipe_rewriter.kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["Corpus", "Recipe", "KERNEL_BACKEND", "__version__"]

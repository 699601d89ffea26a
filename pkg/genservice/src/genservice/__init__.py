"""HTTP adapter exposing text generation and perplexity over a small
causal language model, speaking the recipe pipeline's generator wire
protocol."""

__version__ = "0.1.0"

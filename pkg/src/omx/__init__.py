"""Extraction of computable witnesses from Pi2 proofs in a theory of one
inductive definition, by way of a typed calculus of well-founded trees."""

__version__ = "0.1.0"

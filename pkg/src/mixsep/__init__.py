"""Workbench for mixed-choice process calculi and their session encodings."""

__version__ = "0.1.0"

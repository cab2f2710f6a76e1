"""Satisfiability toolkit for prenex separation logic with one selector."""

__version__ = "0.1.0"

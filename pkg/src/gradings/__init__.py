"""Group gradings on matrix algebras and classical simple Lie algebras."""

__version__ = "0.1.0"

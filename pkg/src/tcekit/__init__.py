"""tcekit: exact tangram geometry engine and puzzle benchmark toolkit."""

__version__ = "0.1.0"

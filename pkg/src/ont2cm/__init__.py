"""ont2cm: derive conceptual data models from lightweight ontologies."""

__version__ = "0.1.0"

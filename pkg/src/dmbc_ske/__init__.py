"""Secret-key agreement over a pair of discrete memoryless broadcast channels."""

__version__ = "0.1.0"

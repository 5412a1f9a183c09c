"""Product-structure decoding of LDPC codes with simple vertical codes."""

__version__ = "0.1.0"

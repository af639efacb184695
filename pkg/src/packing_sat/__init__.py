"""SAT toolkit for packing colorings of the infinite square grid."""

__version__ = "0.1.0"

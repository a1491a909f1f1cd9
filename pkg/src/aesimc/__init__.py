"""Cycle-level, energy-annotated simulator of a memristive
in-memory-computing AES-128 datapath, with a bit-exact golden reference
and table-reproduction metrics."""

__version__ = "0.1.0"

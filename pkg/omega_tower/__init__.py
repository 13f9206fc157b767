"""Executable verifier towers: an object language, termination certificates,
diagonal programs and ordinal-indexed verifier progressions."""

__version__ = "0.1.0"

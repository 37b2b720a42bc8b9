"""Certified evaluation of infinite products weighted by Thue-Morse type sequences."""

__version__ = "0.1.0"

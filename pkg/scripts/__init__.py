"""kstab: exact K-stability invariants of log Fano pairs."""

__version__ = "0.1.0"

from .engine import CkksEngine

__all__ = ["CkksEngine"]

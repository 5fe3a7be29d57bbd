"""Toolkit Top-K Unário - redes de ordenação unárias, seletores top-k e neurônios SRM0-RNL."""

__version__ = "0.1.0"

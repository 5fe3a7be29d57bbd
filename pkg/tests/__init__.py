"""Testes do toolkit top-k unário."""


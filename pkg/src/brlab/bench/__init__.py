"""Declarative experiment runner."""

"""Builders for synthetic test data."""

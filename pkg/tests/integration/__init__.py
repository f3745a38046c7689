"""
Integration Tests Package

Tests that verify multiple components working together in real scenarios.
"""

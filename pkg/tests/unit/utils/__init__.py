"""
Tests for OTE Utility Modules

LOCATION: tests/unit/utils/
PURPOSE: Logging decorators and run metrics

Test Modules:
    - test_metrics: Run metrics tracking
    - test_decorators: OTE decorators and logger context rendering
"""

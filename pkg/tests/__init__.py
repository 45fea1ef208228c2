"""Tests for schottky.

schottky uses pytest.

Test fixtures and configuration are found in tests/conftest.py.
"""

"""
Unit Tests

Unit tests mirror the structure of src/.
Each module has corresponding unit tests.
"""

"""
Integration Tests

Integration tests demonstrate how modules work together.
Each module beyond the first has a subfolder with integration tests.
"""

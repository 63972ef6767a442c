"""Integration tests: Module 3 (Point Cloud Preprocessing)."""

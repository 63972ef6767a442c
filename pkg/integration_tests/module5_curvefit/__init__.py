"""Integration tests: Module 5 (Boundary Curve Fitting)."""

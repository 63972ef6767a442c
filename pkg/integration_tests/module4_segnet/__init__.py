"""Integration tests: Module 4 (Boundary Segmentation Network)."""

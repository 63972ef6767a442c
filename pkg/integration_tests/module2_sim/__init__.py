"""Integration tests: Module 2 (Synthetic Radar Scenes)."""

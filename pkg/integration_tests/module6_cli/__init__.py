"""Integration tests: Module 6 (Command Line, Evaluation and Reports)."""

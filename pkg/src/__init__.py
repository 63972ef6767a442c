"""
Radar Road Boundary Detection

Main package for the 4D mmWave radar road-boundary pipeline: preprocessing,
point-wise segmentation, and curve fitting, plus a synthetic scene generator.
"""

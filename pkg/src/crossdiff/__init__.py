"""Finite-element laboratory for a two-species cross-diffusion model of population splitting."""

__version__ = "0.1.0"

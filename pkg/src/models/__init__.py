"""Kernels, quadrature, switching functions and detector responses."""

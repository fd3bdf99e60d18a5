"""Orlicz spaces on the Gaussian space: Young functions, Luxemburg and dual
norms, Hermite calculus, the Ornstein-Uhlenbeck semigroup, Poincare-type
inequalities and their information-geometry applications."""

__version__ = "0.1.0"

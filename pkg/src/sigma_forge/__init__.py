"""Exact power-series expansion of the Weierstrass sigma function of the
general elliptic curve y^2 + (mu1 x + mu3) y = x^3 + mu2 x^2 + mu4 x + mu6."""

__version__ = "0.1.0"

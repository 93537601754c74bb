"""mclab: numerical laboratory for rank structure and convexity of fully
nonlinear elliptic and parabolic problems."""

__version__ = "0.1.0"

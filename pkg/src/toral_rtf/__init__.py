"""Relative trace formula for toral periods on PGL(2) over Q.

Local orbital integrals, the geometric and spectral sides of the trace
formula, and the limiting Satake measures.
"""

__version__ = "0.1.0"

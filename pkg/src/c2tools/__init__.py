"""c2 invariants of Feynman graphs: graph polynomials, point counts over
finite fields, vertex formulas and semilinear reduction."""

__version__ = "0.1.0"

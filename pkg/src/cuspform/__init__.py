"""Exact computer algebra for unfoldings of affine cusp polynomials.

Subpackage map:

- `ratpoly`    sparse exact-rational (Laurent) polynomials + text format
- `ideal`      Buchberger Groebner engine and zero-dimensional quotients
- `unfolding`  cusp polynomials, universal unfoldings, Kodaira-Spencer calculus
- `residue`    Bezoutian residue pairing and triple correlators
- `cases`      bundled verification datasets (potentials, coordinate changes,
               primitive-form data) and their file format
- `frobenius`  the Frobenius-structure verification battery
- `cli`        the `cuspform` command line tool
"""

__version__ = "0.1.0"

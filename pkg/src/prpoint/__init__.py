"""prpoint: rational point recovery from supersingular p-adic L-functions.

Computes, for an elliptic curve over Q at a good supersingular prime, the two
p-adic L-functions, the crystalline Frobenius eigen-data, and the Gross-Zagier
constant, then runs the point-recovery formula and verifies the result
against a supplied Mordell-Weil generator.
"""

__version__ = "0.1.0"

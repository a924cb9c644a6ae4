"""Quadratic twists of rigid Calabi-Yau threefolds and their weight-4 newforms.

Exact point counts over prime fields on the geometric side, eta-quotient
q-expansions and Kronecker characters on the modular side.
"""

__version__ = "0.1.0"

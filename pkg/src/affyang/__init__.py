"""Affine Yangians, their coproduct-free evaluation into completed current algebras,
and the W-algebra mode algebra side of the commutative diagram."""

__version__ = "0.1.0"

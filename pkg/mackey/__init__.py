"""
Cohomological Mackey functors on finite groups: construction, axiom
verification, chain-sum identities and the split norm functor
"""

__version__ = "0.1.0"

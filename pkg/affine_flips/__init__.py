"""**affine_flips**

Geometric triangulations, flips and cylinders of branched affine surfaces.
"""
__version__ = "0.1.0"

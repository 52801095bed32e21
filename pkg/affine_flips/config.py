"""Defines shared configuration variables for the affine_flips project"""
import os

AREA_EPSILON = 1e-12  # relative to the squared diameter of the triangle
ANGLE_TOLERANCE = 1e-9
CONVEXITY_EPSILON = 1e-10  # relative to the squared diameter of the quad
VERTEX_HIT_TOLERANCE = 1e-9
KEY_QUANTUM = 1e-9
RENORMALIZE_THRESHOLD = 1e12
LIMIT_CYCLE_REPEATS = 3
MAX_CYCLE_PERIOD = 16

DEFAULT_BUDGET = int(os.environ.get("AFFINE_FLIPS_BUDGET", "1000"))
DEFAULT_WORKERS = int(os.environ.get("AFFINE_FLIPS_WORKERS", "1"))
MAX_FLOOD_PIECES = int(os.environ.get("AFFINE_FLIPS_MAX_FLOOD", "4000"))
LOG_LEVEL = os.environ.get("AFFINE_FLIPS_LOG_LEVEL", "WARNING")

SVG_DECIMALS = 6
FILE_FORMAT_DIGITS = 17  # enough for an exact double round-trip

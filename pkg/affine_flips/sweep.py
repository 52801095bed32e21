"""Parameter sweeps over the example families, written as CSV tables.

A grid is written `name=v1,v2;name=v1` on the command line. Angles are in radians unless
prefixed by `deg:`, and tuple values separate their components with `|`, so
`thetas=deg:80|deg:80|deg:80` is one value of the `thetas` parameter.
"""
import csv
import io
import itertools
import logging
import math
from typing import Dict, Iterator, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from affine_flips.builders import FAMILIES, FamilyParams, build_family, parse_family
from affine_flips.config import DEFAULT_BUDGET
from affine_flips.cylinders import DEFAULT_MAX_PERIOD, detect_cylinders
from affine_flips.exceptions import BadParams, HasBoundary, SurfaceError
from affine_flips.flip_graph import alpha_lower_bound, check_alpha_cylinder_bound, min_angle
from affine_flips.surface import check_gauss_bonnet

logger = logging.getLogger(__name__)

Value = Union[int, float, Tuple[float, ...]]

COLUMNS = (
    "family",
    "params",
    "status",
    "min_angle",
    "alpha_hat",
    "alpha_exact",
    "max_beta",
    "r_angle",
    "r_log",
    "bound_ok",
)
INTEGER_PARAMETERS = ("sectors",)
DEGREES = "deg:"


def parse_angle(token: str) -> float:
    """Parses radians, or degrees when prefixed by `deg:`."""
    token = token.strip()
    try:
        if token.startswith(DEGREES):
            return math.radians(float(token[len(DEGREES) :]))
        return float(token)
    except ValueError:
        raise BadParams(f"{token!r} is not an angle.") from None


def parse_value(name: str, token: str) -> Value:
    if name in INTEGER_PARAMETERS:
        try:
            return int(token)
        except ValueError:
            raise BadParams(f"{name} takes whole numbers, got {token!r}.") from None
    if "|" in token:
        return tuple(parse_angle(part) for part in token.split("|"))
    return parse_angle(token)


class SweepGrid(BaseModel):
    """A family and, for each swept parameter, the values it takes, in order."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    family: str
    axes: Dict[str, List[Value]]

    @field_validator("family")
    @classmethod
    def _known_family(cls, value: str) -> str:
        if value not in FAMILIES:
            raise ValueError(f"unknown family {value!r}")
        return value

    @field_validator("axes")
    @classmethod
    def _known_axes(cls, value: Dict[str, List[Value]]) -> Dict[str, List[Value]]:
        for name, values in value.items():
            if name == "family" or name not in FamilyParams.model_fields:
                raise ValueError(f"unknown parameter {name!r}")
            if not values:
                raise ValueError(f"parameter {name!r} has no values")
        return value

    def points(self) -> Iterator[Dict[str, Value]]:
        names = list(self.axes)
        for values in itertools.product(*(self.axes[name] for name in names)):
            yield dict(zip(names, values))


def parse_grid(family: str, text: str) -> SweepGrid:
    """Reads `theta=deg:60;lam=1.1,2,10,100` into a validated grid."""
    axes: Dict[str, List[Value]] = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        name, sep, values = part.partition("=")
        name = name.strip()
        if not sep:
            raise BadParams(f"Grid entry {part!r} should read name=value,value.")
        axes[name] = [parse_value(name, token) for token in values.split(",") if token.strip()]
    try:
        return SweepGrid(family=family, axes=axes)
    except ValidationError as error:
        raise BadParams(f"grid: {error.errors()[0]['msg']}") from error


def _number(value: Optional[float]) -> str:
    return "" if value is None else format(value, ".12g")


def _describe(point: Dict[str, Value]) -> str:
    def text(value: Value) -> str:
        if isinstance(value, tuple):
            return "|".join(_number(component) for component in value)
        return _number(value) if isinstance(value, float) else str(value)

    return ";".join(f"{name}={text(value)}" for name, value in point.items())


def sweep_point(
    family: str, point: Dict[str, Value], budget: int, max_period: int
) -> Dict[str, str]:
    """Computes one CSV row. Invalid parameters give a row whose status names the error."""
    row = dict.fromkeys(COLUMNS, "")
    row["family"] = family
    row["params"] = _describe(point)
    try:
        surface = build_family(parse_family(family, dict(point)))
        cylinders = detect_cylinders(surface, max_period)
        bound = alpha_lower_bound(surface, budget)
    except SurfaceError as error:
        row["status"] = f"{type(error).__name__}: {error}"
        logger.info("sweep point %s rejected: %s", row["params"], error)
        return row

    betas = [cylinder.beta for cylinder in cylinders if cylinder.hyperbolic]
    row["status"] = "ok"
    row["min_angle"] = _number(min_angle(surface))
    row["alpha_hat"] = _number(bound.alpha_hat)
    row["alpha_exact"] = str(bound.alpha_exact).lower()
    row["max_beta"] = _number(max(betas) if betas else None)
    try:
        report = check_gauss_bonnet(surface)
        row["r_angle"] = _number(report.r_angle)
        row["r_log"] = _number(report.r_log)
    except HasBoundary:
        pass
    checked = check_alpha_cylinder_bound(surface, cylinders, bound.alpha_hat)
    row["bound_ok"] = str(checked.ok).lower()
    return row


def run_sweep(
    grid: SweepGrid, budget: int = DEFAULT_BUDGET, max_period: int = DEFAULT_MAX_PERIOD
) -> List[Dict[str, str]]:
    return [sweep_point(grid.family, point, budget, max_period) for point in grid.points()]


def sweep_csv(rows: List[Dict[str, str]]) -> str:
    """Returns the RFC 4180 text of the rows, in the order given."""
    output = io.StringIO()
    writer = csv.DictWriter(output, fieldnames=COLUMNS)
    writer.writeheader()
    writer.writerows(rows)
    return output.getvalue()

"""TSPLIB parsing and the integer EUC_2D tour-length objective."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

__all__ = [
    "TSPLIBParseError",
    "MalformedHeaderError",
    "UnsupportedEdgeWeightTypeError",
    "NodeIdError",
    "DimensionMismatchError",
    "TspInstance",
    "parse_instance",
    "load_instance",
    "read_instance",
    "known_optima",
    "distance",
    "tour_length",
    "MATRIX_LIMIT",
]

# instances up to this size get a dense distance matrix
MATRIX_LIMIT = 1000

_REQUIRED_KEYS = ("NAME", "DIMENSION", "EDGE_WEIGHT_TYPE")


class TSPLIBParseError(ValueError):
    """Base class for every TSPLIB parse failure."""


class MalformedHeaderError(TSPLIBParseError):
    pass


class UnsupportedEdgeWeightTypeError(TSPLIBParseError):
    pass


class NodeIdError(TSPLIBParseError):
    """Missing, duplicate or out-of-range node ids in NODE_COORD_SECTION."""


class DimensionMismatchError(TSPLIBParseError):
    pass


def _euc_2d(dx, dy):
    # TSPLIB nint(): floor(d + 0.5), not round-half-even
    return np.floor(np.sqrt(dx * dx + dy * dy) + 0.5).astype(np.int64)


@dataclass(frozen=True, eq=False)
class TspInstance:
    """A parsed symmetric EUC_2D instance.

    ``coords[i - 1]`` holds the location of city ``i``; city ids are
    1-based everywhere in this package.
    """

    name: str
    dimension: int
    coords: np.ndarray
    edge_weight_type: str = "EUC_2D"
    matrix: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        coords = np.asarray(self.coords, dtype=float)
        if self.dimension < 3:
            raise DimensionMismatchError(
                f"{self.name}: dimension must be >= 3, got {self.dimension}")
        if coords.shape != (self.dimension, 2):
            raise DimensionMismatchError(
                f"{self.name}: expected {self.dimension} coordinate pairs, "
                f"got array of shape {coords.shape}")
        if self.edge_weight_type != "EUC_2D":
            raise UnsupportedEdgeWeightTypeError(self.edge_weight_type)
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        if self.matrix is None and self.dimension <= MATRIX_LIMIT:
            # padded with a dummy row/column 0 so city ids index directly
            padded = np.vstack([[0.0, 0.0], coords])
            diff = padded[:, None, :] - padded[None, :, :]
            m = _euc_2d(diff[..., 0], diff[..., 1])
            m[0, :] = 0
            m[:, 0] = 0
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)

    def distance(self, i: int, j: int) -> int:
        return distance(self, i, j)

    def tour_length(self, tour) -> int:
        return tour_length(self, tour)


def _parse_int(value: str, what: str) -> int:
    try:
        return int(value)
    except ValueError:
        try:
            as_float = float(value)
        except ValueError:
            raise MalformedHeaderError(f"{what}: not a number: {value!r}") from None
        if not as_float.is_integer():
            raise MalformedHeaderError(f"{what}: not an integer: {value!r}")
        return int(as_float)


def parse_instance(text: str) -> TspInstance:
    """Parse the content of a TSPLIB ``.tsp`` file.

    Only ``EDGE_WEIGHT_TYPE: EUC_2D`` with a ``NODE_COORD_SECTION`` is
    accepted. Each kind of defect raises its own subclass of
    :class:`TSPLIBParseError`.
    """
    header: dict[str, str] = {}
    lines = text.splitlines()
    pos = 0
    while pos < len(lines):
        line = lines[pos].strip()
        pos += 1
        if not line:
            continue
        upper = line.upper()
        if upper.startswith("NODE_COORD_SECTION"):
            break
        if upper == "EOF":
            raise MalformedHeaderError("EOF before NODE_COORD_SECTION")
        if ":" in line:
            key, _, value = line.partition(":")
        else:
            key, _, value = line.partition(" ")
        key = key.strip().upper()
        if not key:
            raise MalformedHeaderError(f"bad header line {pos}: {line!r}")
        header[key] = value.strip()
    else:
        raise MalformedHeaderError("missing NODE_COORD_SECTION")

    missing = [k for k in _REQUIRED_KEYS if k not in header]
    if missing:
        raise MalformedHeaderError(f"missing header keys: {', '.join(missing)}")
    ewt = header["EDGE_WEIGHT_TYPE"].upper()
    if ewt != "EUC_2D":
        raise UnsupportedEdgeWeightTypeError(
            f"EDGE_WEIGHT_TYPE {ewt} is not supported (only EUC_2D)")
    dimension = _parse_int(header["DIMENSION"], "DIMENSION")
    if dimension < 3:
        raise DimensionMismatchError(f"DIMENSION must be >= 3, got {dimension}")

    coords: dict[int, tuple[float, float]] = {}
    for lineno in range(pos, len(lines)):
        line = lines[lineno].strip()
        if not line:
            continue
        if line.upper() == "EOF":
            break
        parts = line.split()
        if len(parts) != 3:
            raise MalformedHeaderError(
                f"line {lineno + 1}: expected 'id x y', got {line!r}")
        node = _parse_int(parts[0], f"line {lineno + 1} node id")
        if not 1 <= node <= dimension:
            raise NodeIdError(f"node id {node} outside 1..{dimension}")
        if node in coords:
            raise NodeIdError(f"duplicate node id {node}")
        try:
            coords[node] = (float(parts[1]), float(parts[2]))
        except ValueError:
            raise MalformedHeaderError(
                f"line {lineno + 1}: bad coordinate in {line!r}") from None

    if len(coords) != dimension:
        absent = sorted(set(range(1, dimension + 1)) - set(coords))
        raise NodeIdError(
            f"{len(absent)} node id(s) missing, first: {absent[:5]}")
    ordered = np.array([coords[i] for i in range(1, dimension + 1)], dtype=float)
    return TspInstance(name=header["NAME"], dimension=dimension, coords=ordered)


def read_instance(path: str | Path) -> TspInstance:
    path = Path(path)
    try:
        return parse_instance(path.read_text(encoding="utf-8"))
    except TSPLIBParseError as exc:
        raise type(exc)(f"{path}: {exc}") from None


@lru_cache(maxsize=None)
def load_instance(name: str) -> TspInstance:
    """Load one of the vendored instances (``pr76`` ... ``pr264``)."""
    res = resources.files("coeba").joinpath("data").joinpath(f"{name}.tsp")
    if not res.is_file():
        raise KeyError(f"no vendored TSPLIB instance named {name!r}")
    return parse_instance(res.read_text(encoding="utf-8"))


@lru_cache(maxsize=None)
def known_optima() -> dict[str, int]:
    """Map of instance name to best known tour length, from the manifest."""
    text = resources.files("coeba").joinpath("data").joinpath("optima.csv").read_text()
    return {row["name"]: int(row["optimum"])
            for row in csv.DictReader(text.splitlines())}


def _check_city(instance: TspInstance, city) -> int:
    city = int(city)
    if not 1 <= city <= instance.dimension:
        raise IndexError(f"city id {city} outside 1..{instance.dimension}")
    return city


def distance(instance: TspInstance, i: int, j: int) -> int:
    """Nearest-integer Euclidean distance between cities ``i`` and ``j``."""
    i = _check_city(instance, i)
    j = _check_city(instance, j)
    if instance.matrix is not None:
        return int(instance.matrix[i, j])
    (x1, y1), (x2, y2) = instance.coords[i - 1], instance.coords[j - 1]
    return int(math.floor(math.hypot(x1 - x2, y1 - y2) + 0.5))


def tour_length(instance: TspInstance, tour, counter=None) -> int:
    """Closed tour length of ``tour`` (1-based city ids).

    ``counter``, when given, is charged one evaluation (see
    :class:`coeba.harness.EvaluationBudget`).
    """
    t = np.asarray(tour)
    if t.ndim != 1 or t.shape[0] != instance.dimension:
        raise DimensionMismatchError(
            f"tour of length {t.size} for instance of dimension {instance.dimension}")
    if counter is not None:
        counter.consume(1)
    if instance.matrix is not None:
        m = instance.matrix
        return int(m[t[:-1], t[1:]].sum() + m[t[-1], t[0]])
    xy = instance.coords[t - 1]
    diff = xy - np.roll(xy, -1, axis=0)
    return int(_euc_2d(diff[:, 0], diff[:, 1]).sum())

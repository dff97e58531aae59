"""Weight functions, modes, path constraints and solver results."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from ..errors import CarrierMismatch, MalformedComplex


class Mode(str, Enum):
    """Where weights live and how paths move.

    Vertex mode puts weights on vertices and restricts paths to edge paths
    of the 1-skeleton.  The tile modes put weights on faces: skinny chains
    step across shared edges, fat chains may also step across shared
    vertices (so fat chains can pinch through a high-valence vertex).
    """

    VERTEX = "vertex"
    FAT = "fat"
    SKINNY = "skinny"

    @property
    def carrier(self) -> str:
        return "vertices" if self is Mode.VERTEX else "tiles"

    @classmethod
    def _missing_(cls, value: object) -> "Mode | None":
        aliases = {"tile-fat": cls.FAT, "tile-skinny": cls.SKINNY}
        if isinstance(value, str):
            return aliases.get(value)
        return None


@dataclass(frozen=True)
class WeightFunction:
    """Nonnegative weights on tiles or vertices."""

    carrier: str
    weights: dict[int, float]

    def __post_init__(self) -> None:
        if self.carrier not in ("tiles", "vertices"):
            raise CarrierMismatch(f"unknown carrier {self.carrier!r}")
        for k, w in self.weights.items():
            if w < 0:
                raise MalformedComplex(f"negative weight {w} on carrier {k}")

    def get(self, key: int) -> float:
        return self.weights.get(key, 0.0)

    def area(self) -> float:
        return sum(w * w for w in self.weights.values())

    def scaled(self, factor: float) -> "WeightFunction":
        if factor < 0:
            raise MalformedComplex("scale factor must be nonnegative")
        return WeightFunction(
            self.carrier, {k: w * factor for k, w in self.weights.items()}
        )

    @classmethod
    def uniform(
        cls, carrier: str, ids: Iterable[int], value: float = 1.0
    ) -> "WeightFunction":
        return cls(carrier, {int(k): float(value) for k in ids})


def area(w: WeightFunction) -> float:
    """Sum of squared weights."""
    return w.area()


@dataclass(frozen=True)
class PathConstraint:
    """A set of carriers whose weights must sum to at least one."""

    carriers: frozenset[int]
    kind: str  # "connecting" | "essential-loop"


@dataclass(frozen=True)
class ModulusResult:
    """Outcome of a modulus computation.

    ``value`` is the modulus; ``optimal_weights`` the optimizing weight
    function normalized so the binding paths have length 1; ``certificate``
    the constraints active at the optimum; ``residual`` is 1 minus the
    shortest path/loop length under the returned weights.
    """

    value: float
    optimal_weights: WeightFunction
    certificate: tuple[PathConstraint, ...]
    iterations: int
    residual: float
    mode: Mode
    objective_history: tuple[float, ...] = field(default=())

    def to_document(self) -> dict:
        return {
            "value": self.value,
            "mode": self.mode.value,
            "carrier": self.optimal_weights.carrier,
            "weights": {
                str(k): v
                for k, v in sorted(self.optimal_weights.weights.items())
            },
            "certificate": [
                sorted(pc.carriers) for pc in self.certificate
            ],
            "iterations": self.iterations,
            "residual": self.residual,
        }


def result_from_document(doc: Mapping) -> ModulusResult:
    weights = WeightFunction(
        doc["carrier"], {int(k): float(v) for k, v in doc["weights"].items()}
    )
    certificate = tuple(
        PathConstraint(frozenset(ids), "unknown") for ids in doc["certificate"]
    )
    return ModulusResult(
        value=float(doc["value"]),
        optimal_weights=weights,
        certificate=certificate,
        iterations=int(doc["iterations"]),
        residual=float(doc["residual"]),
        mode=Mode(doc["mode"]),
    )

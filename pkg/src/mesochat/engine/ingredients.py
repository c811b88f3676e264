"""Ingredients: the reusable structural elements placed as instances.

Each ingredient is approximated by its bounding sphere for placement and
collision purposes; optional chain/residue coordinates give proteins an
addressable substructure for pivot and position edits.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import IndexOutOfRange, NoResidueData


@dataclass
class Ingredient:
    name: str
    bounding_radius: float
    color: tuple[float, float, float] = (0.7, 0.7, 0.7)
    pivot: np.ndarray = field(default_factory=lambda: np.zeros(3))
    chains: Optional[list[np.ndarray]] = None  # per chain: (n_residues, 3) local coords
    source: str = ""

    def __post_init__(self):
        self.bounding_radius = float(self.bounding_radius)
        self.pivot = np.asarray(self.pivot, dtype=float)
        if self.chains is not None:
            self.chains = [np.asarray(c, dtype=float).reshape(-1, 3) for c in self.chains]
        if not self.source:
            self.source = self.name

    def residue_position(self, chain_id: int, residue_id: int) -> np.ndarray:
        if not self.chains:
            raise NoResidueData(f"ingredient {self.name!r} has no chain/residue data")
        if not 0 <= chain_id < len(self.chains):
            raise IndexOutOfRange(
                f"chain {chain_id} out of range for {self.name!r} ({len(self.chains)} chains)")
        chain = self.chains[chain_id]
        if not 0 <= residue_id < len(chain):
            raise IndexOutOfRange(
                f"residue {residue_id} out of range for {self.name!r} chain {chain_id} "
                f"({len(chain)} residues)")
        return chain[residue_id].copy()

    def to_dict(self) -> dict:
        out = {"name": self.name, "bounding_radius": self.bounding_radius,
               "color": list(self.color)}
        if self.chains is not None:
            out["chains"] = [c.tolist() for c in self.chains]
        if np.any(self.pivot != 0.0):
            out["pivot"] = self.pivot.tolist()
        return out

    @staticmethod
    def from_dict(data: dict) -> "Ingredient":
        return Ingredient(
            name=data["name"],
            bounding_radius=float(data["bounding_radius"]),
            color=tuple(data.get("color", (0.7, 0.7, 0.7))),
            pivot=np.array(data.get("pivot", (0.0, 0.0, 0.0)), dtype=float),
            chains=data.get("chains"),
            source=data.get("source", data["name"]),
        )


def update_pivot(ingredient: Ingredient, chain_id: int, residue_id: int) -> Ingredient:
    """New ingredient whose pivot sits at the given residue's local position."""
    pos = ingredient.residue_position(chain_id, residue_id)
    return replace(ingredient, pivot=pos)


# Reserved ingredient used by connection rules for curve "beads".
BALL_INGREDIENT = Ingredient(name="ball", bounding_radius=0.4, color=(0.85, 0.85, 0.85))

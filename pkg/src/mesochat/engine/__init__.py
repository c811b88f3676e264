"""Rule engine: the six rule classes over a scene of placed instances."""

from .apply import apply_rule, create_rule, edit_rule, revert_rule, update_position
from .errors import (
    ArityViolation,
    IndexOutOfRange,
    InfeasiblePopulation,
    InvalidParameter,
    MissingCatalogEntry,
    NoResidueData,
    NoSuchInstance,
    NothingToRevert,
    SpaceOnSurfaceSkeleton,
    UnknownRule,
    VersionMismatch,
)
from .ingredients import BALL_INGREDIENT, Ingredient, update_pivot
from .rules import Rule, RuleParams, RuleType, parse_rule_type_name, space_to_count
from .scene import Instance, Scene, ViewState, export_obj, load_scene, save_scene

__all__ = [
    "ArityViolation",
    "BALL_INGREDIENT",
    "IndexOutOfRange",
    "InfeasiblePopulation",
    "Ingredient",
    "Instance",
    "InvalidParameter",
    "MissingCatalogEntry",
    "NoResidueData",
    "NoSuchInstance",
    "NothingToRevert",
    "Rule",
    "RuleParams",
    "RuleType",
    "Scene",
    "SpaceOnSurfaceSkeleton",
    "UnknownRule",
    "VersionMismatch",
    "ViewState",
    "apply_rule",
    "create_rule",
    "edit_rule",
    "export_obj",
    "load_scene",
    "parse_rule_type_name",
    "revert_rule",
    "save_scene",
    "space_to_count",
    "update_pivot",
    "update_position",
]

"""Instruction catalog: canonical command templates per task family.

One place owns the surface forms, so the scene generator, the starter
bank seeds, and evaluation sets stay mutually consistent. The FAST/SLOW
split follows the task semantics: single-step commands route FAST,
anything needing a sub-goal plan routes SLOW.
"""

from __future__ import annotations

from .model import SystemLabel

# The nine-family instruction set used for bank seeding and held-out
# evaluation: three fast families and six slow ones.
CORE_NINE = (
    "pick_color",
    "pick_place_box",
    "pick_toy_box",
    "math_reasoning",
    "word_correction",
    "color_sort",
    "intent_recognition",
    "rearrange",
    "stack_order",
)

FAMILY_LABELS: dict[str, SystemLabel] = {
    "pick_color": SystemLabel.FAST,
    "pick_place_box": SystemLabel.FAST,
    "pick_toy_box": SystemLabel.FAST,
    "rotate": SystemLabel.FAST,
    "simple_manipulation": SystemLabel.FAST,
    "math_reasoning": SystemLabel.SLOW,
    "word_correction": SystemLabel.SLOW,
    "color_sort": SystemLabel.SLOW,
    "intent_recognition": SystemLabel.SLOW,
    "rearrange": SystemLabel.SLOW,
    "visual_reasoning_square": SystemLabel.SLOW,
    "stack_order": SystemLabel.SLOW,
    "stack_texture": SystemLabel.SLOW,
}


def pick_color_text(color: str) -> str:
    return f"pick up the {color} cube"


def pick_place_box_text(color: str, side: str) -> str:
    return f"pick the {color} cube and place it in the {side} box"


def pick_toy_box_text() -> str:
    return "put the toy into the box"


def rotate_text(kind_word: str, degrees: int) -> str:
    return f"rotate the {kind_word} by {degrees} degrees clockwise"


def simple_manipulation_text(obj_color: str, container_color: str) -> str:
    return f"put the {obj_color} toy into the {container_color} bowl"


def math_text() -> str:
    return "solve the equation on the table"


def word_text(target: str) -> str:
    return f"fix the word to spell {target}"


def color_sort_text() -> str:
    return "sort the cubes by color into the matching zones"


def intent_text() -> str:
    return "I'm allergic to spicy food"


def rearrange_text(moves: list[tuple[str, tuple[int, int]]]) -> str:
    """`moves` pairs an object phrase with its destination cell."""
    clauses = [f"move the {phrase} to ({x}, {y})" for phrase, (x, y) in moves]
    return "rearrange the scene: " + "; ".join(clauses)


def square_text(side: int) -> str:
    return f"place the four cubes at the corners of a square of side {side}"


def stack_order_text(phrases: list[str]) -> str:
    return "stack in order from bottom to top: " + ", ".join(f"the {p}" for p in phrases)


def stack_texture_text() -> str:
    return "stack together the objects that share the same texture"


#: Two hand-written seed instructions per family; the starter bank grows
#: from these through the template paraphraser.
SEED_INSTRUCTIONS: dict[str, tuple[str, str]] = {
    "pick_color": (
        "pick up the red cube",
        "pick up the blue cube",
    ),
    "pick_place_box": (
        "pick the red cube and place it in the left box",
        "pick the yellow cube and place it in the right box",
    ),
    "pick_toy_box": (
        "put the toy into the box",
        "put the toy in the box",
    ),
    "rotate": (
        "rotate the bowl by 30 degrees clockwise",
        "rotate the cube by 90 degrees clockwise",
    ),
    "simple_manipulation": (
        "put the red toy into the green bowl",
        "put the yellow toy into the blue bowl",
    ),
    "math_reasoning": (
        "solve the equation on the table",
        "complete the equation with the digit tiles",
    ),
    "word_correction": (
        "fix the word to spell ICRA",
        "fix the word to spell ROBOT",
    ),
    "color_sort": (
        "sort the cubes by color into the matching zones",
        "group the cubes with other cubes of the same color",
    ),
    "intent_recognition": (
        "I'm allergic to spicy food",
        "I can't eat anything spicy",
    ),
    "rearrange": (
        "rearrange the scene: move the red cube to (2, 3); move the blue toy to (5, 5)",
        "rearrange the scene: move the green bowl to (1, 4)",
    ),
    "visual_reasoning_square": (
        "place the four cubes at the corners of a square of side 3",
        "place the four cubes at the corners of a square of side 2",
    ),
    "stack_order": (
        "stack in order from bottom to top: the red cube, the green cube, the blue cube",
        "stack in order from bottom to top: the yellow cube, the red cube",
    ),
    "stack_texture": (
        "stack together the objects that share the same texture",
        "stack the objects with matching texture on top of each other",
    ),
}

"""
Component Formatting
Prints tensor and connection components with 1-based index labels
"""

import itertools
from typing import List, Sequence

import numpy as np

from geometry.tensors import Slot
from utils.expr_parser import evaluate, parse

# Components at or below this magnitude print as zero
ZERO_THRESHOLD = 1e-12


def format_value(value: float) -> str:
    """Shortest readable form, with rounding noise removed"""
    if abs(value) <= ZERO_THRESHOLD:
        return "0"
    return f"{value + 0.0:.12g}"


def component_label(symbol: str, variance: Sequence[Slot], index: Sequence[int]) -> str:
    """Label such as T^2_12 or g_11, indices 1-based"""
    upper = "".join(str(i + 1) for slot, i in zip(variance, index) if slot is Slot.UP)
    lower = "".join(str(i + 1) for slot, i in zip(variance, index) if slot is not Slot.UP)
    label = symbol
    if upper:
        label += f"^{upper}"
    if lower:
        label += f"_{lower}"
    return label


def format_components(symbol: str, variance: Sequence[Slot], components) -> str:
    """Text listing of a scalar, vector, covector or higher-rank array"""
    array = np.asarray(components, dtype=float)
    if np.all(np.abs(array) <= ZERO_THRESHOLD):
        return "all components 0"
    if array.ndim == 0:
        return f"{symbol} = {format_value(float(array))}"
    if array.ndim == 1:
        return ", ".join(f"{component_label(symbol, variance, (i,))} = {format_value(v)}"
                         for i, v in enumerate(array))
    lines: List[str] = []
    for index in itertools.product(range(array.shape[0]), repeat=array.ndim):
        value = array[index]
        if abs(value) > ZERO_THRESHOLD:
            lines.append(f"{component_label(symbol, variance, index)} = {format_value(value)}")
    return "\n".join(lines)


def parse_point(text: str, n: int) -> np.ndarray:
    """Comma-separated coordinates; pi and e are accepted as values"""
    parts = [part.strip() for part in text.split(",")]
    if len(parts) != n or any(not part for part in parts):
        raise ValueError(f"point must have {n} comma-separated coordinates, got '{text}'")
    values = []
    for part in parts:
        expr = parse(part, n)
        if expr.max_index() >= 0:
            raise ValueError(f"point coordinates must be constants, got '{part}'")
        values.append(evaluate(expr, np.zeros(n)))
    return np.array(values)

"""Scenario files: a small ``[section]`` / ``key = value`` format.

Example (the classical SEIR run)::

    [model]
    name = seir-classical

    [params]
    beta = 0.95
    epsilon = 0.5
    gamma = 0.09
    n = 1000

    [initial]
    S = 960
    E = 10
    I = 30
    R = 0

    [step]
    dt = 0.1
    t_end = 100

Blank lines and lines starting with ``#`` or ``;`` are ignored. Sections
``model`` and ``params`` are required; ``initial`` and ``step`` are required
only by commands that integrate. An optional ``[outputs]`` section may list
``artifacts = a, b, ...``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .errors import InvalidArgumentError
from .integrate import StepConfig
from .model import (
    BACKWARD_LABELS,
    SEIR_LABELS,
    BackwardModelParams,
    ClassicalSeirParams,
    DynamicalSystem,
    ModifiedSeirParams,
    backward_model_system,
    classical_seir_system,
    modified_seir_system,
)

MODELS = {
    "seir-modified": (ModifiedSeirParams, ("tau", "mu", "beta", "epsilon", "gamma"), SEIR_LABELS),
    "seir-classical": (ClassicalSeirParams, ("beta", "epsilon", "gamma", "n"), SEIR_LABELS),
    "backward4": (
        BackwardModelParams,
        ("beta1", "beta2", "epsilon", "phi", "sigma", "gamma", "delta", "alpha"),
        BACKWARD_LABELS,
    ),
}
SECTIONS = ("model", "params", "initial", "step", "outputs")
STEP_KEYS = ("dt", "t_start", "t_end")


class ScenarioError(InvalidArgumentError):
    """A problem in a scenario document, located by line and column (1-based)."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line, self.column = line, column
        where = "" if line is None else f"line {line}" + ("" if column is None else f", column {column}") + ": "
        super().__init__(where + message)


class MissingSectionError(ScenarioError):
    pass


class MissingKeyError(ScenarioError):
    pass


class UnknownKeyError(ScenarioError):
    pass


class UnknownModelError(ScenarioError):
    pass


class NonNumericValueError(ScenarioError):
    pass


class NonPositiveParameterError(ScenarioError):
    pass


class SyntaxError_(ScenarioError):
    pass


@dataclass
class Scenario:
    model: str
    parameters: Dict[str, float]
    initial_state: Optional[np.ndarray] = None
    step: Optional[StepConfig] = None
    outputs: Tuple[str, ...] = ()
    source_lines: Dict[str, int] = field(default_factory=dict, repr=False)

    @property
    def params(self):
        cls = MODELS[self.model][0]
        return cls(**self.parameters)

    @property
    def labels(self):
        return MODELS[self.model][2]

    def system(self) -> DynamicalSystem:
        builder = {
            "seir-modified": modified_seir_system,
            "seir-classical": classical_seir_system,
            "backward4": backward_model_system,
        }[self.model]
        return builder(self.params)

    def require_simulation_inputs(self) -> None:
        for name, value in (("initial", self.initial_state), ("step", self.step)):
            if value is None:
                raise MissingSectionError(f"section [{name}] is required to run a simulation")


_SECTION_RE = re.compile(r"^\[\s*([A-Za-z0-9_-]+)\s*\]\s*$")


def _number(text: str, line: int, column: int, key: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise NonNumericValueError(f"value of {key!r} is not a number: {text!r}", line, column) from None
    if not math.isfinite(value):
        raise NonNumericValueError(f"value of {key!r} must be finite: {text!r}", line, column)
    return value


def parse_scenario(text: str) -> Scenario:
    sections: Dict[str, Dict[str, Tuple[str, int, int]]] = {}
    section_lines: Dict[str, int] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped[0] in "#;":
            continue
        indent = len(raw) - len(raw.lstrip())
        m = _SECTION_RE.match(stripped)
        if m:
            current = m.group(1).lower()
            if current not in SECTIONS:
                raise UnknownKeyError(f"unknown section [{current}]", lineno, indent + 1)
            if current in sections:
                raise SyntaxError_(f"duplicate section [{current}]", lineno, indent + 1)
            sections[current] = {}
            section_lines[current] = lineno
            continue
        if "=" not in stripped:
            raise SyntaxError_(f"expected 'key = value', got {stripped!r}", lineno, indent + 1)
        if current is None:
            raise SyntaxError_("key outside of any section", lineno, indent + 1)
        key, _, value = raw.partition("=")
        key = key.strip()
        value_col = len(raw) - len(raw.partition("=")[2].lstrip()) + 1
        if not key:
            raise SyntaxError_("empty key", lineno, indent + 1)
        if key in sections[current]:
            raise SyntaxError_(f"duplicate key {key!r} in [{current}]", lineno, indent + 1)
        sections[current][key] = (value.strip(), lineno, value_col if value.strip() else indent + 1)

    for required in ("model", "params"):
        if required not in sections:
            raise MissingSectionError(f"missing required section [{required}]")

    model_sec = sections["model"]
    for key, (_, line, col) in model_sec.items():
        if key != "name":
            raise UnknownKeyError(f"unknown key {key!r} in [model]", line, 1)
    if "name" not in model_sec:
        raise MissingKeyError("missing key 'name' in [model]", section_lines["model"])
    model, line, col = model_sec["name"]
    if model not in MODELS:
        raise UnknownModelError(f"unknown model {model!r}; expected one of {', '.join(MODELS)}", line, col)
    _, param_names, labels = MODELS[model]

    params: Dict[str, float] = {}
    for key, (value, line, col) in sections["params"].items():
        if key not in param_names:
            raise UnknownKeyError(f"unknown parameter {key!r} for model {model}", line, 1)
        number = _number(value, line, col, key)
        if number <= 0:
            raise NonPositiveParameterError(f"parameter must be positive: {key} = {value}", line, col)
        params[key] = number
    for key in param_names:
        if key not in params:
            raise MissingKeyError(f"missing parameter {key!r} in [params]", section_lines["params"])

    initial = None
    if "initial" in sections:
        values = {}
        for key, (value, line, col) in sections["initial"].items():
            if key not in labels:
                raise UnknownKeyError(f"unknown compartment {key!r}; expected {', '.join(labels)}", line, 1)
            number = _number(value, line, col, key)
            if number < 0:
                raise NonPositiveParameterError(f"initial value must be nonnegative: {key} = {value}", line, col)
            values[key] = number
        for key in labels:
            if key not in values:
                raise MissingKeyError(f"missing compartment {key!r} in [initial]", section_lines["initial"])
        initial = np.array([values[k] for k in labels])

    step = None
    if "step" in sections:
        values = {}
        for key, (value, line, col) in sections["step"].items():
            if key not in STEP_KEYS:
                raise UnknownKeyError(f"unknown key {key!r} in [step]", line, 1)
            values[key] = _number(value, line, col, key)
        if "t_end" not in values:
            raise MissingKeyError("missing key 't_end' in [step]", section_lines["step"])
        try:
            step = StepConfig(**values)
        except InvalidArgumentError as exc:
            raise ScenarioError(str(exc), section_lines["step"]) from None

    outputs: Tuple[str, ...] = ()
    if "outputs" in sections:
        for key, (value, line, col) in sections["outputs"].items():
            if key != "artifacts":
                raise UnknownKeyError(f"unknown key {key!r} in [outputs]", line, 1)
            outputs = tuple(v.strip() for v in value.split(",") if v.strip())

    return Scenario(model, params, initial, step, outputs, section_lines)


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())

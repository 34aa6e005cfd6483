from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple, Union

from ..errors import UsageError
from .dsl import parse_expression, parse_system
from .system import Invariant, QuadSystem

__all__ = (
    "BUILTINS",
    "builtin_source",
    "builtin_system",
    "known_invariants",
)

Scalar = Union[int, Fraction]

# name -> (model template, default parameters, first integrals)
BUILTINS: Dict[str, Tuple[str, Dict[str, Scalar], Tuple[Tuple[str, str], ...]]] = {
    "riccati": (
        "var x\nparam a = {a}\nparam b = {b}\nparam c = {c}\nx' = a + b*x + c*x^2\n",
        {"a": 0, "b": 0, "c": 1},
        (),
    ),
    "wp": (
        "var x, y\nparam a = {a}\nx' = y\ny' = 6*x^2 - a\n",
        {"a": Fraction(1, 2)},
        (("energy", "y^2/2 - 2*x^3 + a*x"),),
    ),
    "jacobi": (
        "var p, q, r\nparam k = {k}\np' = q*r\nq' = -p*r\nr' = -k^2*p*q\n",
        {"k": Fraction(1, 5)},
        (("pq", "p^2 + q^2"), ("pr", "k^2*p^2 + r^2")),
    ),
    "linear": (
        "var x, y\nparam w = {w}\nx' = y\ny' = -w^2*x\n",
        {"w": 1},
        (("energy", "y^2 + w^2*x^2"),),
    ),
}


def _resolve_params(name: str, params: Optional[Mapping[str, Scalar]]) -> Dict[str, Fraction]:
    if name not in BUILTINS:
        raise UsageError(f"unknown builtin system {name!r} (choose from {', '.join(BUILTINS)})")

    defaults = BUILTINS[name][1]
    params = dict(params or {})

    unknown = sorted(set(params) - set(defaults))
    if unknown:
        raise UsageError(f"{name} has no parameter {', '.join(unknown)} (expected {', '.join(defaults)})")

    resolved = {key: Fraction(value) for key, value in defaults.items()}
    resolved.update((key, Fraction(value)) for key, value in params.items())
    return resolved


def builtin_source(name: str, params: Optional[Mapping[str, Scalar]] = None) -> str:
    """
    The model source of a builtin system with its parameters filled in.

    Raises:
        [cremona.errors.UsageError][] on an unknown system or parameter.

    """
    resolved = _resolve_params(name, params)
    return BUILTINS[name][0].format(**resolved)


def builtin_system(name: str, params: Optional[Mapping[str, Scalar]] = None, **kwargs: Scalar) -> QuadSystem:
    """
    One of the benchmark systems.

    Parameters:
        name (str): `riccati` (a, b, c), `wp` (a), `jacobi` (k) or `linear` (w).
        params (Optional[Mapping[str, Rational]]): Parameter values; missing ones take the defaults.
        **kwargs (Rational): Parameter values given as keywords.

    Returns:
        The system, equal to `parse_system(builtin_source(name, params))`.

    Raises:
        [cremona.errors.UsageError][] on an unknown system or parameter.

    Example:
        ```py
        wp = builtin_system("wp", a=Fraction(1, 2))
        jacobi = builtin_system("jacobi", {"k": Fraction(1, 5)})
        ```

    """
    merged = dict(params or {})
    merged.update(kwargs)

    return parse_system(builtin_source(name, merged), name=name)


def known_invariants(system: QuadSystem) -> List[Invariant]:
    """
    The first integrals of a builtin system; empty for any other system.
    """
    if system.name not in BUILTINS:
        return []

    params = system.param_dict
    try:
        if system != builtin_system(system.name, params):
            return []
    except UsageError:
        return []

    return [Invariant(label, parse_expression(system, source), system) for label, source in BUILTINS[system.name][2]]

"""Named parameter sets and the default verification grid."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List

from .sequence import SequenceSpec, make_spec


@dataclass(frozen=True)
class Preset:
    name: str
    spec: SequenceSpec
    description: str
    # False for parameterizations that follow common usage rather than a fixed definition
    anchored: bool = True


def generalized_tribonacci(r: int, s: int, t: int) -> SequenceSpec:
    """The spec ``(r, s, t; 0, 1, r)``, for which H and h coincide."""
    return make_spec(r, s, t, 0, 1, r)


PRESETS: Dict[str, Preset] = {p.name: p for p in (
    Preset("tribonacci", make_spec(1, 1, 1, 0, 1, 1), "T(n+3) = T(n+2) + T(n+1) + T(n); 0, 1, 1, 2, 4, 7, ..."),
    Preset("padovan", make_spec(0, 1, 1, 0, 1, 0), "P(n+3) = P(n+1) + P(n); 0, 1, 0, 1, 1, 1, 2, ..."),
    Preset("narayana", make_spec(1, 0, 1, 0, 1, 1),
           "N(n+3) = N(n+2) + N(n); common-usage convention", anchored=False),
    Preset("jacobsthal3", make_spec(1, 1, 2, 0, 1, 1),
           "J(n+3) = J(n+2) + J(n+1) + 2 J(n); common-usage convention", anchored=False),
)}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}") from None


def random_specs(count: int, seed: int, bound: int = 5) -> List[SequenceSpec]:
    """``count`` integer specs with every parameter in ``[-bound, bound]`` and ``t != 0``."""
    rng = random.Random(f"grid:{seed}")
    specs = []
    while len(specs) < count:
        r, s, t, a, b, c = (rng.randint(-bound, bound) for _ in range(6))
        if t != 0:
            specs.append(make_spec(r, s, t, a, b, c))
    return specs


def default_grid(seed: int = 0, n_random: int = 6) -> List[SequenceSpec]:
    """Every preset plus a seeded handful of random specs with ``|params| <= 5``."""
    grid = [p.spec for p in PRESETS.values()]
    grid += [make_spec(1, 1, 1, 1, 1, 2), make_spec(2, 1, 3, 1, 2, 5)]
    grid += random_specs(n_random, seed)
    return list(dict.fromkeys(grid))

"""Hypothesis draw strategies for valid parameters, coins, and profiles."""

import math

from hypothesis import strategies as st

from ssqw.model import (
    CoinEntry,
    CoinProfile,
    LimitCoin,
    WalkParameters,
    validate_parameters,
)

E1_DOCUMENT = {
    "p": 0.5,
    "theta": 0.0,
    "left": {"a": 0.8, "b": [0.6, 0.0]},
    "right": {"a": 0.0, "b": [1.0, 0.0]},
}

_angles = st.floats(-math.pi, math.pi, allow_nan=False, allow_infinity=False)


@st.composite
def walk_parameters(draw, p_bound: float = 0.95) -> WalkParameters:
    p = draw(st.floats(-p_bound, p_bound, allow_nan=False, allow_infinity=False))
    theta = draw(_angles)
    q = math.sqrt(1.0 - p * p) * complex(math.cos(theta), math.sin(theta))
    return validate_parameters(p, q)


@st.composite
def limit_coins(draw, allow_diagonal: bool = True, a_bound: float = 0.95) -> LimitCoin:
    if allow_diagonal and draw(st.booleans()):
        a = draw(st.sampled_from([-1.0, 1.0]))
        return LimitCoin(a, -a, 0j)
    a = draw(st.floats(-a_bound, a_bound, allow_nan=False, allow_infinity=False))
    phi = draw(_angles)
    b = math.sqrt(1.0 - a * a) * complex(math.cos(phi), math.sin(phi))
    return LimitCoin.symmetric(a, b)


@st.composite
def coin_entries(draw) -> CoinEntry:
    if draw(st.booleans()):
        return CoinEntry(
            draw(st.sampled_from([-1.0, 1.0])),
            draw(st.sampled_from([-1.0, 1.0])),
            0j,
        )
    a = draw(st.floats(-0.999, 0.999, allow_nan=False, allow_infinity=False))
    phi = draw(_angles)
    return CoinEntry(a, -a, math.sqrt(1.0 - a * a) * complex(math.cos(phi), math.sin(phi)))


@st.composite
def step_profiles(draw, allow_diagonal: bool = True) -> CoinProfile:
    return CoinProfile(
        draw(limit_coins(allow_diagonal=allow_diagonal)),
        draw(limit_coins(allow_diagonal=allow_diagonal)),
    )


@st.composite
def profiles_with_overrides(draw) -> CoinProfile:
    base = draw(step_profiles())
    sites = draw(st.lists(st.integers(-10, 10), unique=True, max_size=4))
    overrides = {x: draw(coin_entries()) for x in sites}
    return CoinProfile(base.left, base.right, overrides)

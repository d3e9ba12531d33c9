"""
Structural data of the two three-user layered-superposition schemes and the
SINR-exponent table generated from it.

Each scheme sends five layers. ``POWER`` is the power exponent of each
layer, ``ANTENNAS`` the 1-based antennas that carry it and ``ATTENUATION``
the extra exponent subtracted on one antenna. Receivers decode in
``DECODING_ORDER``; everything not yet decoded is treated as noise.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Mapping, Tuple

from gdofkit.utils.rationals import RationalLike, format_fraction, to_fraction

logger = logging.getLogger(__name__)

PARAM_SYMBOLS = ("lam", "lam_p", "gamma", "gamma_p")
ALPHA_SYMBOLS = tuple(f"a{k}{m}" for k in (1, 2, 3) for m in (1, 2, 3))
SYMBOLS = ALPHA_SYMBOLS + PARAM_SYMBOLS

_PRETTY = {"lam": "λ", "lam_p": "λ'", "gamma": "γ", "gamma_p": "γ'"}


@dataclass(frozen=True)
class AffineForm:
    """``const + sum(coeff * symbol)`` with the terms kept sorted and nonzero."""

    terms: Tuple[Tuple[str, Fraction], ...] = ()
    const: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        merged: Dict[str, Fraction] = {}
        for name, coeff in self.terms:
            if name not in SYMBOLS:
                logger.error(f"Unknown symbol {name!r} in affine form.")
                raise ValueError(f"unknown symbol {name!r}")
            merged[name] = merged.get(name, Fraction(0)) + to_fraction(coeff)
        terms = tuple(sorted((n, c) for n, c in merged.items() if c))
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "const", to_fraction(self.const))

    @classmethod
    def of(cls, const: RationalLike = 0, **coeffs: RationalLike) -> "AffineForm":
        return cls(tuple(coeffs.items()), to_fraction(const))

    @classmethod
    def symbol(cls, name: str) -> "AffineForm":
        return cls(((name, Fraction(1)),))

    def __add__(self, other: "AffineForm") -> "AffineForm":
        return AffineForm(self.terms + other.terms, self.const + other.const)

    def __neg__(self) -> "AffineForm":
        return AffineForm(tuple((n, -c) for n, c in self.terms), -self.const)

    def __sub__(self, other: "AffineForm") -> "AffineForm":
        return self + (-other)

    def evaluate(self, env: Mapping[str, Fraction]) -> Fraction:
        return self.const + sum((c * env[n] for n, c in self.terms), Fraction(0))

    def render(self) -> str:
        parts = []
        for name, coeff in self.terms:
            label = _PRETTY.get(name, "α" + name[1:] if name.startswith("a") else name)
            if coeff == 1:
                parts.append(f"+{label}")
            elif coeff == -1:
                parts.append(f"-{label}")
            else:
                sign = "+" if coeff > 0 else "-"
                parts.append(f"{sign}{format_fraction(abs(coeff))}{label}")
        if self.const or not parts:
            sign = "+" if self.const >= 0 else "-"
            parts.append(f"{sign}{format_fraction(abs(self.const))}")
        text = "".join(parts)
        return text[1:] if text.startswith("+") else text


def _alpha(k: int, m: int) -> AffineForm:
    return AffineForm.symbol(f"a{k}{m}")


LAM = AffineForm.symbol("lam")
LAM_P = AffineForm.symbol("lam_p")
GAMMA_P = AffineForm.symbol("gamma_p")
ZERO = AffineForm()

VARIANTS = ("D123", "F123")
LAYERS = ("X123", "X12", "X1", "X2", "X3")

POWER: Dict[str, AffineForm] = {
    "X123": ZERO,
    "X12": -LAM,
    "X1": -LAM - LAM_P,
    "X2": -LAM - LAM_P,
    "X3": -LAM,
}

ANTENNAS: Dict[str, Tuple[int, ...]] = {
    "X123": (1, 2, 3),
    "X12": (1, 2),
    "X1": (1,),
    "X2": (2,),
    "X3": (3,),
}

# antenna whose every layer is sent P^(-gamma') weaker
ATTENUATED_ANTENNA: Dict[str, int] = {"D123": 1, "F123": 2}

DECODING_ORDER: Dict[int, Tuple[str, ...]] = {
    1: ("X123", "X12", "X1"),
    2: ("X123", "X12", "X2"),
    3: ("X123", "X3"),
}


def attenuation(variant: str, antenna: int) -> AffineForm:
    if variant not in VARIANTS:
        logger.error(f"Unknown scheme variant {variant!r}.")
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    return GAMMA_P if ATTENUATED_ANTENNA[variant] == antenna else ZERO


def received_exponent(variant: str, receiver: int, layer: str, antenna: int) -> AffineForm:
    """Exponent of ``layer`` as seen by ``receiver`` through ``antenna``."""
    return _alpha(receiver, antenna) - attenuation(variant, antenna) + POWER[layer]


@dataclass(frozen=True)
class SinrRow:
    variant: str
    receiver: int
    layer: str
    signal: AffineForm
    interferers: Tuple[Tuple[str, int, AffineForm], ...]

    def branches(self) -> Tuple[AffineForm, ...]:
        """The affine terms whose minimum is the SINR exponent."""
        return (self.signal,) + tuple(self.signal - form for _, _, form in self.interferers)

    def evaluate(self, env: Mapping[str, Fraction]) -> Fraction:
        return min(b.evaluate(env) for b in self.branches())

    def render(self) -> str:
        return "min(" + ", ".join(b.render() for b in self.branches()) + ")"


def build_sinr_table(variant: str) -> Dict[Tuple[int, str], SinrRow]:
    table: Dict[Tuple[int, str], SinrRow] = {}
    for receiver, order in DECODING_ORDER.items():
        for pos, layer in enumerate(order):
            decoded = set(order[: pos + 1])
            signal = received_exponent(variant, receiver, layer, receiver)
            interferers = tuple(
                (other, m, received_exponent(variant, receiver, other, m))
                for other in LAYERS
                if other not in decoded
                for m in ANTENNAS[other]
            )
            table[(receiver, layer)] = SinrRow(variant, receiver, layer, signal, interferers)
    return table


SINR_TABLES: Dict[str, Dict[Tuple[int, str], SinrRow]] = {
    variant: build_sinr_table(variant) for variant in VARIANTS
}

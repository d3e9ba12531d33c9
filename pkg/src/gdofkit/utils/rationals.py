import logging
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Union

logger = logging.getLogger(__name__)

RationalLike = Union[Fraction, int, str, Decimal, float]


def to_fraction(value: RationalLike) -> Fraction:
    """
    Parse a number into an exact Fraction.

    Strings may be "p/q" or finite decimals ("1.2", "1e-3"); floats go
    through their shortest repr so 1.1 becomes 11/10 rather than the
    binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        logger.error(f"Refusing to read a bool as a rational: {value = }")
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, Decimal):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                return Fraction(text)
            return Fraction(Decimal(text))
        except (ValueError, ZeroDivisionError, InvalidOperation) as exc:
            logger.error(f"Could not parse rational from {value!r}.")
            raise ValueError(f"not a rational: {value!r}") from exc
    logger.error(f"Unsupported rational input type: {type(value)}")
    raise ValueError(f"not a rational: {value!r}")


def format_fraction(value: Fraction) -> str:
    """Render as "p/q", dropping the denominator when it is 1."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"

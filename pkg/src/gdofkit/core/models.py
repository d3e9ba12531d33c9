"""
JSON wire formats.

Rationals travel as strings ("3/5", "0.6" or "1") and always come back
out as "p/q" strings so a dump can be read again without loss.
"""

import logging
from fractions import Fraction
from pathlib import Path
from typing import Annotated, List, Literal, Type, TypeVar, Union

from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, PlainValidator

from gdofkit.core.channel import ChannelMatrix
from gdofkit.core.polytope import LinearInequality, Polytope
from gdofkit.core.sls import RateSplit, SlsParams, SlsScheme
from gdofkit.utils.rationals import format_fraction, to_fraction

logger = logging.getLogger(__name__)


def _parse_rational(value) -> Fraction:
    try:
        return to_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise ValueError(f"not a rational: {value!r}") from e


Rational = Annotated[
    Fraction,
    PlainValidator(_parse_rational),
    PlainSerializer(format_fraction, return_type=str),
]


class InequalityModel(BaseModel):
    coeffs: List[Rational]
    rhs: Rational


class PolytopeModel(BaseModel):
    dim: int = Field(ge=1)
    rows: List[InequalityModel]

    @classmethod
    def from_polytope(cls, p: Polytope) -> "PolytopeModel":
        return cls(
            dim=p.dim,
            rows=[InequalityModel(coeffs=list(r.coeffs), rhs=r.rhs) for r in p.hrep],
        )

    def to_polytope(self) -> Polytope:
        return Polytope(
            self.dim, tuple(LinearInequality.canonical(r.coeffs, r.rhs) for r in self.rows)
        )


class ChannelModel(BaseModel):
    alpha: List[List[Rational]]

    @classmethod
    def from_channel(cls, ch: ChannelMatrix) -> "ChannelModel":
        return cls(alpha=[list(row) for row in ch.alpha])

    def to_channel(self) -> ChannelMatrix:
        return ChannelMatrix.from_rows(self.alpha)


class ParamsModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    lam: Rational = Field(alias="lambda")
    lam_p: Rational = Field(alias="lambda_p")
    gamma: Rational
    gamma_p: Rational

    @classmethod
    def from_params(cls, p: SlsParams) -> "ParamsModel":
        return cls(lam=p.lam, lam_p=p.lam_p, gamma=p.gamma, gamma_p=p.gamma_p)

    def to_params(self) -> SlsParams:
        return SlsParams(self.lam, self.lam_p, self.gamma, self.gamma_p)


class SplitModel(BaseModel):
    d_single: List[Rational] = Field(min_length=3, max_length=3)
    d_pair: Rational
    d_all: Rational
    mu: List[Rational] = Field(default_factory=lambda: [Fraction(1), Fraction(0)])
    xi: List[Rational] = Field(
        default_factory=lambda: [Fraction(1), Fraction(0), Fraction(0)]
    )

    @classmethod
    def from_split(cls, s: RateSplit) -> "SplitModel":
        return cls(
            d_single=list(s.d_single), d_pair=s.d_pair, d_all=s.d_all, mu=list(s.mu), xi=list(s.xi)
        )

    def to_split(self) -> RateSplit:
        return RateSplit(tuple(self.d_single), self.d_pair, self.d_all, tuple(self.mu), tuple(self.xi))


class SchemeModel(BaseModel):
    variant: Literal["D123", "F123"]
    params: ParamsModel
    split: SplitModel
    channel: ChannelModel

    @classmethod
    def from_scheme(cls, s: SlsScheme) -> "SchemeModel":
        return cls(
            variant=s.variant,
            params=ParamsModel.from_params(s.params),
            split=SplitModel.from_split(s.split),
            channel=ChannelModel.from_channel(s.channel),
        )

    def to_scheme(self) -> SlsScheme:
        return SlsScheme(
            self.variant, self.params.to_params(), self.split.to_split(), self.channel.to_channel()
        )


ModelT = TypeVar("ModelT", bound=BaseModel)


def load_model(source: Union[str, Path], model: Type[ModelT]) -> ModelT:
    """Parse a JSON file into ``model``; pydantic errors carry the field path."""
    text = Path(source).read_text(encoding="utf-8")
    logger.debug(f"Loading {model.__name__} from {source}")
    return model.model_validate_json(text)


def dump_model(obj: BaseModel) -> str:
    return obj.model_dump_json(indent=2, by_alias=True)

from .interface import LinearAlgebra
from .models import (
    BoundReport,
    CremonaMap,
    LambdaRealization,
    Monoid,
    MonoidSystem,
    ParamSurface,
    RationalMap,
    RectificationTrace,
    RunConfig,
)

__all__ = [
    "LinearAlgebra",
    "BoundReport",
    "CremonaMap",
    "LambdaRealization",
    "Monoid",
    "MonoidSystem",
    "ParamSurface",
    "RationalMap",
    "RectificationTrace",
    "RunConfig",
]

import math
from typing import (
    Annotated,
    Union
)

from pydantic import PlainSerializer


def real_token(value: float) -> Union[float, str]:
    """JSON form of a real: finite values as numbers, the rest as "inf", "-inf", "nan"."""
    if math.isfinite(value):
        return value
    if math.isnan(value):
        return "nan"
    return "inf" if value > 0 else "-inf"


# Floats that may be +inf sentinels (condition numbers, LCDs, ...).
Real = Annotated[float, PlainSerializer(real_token, return_type=Union[float, str], when_used="json")]

from app.utils.prng import (
    CounterStream,
    Stream,
    trial_streams
)
from app.utils.stats import (
    summarize,
    wilson_interval
)

__all__ = [
    "CounterStream",
    "Stream",
    "trial_streams",
    "summarize",
    "wilson_interval",
]

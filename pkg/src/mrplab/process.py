"""Counting-process paths on a finite window.

An :class:`ArrivalPath` stores the strictly increasing arrival times of one
realisation of a counting process on [0, horizon], together with the latent
parameter that generated it.  The path is complete in the sense that every
arrival inside the window is stored, so the count N_t = #{arrivals <= t} is
answerable for any t in the window and nothing beyond it.

Counts are right-continuous: an arrival at exactly t is included in N_t.
The count/arrival duality T_n = inf{t : N_t = n} holds by construction and
is exercised heavily in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    IncompletePathError,
    OutOfHorizonError,
    RejectedInputError,
)

__all__ = [
    "ArrivalPath",
    "PartitionQuery",
    "build_path",
    "count_at",
    "arrival_of",
    "increments",
    "path_to_text",
    "path_from_text",
]

# Matching float round-trip: repr-style 17 significant digits.
_FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class ArrivalPath:
    """One realisation: latent parameter, arrivals in (0, horizon], cutoff."""

    theta: tuple[float, ...]
    arrivals: tuple[float, ...]
    horizon: float

    def __post_init__(self):
        if not self.theta:
            raise RejectedInputError("theta must have at least one coordinate")
        if not all(np.isfinite(v) for v in self.theta):
            raise RejectedInputError("theta must be finite")
        if not np.isfinite(self.horizon) or self.horizon < 0.0:
            raise RejectedInputError("horizon must be a finite nonnegative real")
        prev = 0.0
        for t in self.arrivals:
            if not np.isfinite(t) or t <= prev:
                raise RejectedInputError(
                    "arrivals must be finite, positive, strictly increasing"
                )
            prev = t
        if self.arrivals and self.arrivals[-1] > self.horizon:
            raise RejectedInputError("arrivals must not exceed the horizon")

    @property
    def n_arrivals(self) -> int:
        return len(self.arrivals)


@dataclass(frozen=True)
class PartitionQuery:
    """Increasing time points 0 < t_1 < ... < t_m and one count per cell.

    The counts are the queried increments over (t_{j-1}, t_j] with t_0 = 0;
    operations that only need the grid ignore them, so they default to zero.
    """

    times: tuple[float, ...]
    counts: tuple[int, ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not self.times:
            raise RejectedInputError("need at least one partition time")
        prev = 0.0
        for t in self.times:
            if not np.isfinite(t) or t <= prev:
                raise RejectedInputError("times must be positive and strictly increasing")
            prev = t
        if self.counts is None:
            object.__setattr__(self, "counts", tuple(0 for _ in self.times))
        if len(self.counts) != len(self.times):
            raise RejectedInputError("need exactly one count per time")
        if any(int(k) != k or k < 0 for k in self.counts):
            raise RejectedInputError("counts must be nonnegative integers")
        object.__setattr__(self, "counts", tuple(int(k) for k in self.counts))

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def last_time(self) -> float:
        return self.times[-1]


def build_path(theta, interarrivals, horizon: float) -> ArrivalPath:
    """Assemble a path from raw interarrival gaps.

    Stores every partial sum <= horizon.  The supplied gaps must prove the
    window is covered: once the running sum reaches the horizon any further
    arrival falls outside, so the path is complete.  A list that runs out
    strictly below the horizon leaves the tail of the window undetermined
    and is rejected.
    """
    w = np.asarray(interarrivals, dtype=float)
    if w.ndim != 1:
        raise RejectedInputError("interarrivals must be a flat sequence")
    if w.size and (not np.all(np.isfinite(w)) or np.any(w <= 0.0)):
        raise RejectedInputError("interarrivals must be finite and strictly positive")
    if not np.isfinite(horizon) or horizon < 0.0:
        raise RejectedInputError("horizon must be a finite nonnegative real")
    sums = np.cumsum(w)
    if sums.size and sums[-1] < horizon:
        raise IncompletePathError(
            f"interarrivals cover only [0, {sums[-1]!r}] of [0, {horizon!r}]"
        )
    if not sums.size and horizon > 0.0:
        raise IncompletePathError("no interarrivals supplied for a positive horizon")
    kept = sums[sums <= horizon]
    theta_t = tuple(float(v) for v in np.atleast_1d(np.asarray(theta, dtype=float)))
    return ArrivalPath(theta=theta_t, arrivals=tuple(kept.tolist()), horizon=float(horizon))


def count_at(path: ArrivalPath, t: float) -> int:
    """N_t = number of arrivals <= t, for t in [0, horizon]."""
    if not np.isfinite(t) or t < 0.0 or t > path.horizon:
        raise OutOfHorizonError(f"t={t!r} outside [0, {path.horizon!r}]")
    return int(np.searchsorted(path.arrivals, t, side="right"))


def arrival_of(path: ArrivalPath, n: int) -> float:
    """T_n, the n-th arrival time (1-based)."""
    if int(n) != n or n < 1:
        raise RejectedInputError("arrival index must be a positive integer")
    if n > path.n_arrivals:
        raise OutOfHorizonError(
            f"path stores {path.n_arrivals} arrivals; T_{n} lies beyond the horizon"
        )
    return path.arrivals[n - 1]


def increments(path: ArrivalPath, query: PartitionQuery) -> tuple[int, ...]:
    """Counts over the cells (t_{j-1}, t_j] of the query grid."""
    if query.last_time > path.horizon:
        raise OutOfHorizonError(
            f"query reaches {query.last_time!r} beyond horizon {path.horizon!r}"
        )
    counts = np.searchsorted(path.arrivals, np.asarray(query.times), side="right")
    return tuple(int(c) for c in np.diff(np.concatenate([[0], counts])))


# ======================================================================
# Text serialization
# ======================================================================

def path_to_text(path: ArrivalPath) -> str:
    """Render a path as a header line plus one arrival per line.

    Floats are written with 17 significant digits so parsing restores them
    bit for bit.
    """
    theta_s = ",".join(_FLOAT_FMT % v for v in path.theta)
    lines = [f"theta={theta_s} horizon={_FLOAT_FMT % path.horizon}"]
    lines.extend(_FLOAT_FMT % t for t in path.arrivals)
    return "\n".join(lines) + "\n"


def path_from_text(text: str) -> ArrivalPath:
    """Inverse of :func:`path_to_text`."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("theta="):
        raise RejectedInputError("path text must start with a 'theta=... horizon=...' header")
    header = lines[0].split()
    fields = dict(tok.split("=", 1) for tok in header if "=" in tok)
    if "theta" not in fields or "horizon" not in fields:
        raise RejectedInputError("header must carry theta= and horizon=")
    try:
        theta = tuple(float(v) for v in fields["theta"].split(","))
        horizon = float(fields["horizon"])
        arrivals = tuple(float(v) for v in lines[1:])
    except ValueError as exc:
        raise RejectedInputError(f"malformed path text: {exc}") from exc
    return ArrivalPath(theta=theta, arrivals=arrivals, horizon=horizon)

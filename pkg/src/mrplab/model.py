"""Mixed renewal models: assembly, simulation, and disintegration checks.

A model is a triple (mixing law, parameter map, kernel family).  Drawing a
path means drawing theta from the mixing law, pushing it through the map to
get the kernel parameter, then drawing interarrival gaps from the kernel
until the horizon is covered.  The conditional law at a fixed theta is the
plain renewal process of the kernel at the mapped parameter; that simulator
is the operational face of the disintegration, and `check_consistency`
verifies the defining integral identity of the disintegration by comparing
conditional-then-average against joint simulation.

Reproducibility contract: every random quantity in an ensemble is drawn
from named substreams of SeedSequence(seed), with path i's randomness at a
fixed offset determined by (seed, i and the earlier thetas), so the same
(model, n_paths, horizon, seed) produce bitwise-identical ensembles no
matter how the work is chunked or how many workers run.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InsufficientDataError,
    InsufficientMassError,
    InjectivityError,
    ParameterError,
    RejectedInputError,
)
from .kernels import (
    DiracMixing,
    GammaMixing,
    IdentityMap,
    InterarrivalKernel,
    MappedMixing,
    MixingLaw,
    ParameterMap,
    AffineMap,
    ReciprocalMap,
    UniformMixing,
    Family,
    kernel_for,
)
from .process import ArrivalPath
from .stats import ks_distance, kolmogorov_critical, EmpiricalSample

__all__ = [
    "MrpModel",
    "PathEnsemble",
    "PathEvent",
    "sample_ensemble",
    "sample_path",
    "reparameterize",
    "check_consistency",
    "kernel_equality_check",
    "ConsistencyReport",
    "KernelEqualityReport",
    "preset",
    "PRESET_NAMES",
    "model_to_config",
    "model_from_config",
    "parse_config_text",
    "ensemble_to_text",
    "ensemble_from_text",
]

# Substream tags: spawn_key[0] of SeedSequence(seed, spawn_key=(tag, ...)).
_TAG_THETA = 0
_TAG_GAPS = 1
_TAG_FALLBACK = 2
_TAG_CONS_LEFT_THETA = 3
_TAG_CONS_LEFT_GAPS = 4
_TAG_CONS_LEFT_FALLBACK = 5
_TAG_CONS_RIGHT_THETA = 6
_TAG_CONS_RIGHT_GAPS = 7
_TAG_CONS_RIGHT_FALLBACK = 8
_TAG_KEQ_THETA = 9
_TAG_KEQ_DRAWS = 10
_TAG_SINGLE_PATH = 11

_BUDGET_CAP = 8192
_CHUNK = 65536


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


# ======================================================================
# Model assembly and the config grammar
# ======================================================================

@dataclass(frozen=True)
class MrpModel:
    mixing: MixingLaw
    pmap: ParameterMap
    kernel: InterarrivalKernel

    def kernel_param(self, theta):
        """Map a mixing draw to the kernel parameter, validating domains."""
        lam = self.pmap.apply(theta)
        bad = np.asarray(lam, dtype=float)
        if np.any(~np.isfinite(bad)) or np.any(bad <= 0.0):
            raise ParameterError("mapped parameter left the kernel's domain")
        return lam

    def rate_description(self) -> str:
        """Closed form of the induced rate theta-hat = p(h(theta))."""
        return self.kernel.hazard_description(self.pmap.describe("theta"))


def model_to_config(model: MrpModel) -> dict[str, str]:
    return {
        "mixing": model.mixing.token(),
        "map": model.pmap.token(),
        "kernel": model.kernel.family.value,
    }


def _parse_mixing(token: str) -> MixingLaw:
    token = token.strip()
    if token.startswith("mapped(") and token.endswith(")"):
        inner = token[len("mapped("):-1]
        base_tok, _, map_tok = inner.rpartition(";")
        return MappedMixing(base=_parse_mixing(base_tok), pmap=_parse_map(map_tok))
    name, _, args = token.partition(":")
    vals = [float(v) for v in args.split(",")] if args else []
    if name == "gamma":
        if len(vals) != 2:
            raise RejectedInputError("gamma mixing takes two parameters: shape,rate")
        return GammaMixing(alpha=vals[0], beta=vals[1])
    if name == "uniform":
        if len(vals) != 2:
            raise RejectedInputError("uniform mixing takes two parameters: a,b")
        return UniformMixing(a=vals[0], b=vals[1])
    if name == "dirac":
        if len(vals) != 1:
            raise RejectedInputError("dirac mixing takes one parameter")
        return DiracMixing(theta0=vals[0])
    raise RejectedInputError(f"unknown mixing law {name!r}")


def _parse_map(token: str) -> ParameterMap:
    token = token.strip()
    name, _, args = token.partition(":")
    vals = [float(v) for v in args.split(",")] if args else []
    if name == "affine":
        if len(vals) != 2:
            raise RejectedInputError("affine map takes two parameters: a,b")
        return AffineMap(a=vals[0], b=vals[1])
    if name == "reciprocal":
        return ReciprocalMap()
    if name == "identity":
        return IdentityMap()
    raise RejectedInputError(f"unknown parameter map {name!r}")


def model_from_config(config: dict[str, str]) -> MrpModel:
    missing = {"mixing", "map", "kernel"} - set(config)
    if missing:
        raise RejectedInputError(f"model config missing keys: {sorted(missing)}")
    try:
        kern = kernel_for(config["kernel"].strip())
    except ValueError as exc:
        raise RejectedInputError(f"unknown kernel family {config['kernel']!r}") from exc
    return MrpModel(
        mixing=_parse_mixing(config["mixing"]),
        pmap=_parse_map(config["map"]),
        kernel=kern,
    )


def parse_config_text(text: str) -> MrpModel:
    """Parse the key=value grammar, e.g. ``mixing=gamma:2,1`` lines."""
    config: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise RejectedInputError(f"expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        config[key.strip()] = value.strip()
    return model_from_config(config)


PRESET_NAMES = ("a", "b", "c", "deterministic")


def preset(name: str) -> MrpModel:
    """The built-in example suite.

    a: gamma-mixed exponential rates, the canonical mixed Poisson process.
    b: gamma mixing pushed through 1/theta into the unit-shape Pareto kernel.
    c: uniform(1, 2) mixing with the square-root-exponent gamma-type kernel.
    deterministic: point mass gaps, the Markov-but-not-mixed-Poisson case.
    """
    if name == "a":
        return MrpModel(GammaMixing(2.0, 1.0), AffineMap(1.0, 0.0), kernel_for("exp"))
    if name == "b":
        return MrpModel(GammaMixing(2.0, 1.0), ReciprocalMap(), kernel_for("pareto"))
    if name == "c":
        return MrpModel(UniformMixing(1.0, 2.0), IdentityMap(), kernel_for("gengamma"))
    if name == "deterministic":
        return MrpModel(DiracMixing(1.0), IdentityMap(), kernel_for("deterministic"))
    raise RejectedInputError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")


# ======================================================================
# Vectorised simulation core
# ======================================================================

def _flat_arrivals(
    kernel: InterarrivalKernel,
    lams: np.ndarray,
    horizon: float,
    seed: int,
    gaps_tag: int,
    fallback_tag: int,
    workers: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Simulate arrivals for one path per entry of ``lams``.

    Returns (values, offsets): path i's arrivals are values[offsets[i]:
    offsets[i+1]], strictly increasing within (0, horizon].  Paths draw from
    one shared uniform stream in fixed per-path budget slices; a path that
    exhausts its budget before covering the horizon is finished from its own
    fallback substream (rare by construction of the budgets).
    """
    n = lams.size
    rng_gaps = _stream(seed, gaps_tag)
    budgets = np.clip(kernel.count_budget(lams, horizon), 4, _BUDGET_CAP)

    values_parts: list[np.ndarray] = []
    counts = np.empty(n, dtype=np.int64)

    pos = 0
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while pos < n:
            hi = min(n, pos + _CHUNK)
            b = budgets[pos:hi]
            total = int(b.sum())
            u = np.maximum(rng_gaps.random(total), 2.0 ** -53)
            lam_rep = np.repeat(lams[pos:hi], b)
            if pool is not None:
                # elementwise transform; split purely for thread throughput
                parts = np.array_split(np.arange(total), workers)
                out = np.empty(total, dtype=float)

                def run(ix):
                    out[ix] = kernel.quantile(lam_rep[ix], u[ix])

                list(pool.map(run, [ix for ix in parts if ix.size]))
                gaps = out
            else:
                gaps = np.asarray(kernel.quantile(lam_rep, u), dtype=float)

            starts = np.concatenate([[0], np.cumsum(b)[:-1]])
            cs = np.cumsum(gaps)
            base = np.concatenate([[0.0], cs[starts[1:] - 1]])
            arr = cs - np.repeat(base, b)

            cum_mark = np.concatenate([[0], np.cumsum(arr <= horizon)])
            kept = cum_mark[starts + b] - cum_mark[starts]
            covered = arr[starts + b - 1] >= horizon

            for j in range(hi - pos):
                i = pos + j
                seg = arr[starts[j]: starts[j] + kept[j]]
                if covered[j]:
                    values_parts.append(seg)
                    counts[i] = kept[j]
                    continue
                # Budget exhausted below the horizon: extend from the
                # path-specific fallback stream until the window is covered.
                rng_i = _stream(seed, fallback_tag, i)
                tail = [seg]
                last = arr[starts[j] + b[j] - 1]
                m = kept[j]
                while last < horizon:
                    extra = np.asarray(
                        kernel.quantile(
                            lams[i], np.maximum(rng_i.random(32), 2.0 ** -53)
                        ),
                        dtype=float,
                    )
                    ecs = last + np.cumsum(extra)
                    keep = ecs[ecs <= horizon]
                    tail.append(keep)
                    m += keep.size
                    last = ecs[-1]
                values_parts.append(np.concatenate(tail))
                counts[i] = m
            pos = hi
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    values = np.concatenate(values_parts) if values_parts else np.empty(0)
    offsets = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    values.flags.writeable = False
    offsets.flags.writeable = False
    return values, offsets


@dataclass(frozen=True, eq=False)
class PathEnsemble:
    """Columnar store of simulated paths plus the recipe that made them."""

    model: MrpModel
    seed: int
    horizon: float
    thetas: np.ndarray
    arrival_values: np.ndarray
    arrival_offsets: np.ndarray
    _path_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_paths(self) -> int:
        return self.thetas.size

    def counts_at(self, t: float) -> np.ndarray:
        """N_t for every path, vectorised."""
        if not math.isfinite(t) or t < 0.0 or t > self.horizon:
            from .errors import OutOfHorizonError

            raise OutOfHorizonError(f"t={t!r} outside [0, {self.horizon!r}]")
        cum = np.concatenate([[0], np.cumsum(self.arrival_values <= t)])
        return (cum[self.arrival_offsets[1:]] - cum[self.arrival_offsets[:-1]]).astype(np.int64)

    def increments_matrix(self, times) -> np.ndarray:
        """Counts over (t_{j-1}, t_j] for every path; shape (n_paths, m)."""
        times = np.asarray(times, dtype=float)
        cols = np.stack([self.counts_at(t) for t in times], axis=1)
        return np.diff(np.concatenate([np.zeros((self.n_paths, 1), dtype=np.int64), cols], axis=1), axis=1)

    def path(self, i: int) -> ArrivalPath:
        if i not in self._path_cache:
            lo, hi = self.arrival_offsets[i], self.arrival_offsets[i + 1]
            self._path_cache[i] = ArrivalPath(
                theta=(float(self.thetas[i]),),
                arrivals=tuple(self.arrival_values[lo:hi].tolist()),
                horizon=self.horizon,
            )
        return self._path_cache[i]

    def paths(self) -> list[ArrivalPath]:
        return [self.path(i) for i in range(self.n_paths)]

    def first_two_gaps(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(mask, W1, W2) over paths with at least two arrivals."""
        sizes = np.diff(self.arrival_offsets)
        mask = sizes >= 2
        starts = self.arrival_offsets[:-1][mask]
        w1 = self.arrival_values[starts]
        w2 = self.arrival_values[starts + 1] - w1
        return mask, w1, w2


def sample_ensemble(
    model: MrpModel,
    n_paths: int,
    horizon: float,
    seed: int,
    workers: int = 1,
) -> PathEnsemble:
    """Draw ``n_paths`` independent realisations of the model on [0, horizon]."""
    if int(n_paths) != n_paths or n_paths < 1:
        raise RejectedInputError("n_paths must be a positive integer")
    if not math.isfinite(horizon) or horizon < 0.0:
        raise RejectedInputError("horizon must be a finite nonnegative real")
    if int(workers) != workers or workers < 1:
        raise RejectedInputError("workers must be a positive integer")
    rng_theta = _stream(seed, _TAG_THETA)
    thetas = np.asarray(model.mixing.sample(rng_theta, size=int(n_paths)), dtype=float)
    lams = np.asarray(model.kernel_param(thetas), dtype=float)
    values, offsets = _flat_arrivals(
        model.kernel, lams, float(horizon), seed, _TAG_GAPS, _TAG_FALLBACK, workers=int(workers)
    )
    thetas.flags.writeable = False
    return PathEnsemble(
        model=model,
        seed=int(seed),
        horizon=float(horizon),
        thetas=thetas,
        arrival_values=values,
        arrival_offsets=offsets,
    )


def sample_path(model: MrpModel, theta: float, horizon: float, seed: int) -> ArrivalPath:
    """The conditional simulator: one renewal path at a fixed theta."""
    lam = float(model.kernel_param(theta))
    values, offsets = _flat_arrivals(
        model.kernel, np.array([lam]), float(horizon), seed, _TAG_SINGLE_PATH, _TAG_SINGLE_PATH + 1
    )
    return ArrivalPath(
        theta=(float(theta),),
        arrivals=tuple(values[offsets[0]: offsets[1]].tolist()),
        horizon=float(horizon),
    )


# ======================================================================
# Reparameterization
# ======================================================================

def reparameterize(model: MrpModel, grid_size: int = 801) -> MrpModel:
    """Fold the parameter map into the mixing law.

    The returned model draws theta-tilde = h(theta) directly and applies the
    identity map, so its paths have the same law.  The map must be strictly
    monotone on the sampled support; that is checked on a dense quantile
    grid before the push-forward is built.
    """
    qs = np.linspace(0.001, 0.999, grid_size)
    grid = np.unique(np.asarray(model.mixing.quantile(qs), dtype=float))
    if grid.size > 1:
        mapped = np.asarray(model.pmap.apply(grid), dtype=float)
        diffs = np.diff(mapped)
        ok = np.all(diffs > 0.0) if model.pmap.is_increasing else np.all(diffs < 0.0)
        if not ok:
            raise InjectivityError(
                "parameter map is not strictly monotone on the sampled support"
            )
    return MrpModel(
        mixing=MappedMixing(base=model.mixing, pmap=model.pmap),
        pmap=IdentityMap(),
        kernel=model.kernel,
    )


# ======================================================================
# Path events
# ======================================================================

@dataclass(frozen=True)
class PathEvent:
    """Finite conjunction of increment constraints N_t - N_s = k."""

    clauses: tuple[tuple[float, float, int], ...]

    def __post_init__(self):
        if not self.clauses:
            raise RejectedInputError("event needs at least one clause")
        for s, t, k in self.clauses:
            if not (0.0 <= s < t) or not math.isfinite(t):
                raise RejectedInputError("clause needs 0 <= s < t finite")
            if int(k) != k or k < 0:
                raise RejectedInputError("clause count must be a nonnegative integer")

    @staticmethod
    def count_equals(t: float, n: int) -> "PathEvent":
        return PathEvent(clauses=((0.0, float(t), int(n)),))

    @staticmethod
    def increment_equals(s: float, t: float, k: int) -> "PathEvent":
        return PathEvent(clauses=((float(s), float(t), int(k)),))

    def and_(self, other: "PathEvent") -> "PathEvent":
        return PathEvent(clauses=self.clauses + other.clauses)

    @property
    def required_horizon(self) -> float:
        return max(t for _, t, _ in self.clauses)

    def evaluate(self, path: ArrivalPath) -> bool:
        from .process import count_at

        return all(
            count_at(path, t) - (count_at(path, s) if s > 0.0 else 0) == k
            for s, t, k in self.clauses
        )

    def evaluate_ensemble(self, ens: PathEnsemble) -> np.ndarray:
        ok = np.ones(ens.n_paths, dtype=bool)
        for s, t, k in self.clauses:
            inc = ens.counts_at(t) - (ens.counts_at(s) if s > 0.0 else 0)
            ok &= inc == k
        return ok

    def describe(self) -> str:
        parts = []
        for s, t, k in self.clauses:
            if s == 0.0:
                parts.append(f"N[{t:g}]={k}")
            else:
                parts.append(f"N[{t:g}]-N[{s:g}]={k}")
        return " & ".join(parts)


# ======================================================================
# Disintegration consistency and conditional-law equality
# ======================================================================

@dataclass(frozen=True)
class ConsistencyReport:
    event: str
    set_b: tuple[float, float]
    n: int
    seed: int
    mass_b: float
    lhs: float
    lhs_se: float
    rhs: float
    rhs_se: float
    z: float

    def to_dict(self) -> dict:
        return {
            "check": "consistency",
            "event": self.event,
            "set_b": list(self.set_b),
            "n": self.n,
            "seed": self.seed,
            "mass_b": self.mass_b,
            "estimates": [
                {"name": "conditional_average", "value": self.lhs, "stderr": self.lhs_se},
                {"name": "joint_probability", "value": self.rhs, "stderr": self.rhs_se},
            ],
            "z": self.z,
        }


def check_consistency(
    model: MrpModel,
    event: PathEvent,
    set_b: tuple[float, float],
    n: int,
    seed: int,
) -> ConsistencyReport:
    """Monte Carlo witness of the disintegration identity.

    Left side: draw theta-tilde from the mixing image, keep the indicator of
    B, and estimate the conditional probability of the event by an
    independent conditional simulation at each retained parameter.  Right
    side: simulate the joint law directly and average the product of
    indicators.  Both estimate the same number; the report carries the
    standardized difference.
    """
    if int(n) != n or n < 100:
        raise RejectedInputError("n must be an integer >= 100")
    lo, hi = float(set_b[0]), float(set_b[1])
    if not lo <= hi:
        raise RejectedInputError("set B must be an interval (lo, hi) with lo <= hi")
    horizon = event.required_horizon
    n = int(n)

    # Left: conditional-then-average with fresh randomness for the paths.
    thetas_l = np.asarray(
        model.mixing.sample(_stream(seed, _TAG_CONS_LEFT_THETA), size=n), dtype=float
    )
    tildes_l = np.asarray(model.kernel_param(thetas_l), dtype=float)
    in_b_l = (tildes_l >= lo) & (tildes_l <= hi)
    mass_b = float(np.mean(in_b_l))
    if mass_b < 10.0 / n:
        raise InsufficientMassError(
            f"set B carries estimated mass {mass_b:.3g} < 10/n; enlarge B or n"
        )
    values_l, offsets_l = _flat_arrivals(
        model.kernel, tildes_l, horizon, seed, _TAG_CONS_LEFT_GAPS, _TAG_CONS_LEFT_FALLBACK
    )
    ens_l = PathEnsemble(
        model=model, seed=seed, horizon=horizon,
        thetas=thetas_l, arrival_values=values_l, arrival_offsets=offsets_l,
    )
    ind_l = in_b_l & event.evaluate_ensemble(ens_l)
    lhs = float(np.mean(ind_l))
    lhs_se = float(np.std(ind_l, ddof=1) / math.sqrt(n))

    # Right: the joint law in one go.
    thetas_r = np.asarray(
        model.mixing.sample(_stream(seed, _TAG_CONS_RIGHT_THETA), size=n), dtype=float
    )
    tildes_r = np.asarray(model.kernel_param(thetas_r), dtype=float)
    values_r, offsets_r = _flat_arrivals(
        model.kernel, tildes_r, horizon, seed, _TAG_CONS_RIGHT_GAPS, _TAG_CONS_RIGHT_FALLBACK
    )
    ens_r = PathEnsemble(
        model=model, seed=seed, horizon=horizon,
        thetas=thetas_r, arrival_values=values_r, arrival_offsets=offsets_r,
    )
    ind_r = ((tildes_r >= lo) & (tildes_r <= hi)) & event.evaluate_ensemble(ens_r)
    rhs = float(np.mean(ind_r))
    rhs_se = float(np.std(ind_r, ddof=1) / math.sqrt(n))

    pooled = math.sqrt(lhs_se ** 2 + rhs_se ** 2)
    if pooled == 0.0:
        z = 0.0 if lhs == rhs else math.inf
    else:
        z = (lhs - rhs) / pooled
    return ConsistencyReport(
        event=event.describe(),
        set_b=(lo, hi),
        n=n,
        seed=int(seed),
        mass_b=mass_b,
        lhs=lhs,
        lhs_se=lhs_se,
        rhs=rhs,
        rhs_se=rhs_se,
        z=float(z),
    )


@dataclass(frozen=True)
class KernelEqualityReport:
    n_theta: int
    n_per_theta: int
    seed: int
    critical_value: float
    ks_by_theta: tuple[tuple[float, float], ...]  # (theta, ks)
    max_ks: float
    exceed_fraction: float

    def to_dict(self) -> dict:
        return {
            "check": "kernel_equality",
            "n_theta": self.n_theta,
            "n_per_theta": self.n_per_theta,
            "seed": self.seed,
            "critical_value": self.critical_value,
            "max_ks": self.max_ks,
            "exceed_fraction": self.exceed_fraction,
            "ks_by_theta": [list(pair) for pair in self.ks_by_theta],
        }


def kernel_equality_check(
    model: MrpModel,
    n_theta: int,
    n_per_theta: int,
    seed: int,
) -> KernelEqualityReport:
    """Per-theta KS comparison of sampled gaps against the kernel cdf.

    Under a correct implementation sqrt(n) * KS follows the Kolmogorov law,
    so the fraction of theta draws exceeding the 1% critical value should
    hover near 1%.
    """
    if n_theta < 1:
        raise RejectedInputError("n_theta must be positive")
    if n_per_theta < 100:
        raise InsufficientDataError("need at least 100 draws per theta for the KS law")
    thetas = np.asarray(
        model.mixing.sample(_stream(seed, _TAG_KEQ_THETA), size=int(n_theta)), dtype=float
    )
    crit = kolmogorov_critical(0.01) / math.sqrt(n_per_theta)
    rows: list[tuple[float, float]] = []
    for i, theta in enumerate(thetas):
        lam = float(model.kernel_param(float(theta)))
        rng = _stream(seed, _TAG_KEQ_DRAWS, i)
        draws = np.asarray(model.kernel.sample(lam, rng, size=int(n_per_theta)), dtype=float)
        ks = ks_distance(EmpiricalSample.from_values(draws), lambda t: model.kernel.cdf(lam, t))
        rows.append((float(theta), float(ks)))
    ks_vals = np.array([k for _, k in rows])
    return KernelEqualityReport(
        n_theta=int(n_theta),
        n_per_theta=int(n_per_theta),
        seed=int(seed),
        critical_value=float(crit),
        ks_by_theta=tuple(rows),
        max_ks=float(ks_vals.max()),
        exceed_fraction=float(np.mean(ks_vals > crit)),
    )


# ======================================================================
# Ensemble serialization
# ======================================================================

def ensemble_to_text(ens: PathEnsemble) -> str:
    """JSON header line followed by each path in the text format."""
    from .process import path_to_text

    header = json.dumps(
        {
            "model": model_to_config(ens.model),
            "seed": ens.seed,
            "n_paths": ens.n_paths,
            "horizon": ens.horizon,
        },
        sort_keys=True,
    )
    blocks = [header]
    blocks.extend(path_to_text(ens.path(i)).rstrip("\n") for i in range(ens.n_paths))
    return "\n".join(blocks) + "\n"


def ensemble_from_text(text: str) -> PathEnsemble:
    from .process import path_from_text

    lines = text.strip().splitlines()
    if not lines:
        raise RejectedInputError("empty ensemble text")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise RejectedInputError(f"ensemble header is not JSON: {exc}") from exc
    model = model_from_config(header["model"])
    blocks: list[list[str]] = []
    for line in lines[1:]:
        if line.startswith("theta="):
            blocks.append([line])
        elif line.strip():
            if not blocks:
                raise RejectedInputError("arrival line before any path header")
            blocks[-1].append(line)
    if len(blocks) != header["n_paths"]:
        raise RejectedInputError(
            f"header promises {header['n_paths']} paths, found {len(blocks)}"
        )
    paths = [path_from_text("\n".join(b)) for b in blocks]
    thetas = np.array([p.theta[0] for p in paths], dtype=float)
    values = np.concatenate([np.asarray(p.arrivals, dtype=float) for p in paths]) if paths else np.empty(0)
    offsets = np.concatenate([[0], np.cumsum([p.n_arrivals for p in paths])]).astype(np.int64)
    thetas.flags.writeable = False
    values.flags.writeable = False
    offsets.flags.writeable = False
    return PathEnsemble(
        model=model,
        seed=int(header["seed"]),
        horizon=float(header["horizon"]),
        thetas=thetas,
        arrival_values=values,
        arrival_offsets=offsets,
    )

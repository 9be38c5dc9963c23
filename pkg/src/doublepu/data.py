"""Dataset containers, synthetic mixture generation, PU splitting, CSV I/O.

Feature CSV files carry a header row ``f0,...,f{d-1}``; fully labeled files
add ``y,z`` columns with values -1/1 (the target label w is always derived,
never stored).  Lines starting with '#' are treated as comments so pipeline
artifacts can carry provenance headers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .exceptions import DataError
from .risk import ClassPriors, as_feature_matrix
from .rng import gaussian_sample, make_rng

FEATURES_ONLY = "features"
FULLY_LABELED = "labeled"

#: Named row filters for three-way splitting.
SPLIT_FILTERS = ("all", "y=+1", "y=+1,z=+1")


def _label_array(name: str, values, n: int) -> np.ndarray:
    arr = np.asarray(values)
    if arr.shape != (n,):
        raise DataError(f"{name} must be a length-{n} label vector")
    arr = arr.astype(np.int64)
    if not np.all(np.isin(arr, (-1, 1))):
        raise DataError(f"{name} labels must be -1 or +1")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class LabeledData:
    """Fully labeled sample: features plus interest (y) and loyalty (z) labels.

    The target label w = +1 iff (y, z) = (+1, -1) is derived on demand.
    """

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.x, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise DataError("features must form a 2-d matrix with at least one column")
        if not np.all(np.isfinite(arr)):
            raise DataError("features contain non-finite entries")
        arr = np.array(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "x", arr)
        object.__setattr__(self, "y", _label_array("y", self.y, arr.shape[0]))
        object.__setattr__(self, "z", _label_array("z", self.z, arr.shape[0]))

    def __len__(self) -> int:
        return self.x.shape[0]

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    @property
    def w(self) -> np.ndarray:
        return np.where((self.y == 1) & (self.z == -1), 1, -1)

    def subset(self, indices) -> "LabeledData":
        return LabeledData(self.x[indices], self.y[indices], self.z[indices])


@dataclass(frozen=True)
class PuTriple:
    """The three observable training samples, features only."""

    positive_interest: np.ndarray  # J x d
    unlabeled: np.ndarray          # K x d
    positive_loyal: np.ndarray     # L x d

    def __post_init__(self):
        pi = as_feature_matrix("positive_interest", self.positive_interest)
        un = as_feature_matrix("unlabeled", self.unlabeled)
        pl = as_feature_matrix("positive_loyal", self.positive_loyal)
        if not pi.shape[1] == un.shape[1] == pl.shape[1]:
            raise DataError("the three samples must share one feature dimension")
        for arr in (pi, un, pl):
            arr.flags.writeable = False
        object.__setattr__(self, "positive_interest", pi)
        object.__setattr__(self, "unlabeled", un)
        object.__setattr__(self, "positive_loyal", pl)

    @property
    def dim(self) -> int:
        return self.positive_interest.shape[1]

    @property
    def counts(self) -> tuple[int, int, int]:
        return (
            self.positive_interest.shape[0],
            self.unlabeled.shape[0],
            self.positive_loyal.shape[0],
        )


@dataclass(frozen=True)
class MixtureComponent:
    """One Gaussian component with its (y, z) labels."""

    mean: np.ndarray
    cov: np.ndarray
    count: int
    y: int
    z: int

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64).reshape(-1)
        cov = np.asarray(self.cov, dtype=np.float64)
        if mean.size < 1:
            raise DataError("component mean must be non-empty")
        if cov.shape != (mean.size, mean.size):
            raise DataError(f"component covariance shape {cov.shape} does not match mean dimension {mean.size}")
        if int(self.count) < 0:
            raise DataError("component count must be >= 0")
        if self.y not in (-1, 1) or self.z not in (-1, 1):
            raise DataError("component labels y and z must be -1 or +1")
        mean.flags.writeable = False
        cov = np.array(cov)
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "count", int(self.count))


@dataclass(frozen=True)
class MixtureConfig:
    """A labeled Gaussian mixture, fully specified by its seed."""

    components: tuple[MixtureComponent, ...]
    seed: int = 0

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise DataError("mixture needs at least one component")
        d = comps[0].mean.size
        if any(c.mean.size != d for c in comps):
            raise DataError("all mixture components must share one dimension")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def dim(self) -> int:
        return self.components[0].mean.size

    @property
    def total_count(self) -> int:
        return sum(c.count for c in self.components)

    def scaled(self, factor: int) -> "MixtureConfig":
        """Same mixture with every component count multiplied by ``factor``."""
        comps = tuple(replace(c, count=c.count * int(factor)) for c in self.components)
        return MixtureConfig(comps, self.seed)


def default_mixture(seed: int = 0) -> MixtureConfig:
    """Three well-separated bivariate clusters: 500 target-positive points
    (interest without loyalty) and two negative clusters of 1000 each."""
    eye = np.eye(2)
    return MixtureConfig(
        (
            MixtureComponent(mean=(0.0, 3.0), cov=eye, count=500, y=1, z=-1),
            MixtureComponent(mean=(3.0, 0.0), cov=eye, count=1000, y=1, z=1),
            MixtureComponent(mean=(-3.0, -3.0), cov=eye, count=1000, y=-1, z=-1),
        ),
        seed=seed,
    )


def generate_mixture(config: MixtureConfig) -> LabeledData:
    """Draw every component's points on one seeded stream; deterministic per seed."""
    rng = make_rng(config.seed)
    xs, ys, zs = [], [], []
    for comp in config.components:
        if comp.count == 0:
            continue
        xs.append(gaussian_sample(rng, comp.mean, comp.cov, comp.count))
        ys.append(np.full(comp.count, comp.y, dtype=np.int64))
        zs.append(np.full(comp.count, comp.z, dtype=np.int64))
    if not xs:
        empty = np.empty(0, dtype=np.int64)
        return LabeledData(np.empty((0, config.dim)), empty, empty)
    return LabeledData(np.concatenate(xs), np.concatenate(ys), np.concatenate(zs))


def _fraction_count(frac: float, pool: int, what: str) -> int:
    f = float(frac)
    if not 0.0 <= f <= 1.0:
        raise DataError(f"{what} must be in [0, 1]; got {frac!r}")
    if f == 0.0:
        raise DataError(f"{what} = 0 would select no samples; each sample needs at least one point")
    return max(1, math.floor(f * pool))


def split_to_pu(
    data: LabeledData,
    y_label_frac: float,
    z_label_frac: float,
    seed: int,
    loyal_pool: str = "labeled",
) -> tuple[PuTriple, LabeledData]:
    """Partially label a fully labeled sample into the three training sets.

    A seeded uniform subset of the interest-positive rows (fraction
    ``y_label_frac``, floor rounding, minimum 1) becomes the
    interest-positive sample.  Of those labeled rows that are also
    loyalty-positive, a fraction ``z_label_frac`` becomes the
    loyalty-positive sample (``loyal_pool="all"`` draws from every
    loyalty-positive row instead).  The unlabeled sample is the full
    feature matrix, since it represents the marginal distribution.  Rows
    with y = -1 are never labeled.

    Returns the triple plus the input sample itself, whose withheld labels
    serve ground-truth evaluation.
    """
    if loyal_pool not in ("labeled", "all"):
        raise DataError(f"loyal_pool must be 'labeled' or 'all'; got {loyal_pool!r}")
    if len(data) == 0:
        raise DataError("cannot split an empty sample")
    rng = make_rng(seed)
    interest_idx = np.flatnonzero(data.y == 1)
    if interest_idx.size == 0:
        raise DataError("no interest-positive rows to label")
    j = _fraction_count(y_label_frac, interest_idx.size, "y_label_frac")
    labeled_y = rng.permutation(interest_idx)[:j]
    if loyal_pool == "labeled":
        pool = labeled_y[data.z[labeled_y] == 1]
    else:
        pool = np.flatnonzero((data.y == 1) & (data.z == 1))
    if pool.size == 0:
        raise DataError("no loyalty-positive rows available to label")
    l = _fraction_count(z_label_frac, pool.size, "z_label_frac")
    labeled_z = rng.permutation(pool)[:l]
    triple = PuTriple(data.x[labeled_y], data.x, data.x[labeled_z])
    return triple, data


def train_test_split(data: LabeledData, test_frac: float, seed: int) -> tuple[LabeledData, LabeledData]:
    """Seeded disjoint split; the test part gets floor(test_frac * n) rows."""
    f = float(test_frac)
    if not 0.0 < f < 1.0:
        raise DataError(f"test_frac must be in (0, 1); got {test_frac!r}")
    n = len(data)
    n_test = math.floor(f * n)
    if n_test < 1 or n - n_test < 1:
        raise DataError(f"split of {n} rows at test_frac={f} leaves an empty side")
    perm = make_rng(seed).permutation(n)
    return data.subset(perm[n_test:]), data.subset(perm[:n_test])


def _filter_mask(data: LabeledData, spec, indices: np.ndarray) -> np.ndarray:
    if callable(spec):
        mask = np.asarray(spec(data.y[indices], data.z[indices]), dtype=bool)
        if mask.shape != indices.shape:
            raise DataError("filter callable must return one flag per row")
        return mask
    if spec == "all":
        return np.ones(indices.size, dtype=bool)
    if spec == "y=+1":
        return data.y[indices] == 1
    if spec == "y=+1,z=+1":
        return (data.y[indices] == 1) & (data.z[indices] == 1)
    raise DataError(f"unknown filter {spec!r}; expected one of {SPLIT_FILTERS} or a callable")


def three_way_split(data: LabeledData, fracs, filters, seed: int) -> PuTriple:
    """Partition rows into three seeded chunks and filter each one.

    ``fracs`` gives the chunk sizes as fractions of ``data`` (floor
    rounding, minimum 1, sum at most 1); ``filters`` names the rows each
    chunk keeps (one of ``SPLIT_FILTERS`` or a callable on (y, z)).  The
    surviving features become the positive-interest, unlabeled, and
    positive-loyal samples, in that order.
    """
    fracs = tuple(float(f) for f in fracs)
    filters = tuple(filters)
    if len(fracs) != 3 or len(filters) != 3:
        raise DataError("three_way_split needs exactly three fractions and three filters")
    if any(not 0.0 < f <= 1.0 for f in fracs):
        raise DataError(f"split fractions must be in (0, 1]; got {fracs}")
    if sum(fracs) > 1.0 + 1e-9:
        raise DataError(f"split fractions must sum to at most 1; got {fracs}")
    n = len(data)
    counts = [max(1, math.floor(f * n)) for f in fracs]
    if sum(counts) > n:
        raise DataError(f"cannot cut {counts} rows from {n}")
    perm = make_rng(seed).permutation(n)
    names = ("positive_interest", "unlabeled", "positive_loyal")
    parts = []
    start = 0
    for count, filt, name in zip(counts, filters, names):
        chunk = perm[start:start + count]
        start += count
        kept = chunk[_filter_mask(data, filt, chunk)]
        if kept.size == 0:
            raise DataError(f"three-way split left the {name} sample empty (filter {filt!r})")
        parts.append(data.x[kept])
    return PuTriple(*parts)


def empirical_priors(data: LabeledData) -> ClassPriors:
    """Label frequencies beta = #(y=+1)/n and gamma = #(y=+1, z=+1)/n."""
    n = len(data)
    if n == 0:
        raise DataError("cannot estimate priors from an empty sample")
    beta = int(np.sum(data.y == 1)) / n
    gamma = int(np.sum((data.y == 1) & (data.z == 1))) / n
    return ClassPriors(beta, gamma)


def _format_row(values) -> str:
    return ",".join(format(v, ".17g") for v in values)


def save_csv(path, data, comment: str | None = None) -> None:
    """Write a feature matrix or a :class:`LabeledData` sample to CSV.

    Features are written with 17 significant digits so a save/load round
    trip is exact; labels are written as -1/1.
    """
    lines = []
    if comment:
        lines.extend("# " + part for part in comment.splitlines())
    if isinstance(data, LabeledData):
        d = data.dim
        lines.append(",".join([f"f{i}" for i in range(d)] + ["y", "z"]))
        for row, y, z in zip(data.x, data.y, data.z):
            lines.append(_format_row(row) + f",{y:d},{z:d}")
    else:
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise DataError("expected a 2-d feature matrix or a LabeledData sample")
        lines.append(",".join(f"f{i}" for i in range(arr.shape[1])))
        for row in arr:
            lines.append(_format_row(row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_label(token: str, name: str, path, lineno: int) -> int:
    try:
        value = float(token)
    except ValueError:
        raise DataError(f"{path}: line {lineno}: label {name} must be -1 or +1, got {token!r}") from None
    if value not in (-1.0, 1.0):
        raise DataError(f"{path}: line {lineno}: label {name} must be -1 or +1, got {token!r}")
    return int(value)


def load_csv(path, schema: str = FULLY_LABELED):
    """Read a CSV written by :func:`save_csv`.

    ``schema=FEATURES_ONLY`` expects columns f0..f{d-1} and returns a
    feature matrix; ``schema=FULLY_LABELED`` additionally expects y and z
    columns and returns :class:`LabeledData`.  Malformed rows raise with
    their line number.
    """
    if schema not in (FEATURES_ONLY, FULLY_LABELED):
        raise DataError(f"unknown schema {schema!r}; expected {FEATURES_ONLY!r} or {FULLY_LABELED!r}")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = []
    header = None
    header_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = [name.strip() for name in line.split(",")]
            header_line = lineno
        else:
            rows.append((lineno, line.split(",")))
    if header is None:
        raise DataError(f"{path}: empty file (no header row)")

    labeled = schema == FULLY_LABELED
    n_label_cols = 2 if labeled else 0
    d = len(header) - n_label_cols
    expected = [f"f{i}" for i in range(d)] + (["y", "z"] if labeled else [])
    if d < 1 or header != expected:
        raise DataError(
            f"{path}: line {header_line}: expected header {','.join(expected) if d >= 1 else 'f0,...'}"
            f" for schema {schema!r}, got {','.join(header)!r}"
        )
    if not rows:
        raise DataError(f"{path}: no data rows")

    features = np.empty((len(rows), d))
    ys = np.empty(len(rows), dtype=np.int64)
    zs = np.empty(len(rows), dtype=np.int64)
    for i, (lineno, tokens) in enumerate(rows):
        if len(tokens) != len(header):
            raise DataError(f"{path}: line {lineno}: expected {len(header)} columns, got {len(tokens)}")
        for jcol in range(d):
            try:
                features[i, jcol] = float(tokens[jcol])
            except ValueError:
                raise DataError(
                    f"{path}: line {lineno}: column f{jcol} is not numeric: {tokens[jcol]!r}"
                ) from None
        if labeled:
            ys[i] = _parse_label(tokens[d], "y", path, lineno)
            zs[i] = _parse_label(tokens[d + 1], "z", path, lineno)
    if not np.all(np.isfinite(features)):
        raise DataError(f"{path}: features contain non-finite values")
    if labeled:
        return LabeledData(features, ys, zs)
    return features

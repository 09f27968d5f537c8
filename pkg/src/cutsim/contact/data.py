"""Sensor log ingestion, preprocessing, relabeling, and train/test splits.

A replicate is one recorded cutting action: timestamps at a nominal 100 Hz,
ten sensor features (proximity plus accelerometer/gyroscope/magnetometer
x/y/z), and the binary contact button.  CSV files carry replicate metadata in
a '#'-prefixed preamble.

Three split protocols are supported:

- swt: within each cut type, pooled samples split at random (superficial)
- rwt: within each cut type, whole replicates assigned to train or test,
  so test replicates are entirely unseen pieces of meat
- sat: all cut types pooled, then split at random
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FEATURE_NAMES",
    "CUT_TYPES",
    "ParseError",
    "IntegrityError",
    "InfeasibleSplitError",
    "Replicate",
    "SampleSet",
    "SplitScheme",
    "parse_replicate_csv",
    "replicate_to_csv",
    "ingest_replicates",
    "preprocess",
    "label_approaching",
    "build_split",
]

FEATURE_NAMES = ("proximity", "ax", "ay", "az", "gx", "gy", "gz", "mx", "my", "mz")
CSV_HEADER = "t_ms," + ",".join(FEATURE_NAMES) + ",contact"
CUT_TYPES = ("slicing", "trimming", "cubing")
NOMINAL_PERIOD_MS = 10.0


class ParseError(ValueError):
    """Malformed sensor CSV content."""


class IntegrityError(ValueError):
    """Timestamps are not a plausible 100 Hz stream."""


class InfeasibleSplitError(ValueError):
    """Too few replicates for a by-replicate split."""


@dataclass
class Replicate:
    """One cutting action's sensor stream."""

    id: str
    cut_type: str
    t_ms: np.ndarray
    features: np.ndarray
    contact: np.ndarray

    def __post_init__(self):
        self.t_ms = np.asarray(self.t_ms, float)
        self.features = np.asarray(self.features, float)
        self.contact = np.asarray(self.contact, np.uint8)
        n = len(self.t_ms)
        if self.features.shape != (n, len(FEATURE_NAMES)):
            raise ValueError(f"features must be ({n}, 10), got {self.features.shape}")
        if self.contact.shape != (n,):
            raise ValueError("contact column length mismatch")
        if not np.isin(self.contact, (0, 1)).all():
            raise ValueError("contact must be binary")
        if n > 1 and not (np.diff(self.t_ms) > 0).all():
            raise IntegrityError(f"replicate {self.id}: timestamps not strictly increasing")

    def __len__(self):
        return len(self.t_ms)


@dataclass
class SampleSet:
    """Pooled samples ready for training or evaluation."""

    X: np.ndarray
    y: np.ndarray
    replicate_ids: np.ndarray
    cut_types: np.ndarray

    def __len__(self):
        return len(self.y)


@dataclass(frozen=True)
class SplitScheme:
    kind: str  # "swt" | "rwt" | "sat"
    train_fraction: float = 0.6
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("swt", "rwt", "sat"):
            raise ValueError(f"unknown split kind {self.kind!r}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")


# --- CSV ---------------------------------------------------------------------

def parse_replicate_csv(text: str, source: str = "<string>") -> Replicate:
    meta = {}
    rows = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition("=")
            if sep:
                meta[key.strip()] = value.strip()
            continue
        if not header_seen:
            if line != CSV_HEADER:
                raise ParseError(f"{source} line {lineno}: expected header {CSV_HEADER!r}")
            header_seen = True
            continue
        fields = line.split(",")
        if len(fields) != 12:
            raise ParseError(f"{source} line {lineno}: expected 12 fields, got {len(fields)}")
        try:
            values = [float(v) for v in fields]
        except ValueError as exc:
            raise ParseError(f"{source} line {lineno}: {exc}") from None
        if values[-1] not in (0.0, 1.0):
            raise ParseError(f"{source} line {lineno}: contact must be 0 or 1")
        rows.append(values)
    if not header_seen:
        raise ParseError(f"{source}: missing header line")
    if "id" not in meta or "cut_type" not in meta:
        raise ParseError(f"{source}: preamble must declare id and cut_type")
    if meta["cut_type"] not in CUT_TYPES:
        raise ParseError(f"{source}: unknown cut_type {meta['cut_type']!r}")
    arr = np.array(rows, float)
    if arr.size == 0:
        raise ParseError(f"{source}: no samples")
    return Replicate(meta["id"], meta["cut_type"], arr[:, 0], arr[:, 1:11], arr[:, 11])


def replicate_to_csv(rep: Replicate) -> str:
    lines = [f"# id={rep.id}", f"# cut_type={rep.cut_type}", CSV_HEADER]
    for t, feats, c in zip(rep.t_ms, rep.features, rep.contact):
        lines.append(",".join([repr(float(t))] + [repr(float(v)) for v in feats] + [str(int(c))]))
    return "\n".join(lines) + "\n"


def ingest_replicates(paths, period_tolerance_ms: float = 5.0) -> list[Replicate]:
    """Parse and timestamp-validate sensor CSV files.

    Sample periods must stay within the jitter tolerance of the nominal
    10 ms; violations raise IntegrityError.
    """
    replicates = []
    for path in paths:
        with open(path) as f:
            rep = parse_replicate_csv(f.read(), source=str(path))
        if len(rep) > 1:
            periods = np.diff(rep.t_ms)
            if (np.abs(periods - NOMINAL_PERIOD_MS) > period_tolerance_ms).any():
                raise IntegrityError(
                    f"{path}: sample periods outside {NOMINAL_PERIOD_MS}±{period_tolerance_ms} ms"
                )
        replicates.append(rep)
    return replicates


# --- preprocessing -----------------------------------------------------------

def preprocess(replicates, z_cutoff: float = 5.0):
    """Center and standardize each feature per replicate; drop outlier samples.

    Standardization statistics come from the full replicate; samples with any
    feature beyond `z_cutoff` standard deviations are then removed as
    presumed sensor errors.  Returns (new_replicates, removed_counts).
    """
    if not replicates:
        raise ValueError("no replicates to preprocess")
    out = []
    removed: dict[str, int] = {}
    for rep in replicates:
        mu = rep.features.mean(axis=0)
        sd = rep.features.std(axis=0)
        flat = sd == 0
        if flat.any():
            names = [FEATURE_NAMES[i] for i in np.nonzero(flat)[0]]
            warnings.warn(
                f"replicate {rep.id}: zero-variance feature(s) {names}; left centered only"
            )
        scale = np.where(flat, 1.0, sd)
        z = (rep.features - mu) / scale
        keep = (np.abs(z) <= z_cutoff).all(axis=1)
        removed[rep.id] = int((~keep).sum())
        out.append(Replicate(rep.id, rep.cut_type, rep.t_ms[keep], z[keep], rep.contact[keep]))
    return out, removed


def label_approaching(rep: Replicate, window_ms: tuple[float, float] = (10.0, 100.0)) -> Replicate:
    """Relabel a replicate for the approaching-contact task.

    A contact onset is a 0 -> 1 transition of the button.  Samples during
    contact are dropped; a remaining sample is positive iff an onset occurs
    between `window_ms[0]` and `window_ms[1]` milliseconds after it
    (inclusive on both ends).
    """
    lo, hi = window_ms
    c = rep.contact
    onset_idx = np.nonzero((c[1:] == 1) & (c[:-1] == 0))[0] + 1
    onset_t = rep.t_ms[onset_idx]
    keep = c == 0
    t = rep.t_ms[keep]
    labels = np.zeros(len(t), np.uint8)
    for t_on in onset_t:
        labels[(t >= t_on - hi) & (t <= t_on - lo)] = 1
    return Replicate(rep.id, rep.cut_type, t, rep.features[keep], labels)


# --- splits ------------------------------------------------------------------

def _pool(replicates) -> SampleSet:
    return SampleSet(
        np.concatenate([r.features for r in replicates]),
        np.concatenate([r.contact for r in replicates]).astype(np.uint8),
        np.concatenate([np.full(len(r), r.id, dtype=object) for r in replicates]),
        np.concatenate([np.full(len(r), r.cut_type, dtype=object) for r in replicates]),
    )


def _take(s: SampleSet, idx: np.ndarray) -> SampleSet:
    return SampleSet(s.X[idx], s.y[idx], s.replicate_ids[idx], s.cut_types[idx])


def _split_samples(pooled: SampleSet, fraction: float, rng) -> tuple[np.ndarray, np.ndarray]:
    perm = rng.permutation(len(pooled))
    n_train = int(round(fraction * len(pooled)))
    return perm[:n_train], perm[n_train:]


def _concat(sets: list[SampleSet]) -> SampleSet:
    return SampleSet(
        np.concatenate([s.X for s in sets]),
        np.concatenate([s.y for s in sets]),
        np.concatenate([s.replicate_ids for s in sets]),
        np.concatenate([s.cut_types for s in sets]),
    )


def build_split(replicates, scheme: SplitScheme) -> tuple[SampleSet, SampleSet]:
    """Partition replicates into train and test sets under a protocol.

    The partition is disjoint and exhaustive and deterministic under the
    scheme's seed.  For rwt, every cut type needs at least two replicates.
    """
    replicates = list(replicates)
    if not replicates:
        raise ValueError("no replicates to split")
    rng = np.random.default_rng(scheme.seed)
    present_types = [t for t in CUT_TYPES if any(r.cut_type == t for r in replicates)]

    if scheme.kind == "sat":
        pooled = _pool(replicates)
        tr, te = _split_samples(pooled, scheme.train_fraction, rng)
        return _take(pooled, tr), _take(pooled, te)

    train_parts, test_parts = [], []
    for cut_type in present_types:
        group = [r for r in replicates if r.cut_type == cut_type]
        if scheme.kind == "swt":
            pooled = _pool(group)
            tr, te = _split_samples(pooled, scheme.train_fraction, rng)
            train_parts.append(_take(pooled, tr))
            test_parts.append(_take(pooled, te))
        else:  # rwt
            if len(group) < 2:
                raise InfeasibleSplitError(
                    f"rwt needs >= 2 replicates per cut type, {cut_type} has {len(group)}"
                )
            order = rng.permutation(len(group))
            n_train = int(round(scheme.train_fraction * len(group)))
            n_train = min(max(n_train, 1), len(group) - 1)
            train_parts.append(_pool([group[i] for i in order[:n_train]]))
            test_parts.append(_pool([group[i] for i in order[n_train:]]))
    return _concat(train_parts), _concat(test_parts)

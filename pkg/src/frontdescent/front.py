"""Dominance relations and the mutually nondominated solution set."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from typing import Iterable, List, Optional

import numpy as np

__all__ = [
    "Dominance",
    "FrontEntry",
    "FrontSet",
    "compare",
    "insert_filter",
    "is_stable",
    "crowding_prune",
    "write_front_csv",
    "read_front_csv",
]

SCHEMA_HEADER = "# fd-schema v1"


class Dominance(enum.Enum):
    DOMINATES_STRICTLY = "dominates_strictly"
    DOMINATES = "dominates"
    EQUAL = "equal"
    DOMINATED = "dominated"
    INCOMPARABLE = "incomparable"


def compare(u: np.ndarray, v: np.ndarray) -> Dominance:
    """Classify the partial-order relation between two objective vectors."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    if np.array_equal(u, v):
        return Dominance.EQUAL
    if np.all(u < v):
        return Dominance.DOMINATES_STRICTLY
    if np.all(u <= v):
        return Dominance.DOMINATES
    if np.all(v <= u):
        return Dominance.DOMINATED
    return Dominance.INCOMPARABLE


@dataclass
class FrontEntry:
    """A decision point with its cached image and bookkeeping.

    ``provenance`` is "initial", "refinement" or "exploration(I)" with I the
    1-based objective subset that generated the point.
    """

    x: np.ndarray
    fx: np.ndarray
    provenance: str = "initial"
    cached_theta: Optional[float] = None
    cached_v_norm: Optional[float] = None
    cached_J: Optional[np.ndarray] = None
    cached_v: Optional[np.ndarray] = None
    # carried across refinements of the same point: (previous x, previous Jacobian)
    bb_history: Optional[tuple] = None

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.fx = np.asarray(self.fx, dtype=float)


class FrontSet:
    """Ordered collection of mutually nondominated entries.

    A cached image matrix is kept in sync with the entry list so dominance
    filtering and spacing checks are vectorized linear scans.
    """

    def __init__(self, entries: Iterable[FrontEntry] = ()):
        self.entries: List[FrontEntry] = list(entries)
        self._ids = {id(e) for e in self.entries}
        self._image_cache: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __contains__(self, entry: FrontEntry) -> bool:
        return id(entry) in self._ids

    def images(self) -> np.ndarray:
        # entries are never mutated after construction, so the stack is cached
        if self._image_cache is None:
            if not self.entries:
                return np.empty((0, 0))
            self._image_cache = np.stack([e.fx for e in self.entries])
        return self._image_cache

    def points(self) -> np.ndarray:
        if not self.entries:
            return np.empty((0, 0))
        return np.stack([e.x for e in self.entries])

    def copy(self) -> "FrontSet":
        return FrontSet(self.entries)


def is_stable(front: FrontSet) -> bool:
    """True iff no entry's image dominates (<=, with one strict) another's."""
    k = len(front)
    if k <= 1:
        return True
    F = front.images()
    for i in range(k):
        le = np.all(F <= F[i], axis=1)
        neq = np.any(F != F[i], axis=1)
        dominators = le & neq
        dominators[i] = False
        if dominators.any():
            return False
    return True


def insert_filter(front: FrontSet, z: FrontEntry) -> FrontSet:
    """Insert z, removing entries it dominates.

    A candidate dominated by (or with image equal to) an existing entry is
    rejected and the front is returned unchanged, which keeps stability a hard
    invariant under floating point.
    """
    if not front.entries:
        return FrontSet([z])
    F = front.images()
    fz = z.fx
    # z dominated by or equal to an incumbent -> reject
    le = np.all(F <= fz, axis=1)
    if le.any():
        eq = np.all(F == fz, axis=1)
        if (le & ~eq).any() or eq.any():
            return front
    # drop entries dominated by z
    removes = np.all(fz <= F, axis=1) & np.any(fz != F, axis=1)
    kept = [e for e, r in zip(front.entries, removes) if not r]
    kept.append(z)
    return FrontSet(kept)


def crowding_prune(front: FrontSet, min_image_gap: np.ndarray) -> FrontSet:
    """Thin out entries whose image sits within a per-objective gap of a
    retained neighbor (infinity norm after dividing by the gap vector).

    Extreme entries per objective are always retained. A nonpositive gap is
    the identity.
    """
    gap = np.asarray(min_image_gap, dtype=float)
    if len(front) <= 2 or np.all(gap <= 0):
        return front
    F = front.images()
    m = F.shape[1]
    gap = np.broadcast_to(gap, (m,)).copy()
    gap[gap <= 0] = np.inf  # objective with zero gap never triggers removal
    keep_idx = set()
    for j in range(m):
        keep_idx.add(int(np.argmin(F[:, j])))
        keep_idx.add(int(np.argmax(F[:, j])))
    retained: List[int] = sorted(keep_idx)
    kept_images = F[retained]
    out = []
    for i, entry in enumerate(front.entries):
        if i in keep_idx:
            out.append(entry)
            continue
        dist = np.max(np.abs(kept_images - F[i]) / gap, axis=1)
        if np.min(dist) < 1.0:
            continue
        out.append(entry)
        kept_images = np.vstack([kept_images, F[i]])
    return FrontSet(out)


def write_front_csv(front: FrontSet, path, n: int, m: int) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(SCHEMA_HEADER + "\n")
        writer = csv.writer(fh)
        writer.writerow(
            [f"x_{i + 1}" for i in range(n)]
            + [f"f_{j + 1}" for j in range(m)]
            + ["provenance"]
        )
        for e in front.entries:
            writer.writerow(
                [repr(float(v)) for v in e.x]
                + [repr(float(v)) for v in e.fx]
                + [e.provenance]
            )


def read_front_csv(path) -> FrontSet:
    entries = []
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            fh.seek(0)
        reader = csv.reader(fh)
        header = next(reader)
        nx = sum(1 for c in header if c.startswith("x_"))
        nf = sum(1 for c in header if c.startswith("f_"))
        for row in reader:
            x = np.array([float(v) for v in row[:nx]])
            fx = np.array([float(v) for v in row[nx:nx + nf]])
            prov = row[nx + nf] if len(row) > nx + nf else "initial"
            entries.append(FrontEntry(x=x, fx=fx, provenance=prov))
    return FrontSet(entries)


def read_images_csv(path) -> np.ndarray:
    """Read only the f_1..f_m columns of a front CSV (external solver import)."""
    rows = []
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            fh.seek(0)
        reader = csv.reader(fh)
        header = next(reader)
        f_cols = [i for i, c in enumerate(header) if c.startswith("f_")]
        if not f_cols:
            raise ValueError(f"{path}: no f_* columns found")
        for row in reader:
            rows.append([float(row[i]) for i in f_cols])
    return np.asarray(rows, dtype=float)

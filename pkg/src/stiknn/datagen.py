"""Synthetic datasets, label/imbalance transforms, dataset CSV I/O and OpenML ingestion.

Every random draw uses ``numpy.random.default_rng(seed)`` (PCG64), so all
generators are pure functions of their arguments and seed.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from pathlib import Path

import numpy as np

from .core import Dataset

logger = logging.getLogger(__name__)

OPENML_API = "https://www.openml.org/api/v1/json"
CACHE_ENV = "STI_CACHE_DIR"


class DatasetFormatError(ValueError):
    """Malformed dataset CSV; the message carries the offending line number."""


class OpenMLError(RuntimeError):
    """Download, API or conversion failure while ingesting an OpenML dataset."""


def make_circles(n_per_class: int, factor: float = 0.5, noise_std: float = 0.1,
                 seed: int = 0) -> Dataset:
    """Two concentric circles: class 0 at radius 1, class 1 at radius ``factor``.

    Angles are evenly spaced over ``[0, 2*pi)``; isotropic Gaussian noise is the
    only random element.
    """
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    if not 0.0 < factor < 1.0:
        raise ValueError(f"factor must lie in (0, 1), got {factor}")
    if noise_std < 0:
        raise ValueError("noise_std must be >= 0")
    theta = np.linspace(0.0, 2.0 * np.pi, n_per_class, endpoint=False)
    ring = np.column_stack([np.cos(theta), np.sin(theta)])
    X = np.vstack([ring, factor * ring])
    y = np.repeat([0, 1], n_per_class)
    X = X + np.random.default_rng(seed).normal(scale=noise_std, size=X.shape)
    return Dataset(X, y)


def make_moons(n_per_class: int, noise_std: float = 0.1, seed: int = 0) -> Dataset:
    """Two interleaving half circles, angles evenly spaced over ``[0, pi]``."""
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    if noise_std < 0:
        raise ValueError("noise_std must be >= 0")
    theta = np.linspace(0.0, np.pi, n_per_class)
    upper = np.column_stack([np.cos(theta), np.sin(theta)])
    lower = np.column_stack([1.0 - np.cos(theta), 0.5 - np.sin(theta)])
    X = np.vstack([upper, lower])
    y = np.repeat([0, 1], n_per_class)
    X = X + np.random.default_rng(seed).normal(scale=noise_std, size=X.shape)
    return Dataset(X, y)


def inject_label_noise(dataset: Dataset, fraction: float, seed: int = 0) -> tuple[Dataset, list[int]]:
    """Flip ``floor(fraction * n)`` labels to a different class chosen uniformly.

    Returns:
        The noisy dataset and the sorted list of flipped indices.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must lie in [0, 1], got {fraction}")
    classes = dataset.classes()
    if len(classes) < 2:
        raise ValueError("label noise needs at least two classes")
    rng = np.random.default_rng(seed)
    count = math.floor(fraction * dataset.n)
    flipped = np.sort(rng.choice(dataset.n, size=count, replace=False))
    labels = dataset.labels.copy()
    for i in flipped:
        others = [c for c in classes if c != labels[i]]
        labels[i] = others[rng.integers(len(others))]
    return dataset.with_labels(labels), [int(i) for i in flipped]


def subsample_class(dataset: Dataset, label, keep_fraction: float, seed: int = 0) -> Dataset:
    """Keep a seeded uniform ``floor(keep_fraction * m)`` of the ``m`` members of one class."""
    if not 0.0 <= keep_fraction <= 1.0:
        raise ValueError(f"keep_fraction must lie in [0, 1], got {keep_fraction}")
    members = np.flatnonzero(dataset.labels == label)
    if members.size == 0:
        raise ValueError(f"unknown class {label!r}")
    keep = np.random.default_rng(seed).choice(
        members, size=math.floor(keep_fraction * members.size), replace=False
    )
    mask = dataset.labels != label
    mask[keep] = True
    return dataset.subset(np.flatnonzero(mask))


def train_test_split(dataset: Dataset, test_fraction: float = 0.2,
                     seed: int = 0) -> tuple[Dataset, Dataset]:
    """Seeded shuffle followed by a ``(1 - test_fraction) / test_fraction`` split."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must lie in (0, 1)")
    perm = np.random.default_rng(seed).permutation(dataset.n)
    n_test = max(1, int(round(test_fraction * dataset.n)))
    if n_test >= dataset.n:
        raise ValueError("split leaves no training points")
    train = dataset.subset(perm[n_test:])
    test = dataset.subset(perm[:n_test])
    return Dataset(train.X, train.labels, "train"), Dataset(test.X, test.labels, "test")


def write_csv(dataset: Dataset, path) -> None:
    """Write ``x1,...,xd,label`` rows; floats use the shortest round-trip repr."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x{c + 1}" for c in range(dataset.dim)] + ["label"])
        for x, label in zip(dataset.X, dataset.labels):
            token = str(label)
            if "," in token or "\n" in token:
                raise ValueError(f"label {token!r} cannot be written (contains a comma or newline)")
            writer.writerow([repr(float(v)) for v in x] + [token])


def read_csv(path, role: str = "train") -> Dataset:
    """Read a dataset CSV written by :func:`write_csv` (or by hand in the same format)."""
    with open(path, newline="", encoding="utf-8") as fh:
        return _parse_csv(fh, role, str(path))


def _parse_csv(fh, role: str, name: str) -> Dataset:
    rows = csv.reader(fh)
    header = next(rows, None)
    if header is None or not any(cell.strip() for cell in header):
        raise DatasetFormatError(f"{name}: empty file")
    header = [h.strip() for h in header]
    if len(header) < 2 or header[-1] != "label":
        raise DatasetFormatError(f"{name}:1: header must be x1,...,xd,label, got {','.join(header)}")
    width = len(header)
    feats, labels = [], []
    for line_no, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != width:
            raise DatasetFormatError(f"{name}:{line_no}: expected {width} fields, got {len(row)}")
        try:
            values = [float(cell) for cell in row[:-1]]
        except ValueError:
            raise DatasetFormatError(f"{name}:{line_no}: non-numeric feature in {row[:-1]}") from None
        if not all(math.isfinite(v) for v in values):
            raise DatasetFormatError(f"{name}:{line_no}: non-finite feature value")
        if row[-1].strip() == "":
            raise DatasetFormatError(f"{name}:{line_no}: missing label")
        feats.append(values)
        labels.append(row[-1].strip())
    if not feats:
        raise DatasetFormatError(f"{name}: no data rows")
    return Dataset(np.array(feats, dtype=np.float64), np.array(labels), role)


def default_cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "stiknn")


def _http_get(url: str, timeout: float = 60.0) -> bytes:
    import requests

    try:
        resp = requests.get(url, timeout=timeout)
    except requests.RequestException as exc:
        raise OpenMLError(f"network error fetching {url}: {exc}") from exc
    if resp.status_code != 200:
        detail = resp.text[:300].strip()
        raise OpenMLError(f"OpenML request {url} failed with HTTP {resp.status_code}: {detail}")
    return resp.content


def fetch_openml(dataset_id: int, cache_dir=None) -> Dataset:
    """Load OpenML dataset ``dataset_id`` as numeric features plus its nominal target.

    The first call downloads the description, feature list and ARFF file and
    writes ``<cache_dir>/openml/<id>/data.csv``; later calls read only that file.
    ``cache_dir`` defaults to ``$STI_CACHE_DIR`` or ``~/.cache/stiknn``.

    Raises:
        OpenMLError: network/API failure with a cold cache, or features that are
            not numeric (nominal features are rejected, never encoded).
    """
    from filelock import FileLock

    root = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    folder = root / "openml" / str(int(dataset_id))
    target = folder / "data.csv"
    if target.exists():
        return read_csv(target)
    folder.mkdir(parents=True, exist_ok=True)
    with FileLock(str(folder / ".lock")):
        if target.exists():
            return read_csv(target)
        logger.info("downloading OpenML dataset %s", dataset_id)
        dataset = _download_openml(int(dataset_id))
        tmp = folder / "data.csv.part"
        write_csv(dataset, tmp)
        os.replace(tmp, target)
    return read_csv(target)


def _download_openml(dataset_id: int) -> Dataset:
    desc = json.loads(_http_get(f"{OPENML_API}/data/{dataset_id}"))
    try:
        info = desc["data_set_description"]
    except (KeyError, TypeError):
        raise OpenMLError(f"unexpected OpenML description for dataset {dataset_id}: {desc!r:.200}")
    target_name = info.get("default_target_attribute")
    if not target_name or "," in target_name:
        raise OpenMLError(f"dataset {dataset_id} has no single default target attribute")
    feats = json.loads(_http_get(f"{OPENML_API}/data/features/{dataset_id}"))
    features = feats["data_features"]["feature"]
    used, bad = [], []
    for f in features:
        if f["name"] == target_name or _truthy(f.get("is_ignore")) or _truthy(f.get("is_row_identifier")):
            continue
        (used if f["data_type"] == "numeric" else bad).append(f["name"])
    if bad:
        raise OpenMLError(f"dataset {dataset_id} has non-numeric feature columns: {', '.join(bad)}")
    arff_text = _http_get(info["url"]).decode("utf-8")
    return arff_to_dataset(arff_text, used, target_name)


def _truthy(flag) -> bool:
    return str(flag).lower() == "true"


def arff_to_dataset(arff_text: str, feature_names: list[str], target_name: str) -> Dataset:
    """Convert dense ARFF text to a Dataset using the named numeric features and target."""
    from scipy.io import arff

    try:
        data, meta = arff.loadarff(io.StringIO(arff_text))
    except Exception as exc:  # scipy raises several parser exception types
        raise OpenMLError(f"cannot parse ARFF: {exc}") from exc
    names = meta.names()
    missing = [c for c in feature_names + [target_name] if c not in names]
    if missing:
        raise OpenMLError(f"ARFF lacks columns: {', '.join(missing)}")
    if not feature_names:
        raise OpenMLError("dataset has no usable numeric features")
    if meta[target_name][0] != "nominal":
        raise OpenMLError(f"target {target_name!r} is not nominal")
    X = np.column_stack([np.asarray(data[c], dtype=np.float64) for c in feature_names])
    if not np.all(np.isfinite(X)):
        raise OpenMLError("dataset has missing or non-finite feature values")
    y = [v.decode() if isinstance(v, bytes) else str(v) for v in data[target_name]]
    if any(v == "?" for v in y):
        raise OpenMLError("dataset has missing target values")
    return Dataset(X, np.array(y))

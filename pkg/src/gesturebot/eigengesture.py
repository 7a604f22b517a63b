"""Snapshot-PCA training over binary gesture templates and 1-NN matching.

Templates are 60x80 binary silhouettes vectorized as real 0/1 values.
Principal components come from the n x n Gram matrix of the centered
template stack (n = template count), so dimensionality never touches the
4800 x 4800 covariance.  Classification is nearest template by Euclidean
distance in eigenspace, with distances above the rejection threshold tau
reported as Unknown.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyTemplateSet, GeometryMismatch, MalformedHeader
from .raster import BinFrame, decode_pbm, encode_pbm

TEMPLATE_WIDTH = 60
TEMPLATE_HEIGHT = 80

UNKNOWN = None  # classification label for rejected probes

_RANK_EPS = 1e-10


@dataclass(frozen=True)
class GestureTemplate:
    label: int
    image: BinFrame
    name: str = ""

    def __post_init__(self):
        if not (0 <= self.label <= 254):
            raise ValueError("label must be in 0..254")


@dataclass(frozen=True)
class Classification:
    label: int | None  # None = Unknown
    distance: float
    frame_seq: int = 0


@dataclass(frozen=True)
class EigenModel:
    geometry: tuple[int, int]  # (width, height)
    mean: np.ndarray  # (d,)
    components: np.ndarray  # (k, d), orthonormal rows
    eigenvalues: np.ndarray  # (k,), non-increasing
    coords: np.ndarray  # (n, k)
    labels: tuple[int, ...]  # (n,)
    names: tuple[str, ...]
    tau: float

    @property
    def k(self) -> int:
        return self.components.shape[0]

    @property
    def n_templates(self) -> int:
        return len(self.labels)


def _vectorize(image: BinFrame, geometry: tuple[int, int]) -> np.ndarray:
    if (image.width, image.height) != geometry:
        raise GeometryMismatch(
            f"image is {image.width}x{image.height}, expected {geometry[0]}x{geometry[1]}"
        )
    return image.bits.reshape(-1).astype(np.float64)


def _fix_signs(components: np.ndarray) -> np.ndarray:
    """Deterministic sign convention: largest-magnitude entry positive
    (first such entry on ties)."""
    out = components.copy()
    for i in range(out.shape[0]):
        idx = int(np.argmax(np.abs(out[i])))
        if out[i, idx] < 0:
            out[i] = -out[i]
    return out


def default_tau(coords: np.ndarray, labels: tuple[int, ...]) -> float:
    """Half the minimum eigenspace distance between differently labeled
    templates; infinity when only one label is present."""
    n = len(labels)
    best = math.inf
    for i in range(n):
        for j in range(i + 1, n):
            if labels[i] != labels[j]:
                d = float(np.linalg.norm(coords[i] - coords[j]))
                best = min(best, d)
    return 0.5 * best if math.isfinite(best) else math.inf


def train(
    templates: list[GestureTemplate],
    k_max: int = 20,
    tau_override: float | None = None,
    geometry: tuple[int, int] = (TEMPLATE_WIDTH, TEMPLATE_HEIGHT),
) -> EigenModel:
    """Fit the eigenspace model from the template set (snapshot method)."""
    if not templates:
        raise EmptyTemplateSet("need at least one template")
    x = np.stack([_vectorize(t.image, geometry) for t in templates])
    n, d = x.shape
    mean = x.mean(axis=0)
    centered = x - mean
    k = 0
    components = np.zeros((0, d))
    eigenvalues = np.zeros(0)
    if n > 1:
        gram = centered @ centered.T
        w, v = np.linalg.eigh(gram)  # ascending
        order = np.argsort(w)[::-1]
        w = w[order]
        v = v[:, order]
        w = np.maximum(w, 0.0)
        rank = int(np.sum(w >= _RANK_EPS * max(w[0], _RANK_EPS)))
        k = min(k_max, n - 1, rank)
        if k > 0:
            eigenvalues = w[:k]
            components = (centered.T @ v[:, :k]).T / np.sqrt(eigenvalues)[:, None]
            components = _fix_signs(components)
    coords = centered @ components.T
    labels = tuple(t.label for t in templates)
    names = tuple(t.name for t in templates)
    tau = tau_override if tau_override is not None else default_tau(coords, labels)
    return EigenModel(geometry, mean, components, eigenvalues, coords, labels, names, tau)


def project(model: EigenModel, image: BinFrame) -> np.ndarray:
    """Eigenspace coordinates of an image: components . (vec - mean)."""
    return model.components @ (_vectorize(image, model.geometry) - model.mean)


def classify(model: EigenModel, image: BinFrame, frame_seq: int = 0) -> Classification:
    """Nearest template in eigenspace; Unknown when beyond tau.

    Ties break toward the lowest template index; the distance is always
    reported, even for rejections.
    """
    p = project(model, image)
    if model.n_templates == 0:
        raise EmptyTemplateSet("model has no templates")
    dists = np.linalg.norm(model.coords - p, axis=1)
    best = int(np.argmin(dists))
    dist = float(dists[best])
    label = model.labels[best] if dist <= model.tau else UNKNOWN
    return Classification(label, dist, frame_seq)


def template_name(model: EigenModel, label: int) -> str:
    """Display name for a label (first template carrying it)."""
    for lab, name in zip(model.labels, model.names):
        if lab == label and name:
            return name
    return str(label)


# ---------------------------------------------------------------------------
# Persistence: a directory of PBM templates plus a JSON manifest.  The eigen
# decomposition is recomputed on load; templates are the source of truth.
# ---------------------------------------------------------------------------

MANIFEST_NAME = "model.json"


def save_model(directory: str | Path, templates: list[GestureTemplate], model: EigenModel):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    per_label: dict[int, int] = {}
    names: dict[str, str] = {}
    for t in templates:
        idx = per_label.get(t.label, 0)
        per_label[t.label] = idx + 1
        (directory / f"{t.label}_{idx}.pbm").write_bytes(encode_pbm(t.image))
        if t.name:
            names[str(t.label)] = t.name
    manifest = {
        "geometry": {"width": model.geometry[0], "height": model.geometry[1]},
        "k": model.k,
        "tau": model.tau if math.isfinite(model.tau) else None,
        "names": names,
    }
    (directory / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True))


def load_templates(directory: str | Path) -> list[GestureTemplate]:
    directory = Path(directory)
    names: dict[str, str] = {}
    manifest_path = directory / MANIFEST_NAME
    if manifest_path.exists():
        names = json.loads(manifest_path.read_text()).get("names", {})
    templates = []
    for path in sorted(directory.glob("*.pbm")):
        stem = path.stem
        try:
            label = int(stem.split("_")[0])
        except ValueError:
            raise MalformedHeader(f"template file name {path.name} lacks a label prefix")
        templates.append(
            GestureTemplate(label, decode_pbm(path.read_bytes()), names.get(str(label), ""))
        )
    if not templates:
        raise EmptyTemplateSet(f"no .pbm templates in {directory}")
    return templates


def load_model(directory: str | Path) -> tuple[list[GestureTemplate], EigenModel]:
    """Rebuild the model from a saved template directory."""
    directory = Path(directory)
    templates = load_templates(directory)
    manifest_path = directory / MANIFEST_NAME
    k_max = 20
    tau_override = None
    geometry = (TEMPLATE_WIDTH, TEMPLATE_HEIGHT)
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text())
        k_max = manifest.get("k", k_max)
        tau = manifest.get("tau")
        tau_override = math.inf if tau is None else float(tau)
        geom = manifest.get("geometry")
        if geom:
            geometry = (geom["width"], geom["height"])
    model = train(templates, k_max=k_max, tau_override=tau_override, geometry=geometry)
    return templates, model

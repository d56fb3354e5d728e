"""Checkpoints: a JSON manifest plus a binary blob of little-endian floats in manifest order.

The manifest names every ``state_dict`` entry with its shape and dtype, and carries everything needed to rebuild the
model without the training run: the model configuration, the graph, the standardizer and free-form extras such as
the dataset kind and split settings.
"""

import dataclasses
import json
import logging
import os
from typing import Any, Dict, NamedTuple, Optional

from htgnn.data.errors import DataError
from htgnn.data.scaling import Standardizer
from htgnn.graph import HeteroTemporalGraph, graph_from_json, graph_to_json
from htgnn.graph.errors import GraphError
from htgnn.nn import build_variant
from htgnn.nn.config import ModelConfig
from htgnn.nn.errors import CheckpointError, ModelError

import numpy as np

import torch
from torch import nn

logger = logging.getLogger(__name__)

PRECISIONS = {"float64": "<f8", "float32": "<f4"}
FORMAT_VERSION = 1


class Checkpoint(NamedTuple):
    """A restored model, in evaluation mode, and its companions."""

    model: nn.Module
    config: ModelConfig
    graph: HeteroTemporalGraph
    standardizer: Standardizer
    extras: Dict[str, Any]


def blob_path(path: str) -> str:
    """Return the path of the binary blob belonging to a manifest path."""
    return os.path.splitext(path)[0] + ".bin"


def _model_dtype(model: nn.Module) -> str:
    for p in model.parameters():
        if p.is_floating_point():
            return str(p.dtype).replace("torch.", "")
    return "float32"


def save_checkpoint(
    path: str,
    model: nn.Module,
    config: ModelConfig,
    graph: HeteroTemporalGraph,
    standardizer: Standardizer,
    extras: Optional[Dict[str, Any]] = None,
    precision: str = "float64",
) -> str:
    """Write a checkpoint manifest to ``path`` and its blob next to it.

    :param path: the manifest path, the blob gets the same name with a ``.bin`` suffix
    :param model: the model whose ``state_dict`` is saved
    :param config: the model configuration
    :param graph: the sensor graph the model was built on
    :param standardizer: the scaling fitted on the training split
    :param extras: JSON serialisable metadata stored as is
    :param precision: "float64", or "float32" to halve the blob
    :returns: the manifest path
    :raises: CheckpointError
    """
    if precision not in PRECISIONS:
        raise CheckpointError(f"Unknown precision '{precision}', expected one of {', '.join(PRECISIONS)}")
    entries = []
    chunks = []
    for name, tensor in model.state_dict().items():
        values = tensor.detach().cpu().to(torch.float64).numpy().ravel()
        entries.append({"name": name, "shape": list(tensor.shape), "dtype": str(tensor.dtype).replace("torch.", "")})
        chunks.append(values.astype(PRECISIONS[precision]))
    manifest = {
        "format": FORMAT_VERSION,
        "precision": precision,
        "dtype": _model_dtype(model),
        "blob": os.path.basename(blob_path(path)),
        "config": dataclasses.asdict(config),
        "graph": json.loads(graph_to_json(graph)),
        "standardizer": standardizer.to_dict(),
        "parameters": entries,
        "extras": extras or {},
    }
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    try:
        with open(blob_path(path), "wb") as f:
            for chunk in chunks:
                f.write(chunk.tobytes())
        with open(path, "w", encoding="utf-8") as f:
            json.dump(manifest, f, sort_keys=True, indent=2)
            f.write("\n")
    except (OSError, TypeError) as x:
        raise CheckpointError(f"Cannot write checkpoint {path}: {x}") from x
    logger.info(f"Saved {config.variant} checkpoint of {len(entries)} tensors to {path}")
    return path


def load_checkpoint(path: str) -> Checkpoint:
    """Rebuild a model from a checkpoint written by :func:`save_checkpoint`.

    :param path: the manifest path
    :returns: the checkpoint, its model in evaluation mode
    :raises: CheckpointError
    """
    try:
        with open(path, encoding="utf-8") as f:
            manifest = json.load(f)
        precision = PRECISIONS[manifest["precision"]]
        config = ModelConfig(**{k: tuple(v) if isinstance(v, list) else v for k, v in manifest["config"].items()})
        graph = graph_from_json(json.dumps(manifest["graph"]))
        standardizer = Standardizer.from_dict(manifest["standardizer"])
        entries = manifest["parameters"]
        blob = np.fromfile(os.path.join(os.path.dirname(path), manifest["blob"]), dtype=precision)
        model = build_variant(config, graph).to(getattr(torch, manifest["dtype"]))
    except (OSError, KeyError, TypeError, ValueError, AttributeError, GraphError, DataError, ModelError) as x:
        raise CheckpointError(f"Cannot load checkpoint {path}: {x}") from x
    expected = sum(int(np.prod(e["shape"], dtype=np.int64)) for e in entries)
    if blob.size != expected:
        raise CheckpointError(f"Checkpoint blob holds {blob.size} values, the manifest describes {expected}")
    state = {}
    offset = 0
    for entry in entries:
        size = int(np.prod(entry["shape"], dtype=np.int64))
        values = torch.from_numpy(blob[offset : offset + size].astype(np.float64)).reshape(entry["shape"])
        state[entry["name"]] = values.to(getattr(torch, entry["dtype"]))
        offset += size
    try:
        model.load_state_dict(state, strict=True)
    except RuntimeError as x:
        raise CheckpointError(f"Checkpoint {path} does not fit a {config.variant} model: {x}") from x
    model.eval()
    logger.debug(f"Loaded {config.variant} checkpoint from {path}")
    return Checkpoint(model, config, graph, standardizer, manifest.get("extras", {}))

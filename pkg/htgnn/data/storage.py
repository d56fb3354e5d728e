"""The on-disk dataset format: ``manifest.json`` plus one CSV file per condition or passage.

The manifest holds the sensor table, the graph, sampling rates, the condition table, the seed and the generator
version. Every CSV has one column per sensor (node order), then the exogenous and target columns, and one row per
time step. Windowing happens at load time and is never stored.
"""

import json
import logging
import os
from typing import Any, Dict, List

from htgnn.__version__ import __version__
from htgnn.data.errors import ManifestError
from htgnn.data.generators import RawSeries, SensorDataset
from htgnn.graph import HeteroTemporalGraph, NodeType, graph_from_json, graph_to_json
from htgnn.graph.errors import GraphError

import numpy as np

import pandas as pd

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"
INFO_KEYS = ("id", "file", "group")


def _sensor_names(graph: HeteroTemporalGraph, node_type: NodeType) -> List[str]:
    return [graph.nodes[i].name for i in graph.partition(node_type)]


def write_dataset(dataset: SensorDataset, directory: str) -> str:
    """Write a dataset to a directory, creating it if needed.

    Output is deterministic: the same dataset always yields byte-identical files.

    :param dataset: the dataset to write
    :param directory: the target directory
    :returns: the path of the manifest
    """
    os.makedirs(directory, exist_ok=True)
    graph = dataset.graph
    low_names = _sensor_names(graph, NodeType.L)
    high_names = _sensor_names(graph, NodeType.H)
    columns = low_names + high_names + list(dataset.exogenous_names) + list(dataset.target_names)
    conditions = []
    for series in dataset.series:
        file_name = f"condition_{series.condition:03d}.csv"
        values = np.concatenate([series.low, series.high, series.exogenous, series.target]).T
        frame = pd.DataFrame(values, columns=columns)
        frame.to_csv(os.path.join(directory, file_name), index=False, float_format="%.17g", lineterminator="\n")
        conditions.append({"id": series.condition, "file": file_name, "group": series.group, **series.info})
    manifest = {
        "kind": dataset.kind,
        "generator_version": __version__,
        "seed": dataset.seed,
        "config": dataset.config,
        "graph": json.loads(graph_to_json(graph)),
        "sensors": [
            {"name": n.name, "type": n.node_type.value, "subtype": n.subtype, "position": n.position}
            for n in graph.nodes
        ],
        "exogenous": list(dataset.exogenous_names),
        "targets": list(dataset.target_names),
        "rates": dataset.rates,
        "window": dataset.window,
        "stride": dataset.stride,
        "preprocess": dataset.preprocess,
        "conditions": conditions,
    }
    path = os.path.join(directory, MANIFEST)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, sort_keys=True, indent=2)
        f.write("\n")
    logger.info(f"Wrote {dataset.kind} dataset of {len(conditions)} series to {directory}")
    return path


def _read_manifest(directory: str) -> Dict[str, Any]:
    path = os.path.join(directory, MANIFEST)
    try:
        with open(path, encoding="utf-8") as f:
            manifest = json.load(f)
    except OSError as x:
        raise ManifestError(f"Cannot read dataset manifest {path}: {x}") from x
    except ValueError as x:
        raise ManifestError(f"Dataset manifest {path} is not valid JSON: {x}") from x
    if not isinstance(manifest, dict):
        raise ManifestError(f"Dataset manifest {path} must hold a JSON object")
    return manifest


def read_dataset(directory: str) -> SensorDataset:
    """Read a dataset written by :func:`write_dataset`.

    :param directory: the dataset directory
    :returns: the dataset
    :raises: ManifestError
    """
    manifest = _read_manifest(directory)
    try:
        graph = graph_from_json(json.dumps(manifest["graph"]))
        exogenous = tuple(manifest["exogenous"])
        targets = tuple(manifest["targets"])
        conditions = manifest["conditions"]
        kind, window, stride = manifest["kind"], int(manifest["window"]), int(manifest["stride"])
    except (KeyError, TypeError, ValueError, GraphError) as x:
        raise ManifestError(f"Invalid dataset manifest in {directory}: {x}") from x
    if not conditions:
        raise ManifestError(f"Dataset manifest in {directory} lists no condition")
    low_names = _sensor_names(graph, NodeType.L)
    high_names = _sensor_names(graph, NodeType.H)
    blocks = (low_names, high_names, list(exogenous), list(targets))
    series = []
    for entry in conditions:
        path = os.path.join(directory, str(entry.get("file", "")))
        try:
            frame = pd.read_csv(path, dtype=np.float64, float_precision="round_trip")
            low, high, exo, target = (frame[names].to_numpy().T for names in blocks)
        except (OSError, ValueError) as x:
            raise ManifestError(f"Cannot read condition file {path}: {x}") from x
        except KeyError as x:
            raise ManifestError(f"Condition file {path} lacks column(s) {x}") from x
        info = {k: float(v) for k, v in entry.items() if k not in INFO_KEYS}
        series.append(
            RawSeries(
                condition=int(entry["id"]),
                group=int(entry["group"]),
                low=low,
                high=high,
                exogenous=exo,
                target=target,
                info=info,
            )
        )
    logger.debug(f"Read {kind} dataset of {len(series)} series from {directory}")
    return SensorDataset(
        kind=kind,
        graph=graph,
        series=tuple(series),
        exogenous_names=exogenous,
        target_names=targets,
        seed=int(manifest.get("seed", 0)),
        config=manifest.get("config", {}),
        rates=manifest.get("rates", {}),
        window=window,
        stride=stride,
        preprocess=manifest.get("preprocess"),
    )

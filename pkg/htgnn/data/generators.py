"""Synthetic heterogeneous sensor streams with the statistical structure of the two case studies.

Both generators are pure functions of (config, seed): every operating condition draws from its own generator seeded
with ``[seed, condition]``, so conditions are independent of each other and of generation order. Low-frequency
series are synthesised at ``1 / low_rate_factor`` of the high-frequency rate and linearly interpolated onto the
common time base.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

from htgnn.data.errors import EmptyGridError
from htgnn.data.signals import add_noise, upsample
from htgnn.graph import HeteroTemporalGraph, NodeType, bearing_topology, bridge_topology

import numpy as np

logger = logging.getLogger(__name__)

VIBRATION_AXIAL_WEIGHTS = {"V_AX": 1.0, "V_RA": 0.6}
OUTER_RING_SLOTS = 8


@dataclass(frozen=True)
class BearingLikeConfig:
    """Operating grid and signal model of the bearing-like dataset.

    Loads are in kN, speeds in r/min. ``base_frequency`` is the fundamental vibration frequency in cycles per sample
    per r/min, scaled per condition by ``1 + N(0, frequency_slip)``. A ``vibration_snr_db`` of None disables
    vibration noise. ``temperature_ceiling`` bounds the stored L-signals, rates or integrated temperatures.
    """

    speeds: Tuple[float, ...] = (10.0, 20.0, 30.0, 40.0, 50.0)
    load_pairs: int = 11
    axial_load: Tuple[float, ...] = (4.0, 12.0)
    radial_load: Tuple[float, ...] = (20.0, 60.0)
    steps: int = 66
    window: int = 30
    stride: int = 1
    low_rate_factor: int = 10
    base_frequency: float = 0.004
    harmonics: Tuple[float, ...] = (1.0, 0.4)
    vibration_amplitude: float = 1.0
    load_sensitivity: float = 0.8
    reference_load: float = 50.0
    vibration_jitter: float = 0.05
    frequency_slip: float = 0.03
    vibration_snr_db: Optional[float] = 30.0
    heating: float = 2e-4
    temperature_noise: float = 0.02
    vibration_ceiling: float = 10.0
    temperature_ceiling: float = 120.0
    raw_temperature: bool = False
    initial_temperature: float = 20.0
    ma_window: int = 6
    rate_horizon: int = 30

    def __post_init__(self):
        if len(self.axial_load) != 2 or len(self.radial_load) != 2:
            raise ValueError("Load ranges must be [min, max]")
        if min(self.steps, self.window, self.stride, self.low_rate_factor) < 1:
            raise ValueError("steps, window, stride and low_rate_factor must be positive")
        if not self.harmonics:
            raise ValueError("At least one harmonic is required")


@dataclass(frozen=True)
class BridgeLikeConfig:
    """Passage schedule and signal model of the bridge-like dataset.

    Loads are in kg, temperatures in °C, modal frequencies in cycles per sample at the reference temperature. A train
    crosses the span once per passage, sensors sit at equally spaced positions along it.
    """

    days: int = 14
    passages_per_day: int = 11
    sensors: int = 4
    steps: int = 120
    window: int = 60
    stride: int = 5
    low_rate_factor: int = 10
    load_range: Tuple[float, ...] = (42100.0, 53500.0)
    temperature_range: Tuple[float, ...] = (-5.0, 30.0)
    speed_classes: Tuple[float, ...] = (1.0,)
    modal_frequencies: Tuple[float, ...] = (0.08, 0.19)
    modal_amplitudes: Tuple[float, ...] = (1.0, 0.5)
    temperature_coefficient: float = 0.01
    reference_temperature: float = 10.0
    deflection_scale: float = 1e-4
    acceleration_scale: float = 2e-5
    influence_width: float = 0.15
    snr_db: Optional[float] = 35.0
    displacement_ceiling: float = 20.0
    acceleration_ceiling: float = 20.0

    def __post_init__(self):
        if len(self.load_range) != 2 or len(self.temperature_range) != 2:
            raise ValueError("Load and temperature ranges must be [min, max]")
        if len(self.modal_frequencies) != len(self.modal_amplitudes):
            raise ValueError("Every modal frequency needs an amplitude")
        if min(self.sensors, self.steps, self.window, self.stride, self.low_rate_factor) < 1:
            raise ValueError("sensors, steps, window, stride and low_rate_factor must be positive")


@dataclass(frozen=True, eq=False)
class RawSeries:
    """The resampled series of one operating condition (bearing) or one passage (bridge).

    Arrays are (rows, time) on the common time base, rows in the graph's partition order.
    """

    condition: int
    group: int
    low: np.ndarray
    high: np.ndarray
    exogenous: np.ndarray
    target: np.ndarray
    info: Dict[str, float]

    @property
    def length(self) -> int:
        """Return the number of time steps."""
        return self.high.shape[-1]


@dataclass(frozen=True, eq=False)
class SensorDataset:
    """A generated (or loaded) dataset: the graph, the series and the metadata needed to window them."""

    kind: str
    graph: HeteroTemporalGraph
    series: Tuple[RawSeries, ...]
    exogenous_names: Tuple[str, ...]
    target_names: Tuple[str, ...]
    seed: int
    config: Dict[str, Any]
    rates: Dict[str, float]
    window: int
    stride: int
    preprocess: Optional[Dict[str, int]] = None


def _noisy(values: np.ndarray, snr_db: Optional[float], rng: np.random.Generator) -> np.ndarray:
    return add_noise(values, math.inf if snr_db is None else snr_db, rng)


def bearing_load_grid(config: BearingLikeConfig) -> Tuple[Tuple[float, float], ...]:
    """Return the (axial, radial) load pairs, radial increasing and axial spread by a stride-3 permutation."""
    count = config.load_pairs
    (fx_min, fx_max), (fy_min, fy_max) = config.axial_load, config.radial_load
    steps = max(count - 1, 1)
    return tuple(
        (fx_min + (fx_max - fx_min) * ((3 * k) % count) / steps, fy_min + (fy_max - fy_min) * k / steps)
        for k in range(count)
    )


def _load_zone_weight(slot: int) -> float:
    return (1.0 + math.cos(2.0 * math.pi * slot / OUTER_RING_SLOTS)) / 2.0


def generate_bearing_like(
    config: Optional[BearingLikeConfig] = None, seed: int = 0, graph: Optional[HeteroTemporalGraph] = None
) -> SensorDataset:
    """Generate the bearing-like dataset, one series per (load pair, speed) condition.

    Vibration (H) sensors carry ``Σ_k A_k sin(2π k f s t + φ_k)`` with amplitudes decaying with the axial load and
    the fundamental proportional to the speed s, up to a per-condition slip. The radial load leaves the vibrations
    untouched, it is carried by the temperature (L) sensors: they hold the heating rate ``c (F_x + F_y z) s``, with z
    peaking at the bottom of the radial load zone (0.5 for inner ring sensors), or its running integral with
    ``raw_temperature``. Both are clipped to their ceilings last. W is the speed, y is (F_x, F_y).

    :param config: the generator configuration, defaults if None
    :param seed: the generation seed
    :param graph: the sensor graph, the default bearing topology if None
    :returns: the dataset
    :raises: EmptyGridError
    """
    config = config or BearingLikeConfig()
    graph = graph or bearing_topology()
    loads = bearing_load_grid(config)
    if not loads or not config.speeds:
        raise EmptyGridError("The bearing-like operating grid has no condition")
    low_nodes = [graph.nodes[i] for i in graph.partition(NodeType.L)]
    high_nodes = [graph.nodes[i] for i in graph.partition(NodeType.H)]
    zone = np.array([_load_zone_weight(n.slot) if n.subtype != "T_IR" else 0.5 for n in low_nodes])
    t = np.arange(config.steps, dtype=np.float64)
    coarse = math.ceil(config.steps / config.low_rate_factor) + 1
    series = []
    for pair, (fx, fy) in enumerate(loads):
        for speed in config.speeds:
            condition = len(series)
            rng = np.random.default_rng([seed, condition])
            slip = 1.0 + rng.normal(0.0, config.frequency_slip) if config.frequency_slip > 0 else 1.0
            high = np.zeros((len(high_nodes), config.steps))
            for row, node in enumerate(high_nodes):
                weight = VIBRATION_AXIAL_WEIGHTS.get(node.subtype, 0.8)
                decay = config.load_sensitivity * weight * fx / config.reference_load
                scale = config.vibration_amplitude * math.exp(-decay)
                scale *= math.exp(rng.normal(0.0, config.vibration_jitter)) if config.vibration_jitter > 0 else 1.0
                for k, relative in enumerate(config.harmonics, start=1):
                    phase = rng.uniform(0.0, 2.0 * math.pi)
                    omega = 2.0 * math.pi * k * config.base_frequency * speed * slip
                    high[row] += scale * relative * np.sin(omega * t + phase)
            ceiling = config.vibration_ceiling
            high = np.clip(_noisy(high, config.vibration_snr_db, rng), -ceiling, ceiling)
            rate = config.heating * (fx + fy * zone) * speed
            rate = rate[:, None] + config.temperature_noise * rng.standard_normal((len(low_nodes), coarse))
            low = upsample(rate, config.low_rate_factor, config.steps)
            if config.raw_temperature:
                low = config.initial_temperature + np.cumsum(low, axis=-1)
            low = np.clip(low, -config.temperature_ceiling, config.temperature_ceiling)
            series.append(
                RawSeries(
                    condition=condition,
                    group=condition,
                    low=low,
                    high=high,
                    exogenous=np.full((1, config.steps), float(speed)),
                    target=np.tile(np.array([[fx], [fy]]), (1, config.steps)),
                    info={"speed": float(speed), "axial_load": fx, "radial_load": fy, "load_pair": float(pair)},
                )
            )
    logger.debug(f"Generated {len(series)} bearing-like conditions of {config.steps} steps (seed {seed})")
    preprocess = None
    if config.raw_temperature:
        preprocess = {"ma_window": config.ma_window, "rate_horizon": config.rate_horizon}
    return SensorDataset(
        kind="bearing-like",
        graph=graph,
        series=tuple(series),
        exogenous_names=("speed",),
        target_names=("F_x", "F_y"),
        seed=seed,
        config=dataclasses.asdict(config),
        rates={"L": 1.0 / config.low_rate_factor, "H": 1.0},
        window=config.window,
        stride=config.stride,
        preprocess=preprocess,
    )


def _train_position(config: BridgeLikeConfig, speed: float) -> np.ndarray:
    """Return the normalised train position along the span at every step, entering at -0.2."""
    progress = np.arange(config.steps, dtype=np.float64) / max(config.steps - 1, 1)
    return -0.2 + 1.4 * speed * progress


def generate_bridge_like(
    config: Optional[BridgeLikeConfig] = None, seed: int = 0, graph: Optional[HeteroTemporalGraph] = None
) -> SensorDataset:
    """Generate the bridge-like dataset, one series per train passage.

    Displacement (D) sensors carry a quasi-static deflection proportional to the train load under a Gaussian
    influence line. Acceleration (A) sensors carry the span's modes, whose frequencies rise with temperature, under
    an envelope following the train. W is the temperature, y is the train load.

    :param config: the generator configuration, defaults if None
    :param seed: the generation seed
    :param graph: the sensor graph, the default bridge topology with ``config.sensors`` locations if None
    :returns: the dataset
    :raises: EmptyGridError
    """
    config = config or BridgeLikeConfig()
    graph = graph or bridge_topology(sensors=config.sensors)
    passages = config.days * config.passages_per_day
    if passages < 1 or not config.speed_classes:
        raise EmptyGridError("The bridge-like schedule has no passage")
    low_nodes = [graph.nodes[i] for i in graph.partition(NodeType.L)]
    high_nodes = [graph.nodes[i] for i in graph.partition(NodeType.H)]
    t = np.arange(config.steps, dtype=np.float64)
    coarse_t = np.arange(math.ceil(config.steps / config.low_rate_factor) + 1) * config.low_rate_factor
    series = []
    for passage in range(passages):
        rng = np.random.default_rng([seed, passage])
        load = float(rng.uniform(*config.load_range))
        temperature = float(rng.uniform(*config.temperature_range))
        speed = float(config.speed_classes[int(rng.integers(len(config.speed_classes)))])
        position = _train_position(config, speed)
        coarse_position = -0.2 + 1.4 * speed * coarse_t / max(config.steps - 1, 1)
        low = np.zeros((len(low_nodes), coarse_t.size))
        for row, node in enumerate(low_nodes):
            location = (node.slot + 1) / (len(low_nodes) + 1)
            influence = np.exp(-(((coarse_position - location) / config.influence_width) ** 2))
            low[row] = config.deflection_scale * load * influence
        low = upsample(low, config.low_rate_factor, config.steps)
        shift = 1.0 + config.temperature_coefficient * (temperature - config.reference_temperature)
        high = np.zeros((len(high_nodes), config.steps))
        for row, node in enumerate(high_nodes):
            location = (node.slot + 1) / (len(high_nodes) + 1)
            envelope = np.exp(-(((position - location) / (2.0 * config.influence_width)) ** 2))
            for frequency, amplitude in zip(config.modal_frequencies, config.modal_amplitudes):
                phase = rng.uniform(0.0, 2.0 * math.pi)
                high[row] += amplitude * np.sin(2.0 * math.pi * frequency * shift * t + phase)
            high[row] *= config.acceleration_scale * load * envelope
        low = np.clip(_noisy(low, config.snr_db, rng), -config.displacement_ceiling, config.displacement_ceiling)
        high = np.clip(_noisy(high, config.snr_db, rng), -config.acceleration_ceiling, config.acceleration_ceiling)
        series.append(
            RawSeries(
                condition=passage,
                group=passage // config.passages_per_day + 1,
                low=low,
                high=high,
                exogenous=np.full((1, config.steps), temperature),
                target=np.full((1, config.steps), load),
                info={"temperature": temperature, "load": load, "speed": speed},
            )
        )
    logger.debug(f"Generated {len(series)} bridge-like passages over {config.days} days (seed {seed})")
    return SensorDataset(
        kind="bridge-like",
        graph=graph,
        series=tuple(series),
        exogenous_names=("temperature",),
        target_names=("load",),
        seed=seed,
        config=dataclasses.asdict(config),
        rates={"L": 1.0 / config.low_rate_factor, "H": 1.0},
        window=config.window,
        stride=config.stride,
    )


GENERATORS = {
    "bearing-like": (BearingLikeConfig, generate_bearing_like),
    "bridge-like": (BridgeLikeConfig, generate_bridge_like),
}

"""Cost-minimal energy system design models built on the embedded MILP solver.

Devices come in four classes: source/sink (bounded in/out flows), collector
(balance hub), transformer (efficiency-linked conversion between energy types)
and storage (state of charge with charge/discharge/self-discharge and cyclic
closure). Each device carries a binary existence variable tied to its capacity
through a big-M constraint, and annualized capital plus fixed operating costs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .preprocess import RawSeriesSet
from .rescale import TypicalPeriodSet
from .solver import MilpProblem

__all__ = [
    "SOURCE_SINK",
    "COLLECTOR",
    "TRANSFORMER",
    "STORAGE",
    "Profile",
    "Device",
    "Connection",
    "SystemModel",
    "BuiltModel",
    "crf",
    "annualized_costs",
    "build_full_model",
    "build_typical_model",
]

SOURCE_SINK = "source_sink"
COLLECTOR = "collector"
TRANSFORMER = "transformer"
STORAGE = "storage"
_CLASSES = (SOURCE_SINK, COLLECTOR, TRANSFORMER, STORAGE)


@dataclass(frozen=True)
class Profile:
    """A per-capacity bound profile: either a constant or a named series attribute."""

    constant: float | None = None
    attribute: str | None = None

    def __post_init__(self):
        if (self.constant is None) == (self.attribute is None):
            raise ValueError("profile needs exactly one of constant or attribute")

    def resolve(self, lookup: dict[str, np.ndarray], n_slots: int, context: str) -> np.ndarray:
        if self.constant is not None:
            return np.full(n_slots, float(self.constant))
        if self.attribute not in lookup:
            raise ValueError(f"{context}: profile references unknown attribute {self.attribute!r}")
        return lookup[self.attribute]


@dataclass
class Device:
    """One technology with its cost, capacity and class-specific parameters."""

    name: str
    device_class: str
    capex_exist: float = 0.0  # currency, paid once the device exists
    capex_spec: float = 0.0  # currency per kW (or kWh for storage)
    opex_fix_share: float = 0.0  # share of CAPEX per year
    wacc: float = 0.08
    lifetime_years: float = 20.0
    max_capacity: float = 1e6  # doubles as the big-M bound
    min_capacity: float = 0.0
    # source/sink
    variable_cost: float = 0.0  # currency per kWh moved through the device
    lower_bound: Profile = field(default_factory=lambda: Profile(constant=0.0))
    upper_bound: Profile = field(default_factory=lambda: Profile(constant=1.0))
    # transformer: efficiency per (input energy type, output energy type)
    efficiencies: dict[tuple[str, str], float] = field(default_factory=dict)
    # storage
    charge_efficiency: float = 1.0
    discharge_efficiency: float = 1.0
    self_discharge_per_hour: float = 0.0

    def __post_init__(self):
        if self.device_class not in _CLASSES:
            raise ValueError(f"device {self.name!r}: unknown class {self.device_class!r}")
        if not 0.0 < self.wacc < 1.0:
            raise ValueError(f"device {self.name!r}: wacc must lie in (0, 1)")
        if self.lifetime_years <= 0:
            raise ValueError(f"device {self.name!r}: lifetime must be positive")
        if self.max_capacity <= 0:
            raise ValueError(f"device {self.name!r}: max_capacity must be positive")
        if not 0.0 <= self.min_capacity <= self.max_capacity:
            raise ValueError(f"device {self.name!r}: min_capacity outside [0, max_capacity]")
        for pair, eta in self.efficiencies.items():
            if not 0.0 < eta <= 1.0:
                raise ValueError(f"device {self.name!r}: efficiency {pair} outside (0, 1]")
        for eta in (self.charge_efficiency, self.discharge_efficiency):
            if not 0.0 < eta <= 1.0:
                raise ValueError(f"device {self.name!r}: storage efficiency outside (0, 1]")
        if self.self_discharge_per_hour < 0:
            raise ValueError(f"device {self.name!r}: self discharge must be non-negative")
        if self.device_class == TRANSFORMER and not self.efficiencies:
            raise ValueError(f"transformer {self.name!r} needs at least one efficiency entry")


@dataclass(frozen=True)
class Connection:
    from_device: str
    to_device: str
    energy_type: str


@dataclass
class SystemModel:
    """A device network connected by typed energy flows."""

    name: str
    devices: dict[str, Device]
    connections: list[Connection]

    def __post_init__(self):
        seen = set()
        for con in self.connections:
            for end in (con.from_device, con.to_device):
                if end not in self.devices:
                    raise ValueError(f"connection references unknown device {end!r}")
            key = (con.from_device, con.to_device, con.energy_type)
            if key in seen:
                raise ValueError(f"duplicate connection {key}")
            seen.add(key)
        for device in self.devices.values():
            ins = self.inputs_of(device.name)
            outs = self.outputs_of(device.name)
            if not ins and not outs:
                raise ValueError(f"device {device.name!r} is not connected")
            if device.device_class == SOURCE_SINK and ins and outs:
                raise ValueError(
                    f"source/sink {device.name!r} must not mix incoming and outgoing flows")

    @property
    def energy_types(self) -> tuple[str, ...]:
        return tuple(sorted({c.energy_type for c in self.connections}))

    def inputs_of(self, name: str) -> list[Connection]:
        return [c for c in self.connections if c.to_device == name]

    def outputs_of(self, name: str) -> list[Connection]:
        return [c for c in self.connections if c.from_device == name]


def crf(wacc: float, lifetime_years: float) -> float:
    """Capital recovery factor: the annuity of one unit invested over the lifetime."""
    if not 0.0 < wacc < 1.0:
        raise ValueError("wacc must lie in (0, 1)")
    if lifetime_years <= 0:
        raise ValueError("lifetime must be positive")
    growth = (1.0 + wacc) ** lifetime_years
    return growth * wacc / (growth - 1.0)


def annualized_costs(device: Device) -> tuple[float, float]:
    """Annualized (existence, per-capacity) cost rates of a device."""
    rate = crf(device.wacc, device.lifetime_years) + device.opex_fix_share
    return device.capex_exist * rate, device.capex_spec * rate


@dataclass
class BuiltModel:
    """A MilpProblem plus the variable bookkeeping needed to read solutions."""

    problem: MilpProblem
    system: SystemModel
    step_length_hours: float
    slot_weights: np.ndarray  # operating-cost weight per time slot
    capacity_vars: dict[str, int]
    existence_vars: dict[str, int]
    flow_vars: dict[tuple[str, str, str], list[int]]
    soc_vars: dict[str, list[int]]

    def capacity_of(self, values: np.ndarray, device: str) -> float:
        return float(values[self.capacity_vars[device]])

    def existence_of(self, values: np.ndarray, device: str) -> float:
        return float(values[self.existence_vars[device]])


def build_full_model(system: SystemModel, profiles: RawSeriesSet) -> BuiltModel:
    """Design model over the full series with one cyclic storage horizon."""
    lookup = {name: profiles.column(name) for name in profiles.names}
    n = profiles.n_steps
    weights = np.ones(n)
    wrap = np.r_[np.arange(1, n), 0]
    return _build(system, lookup, n, weights, wrap, profiles.step_length_hours,
                  label=[f"t{t}" for t in range(n)])


def build_typical_model(system: SystemModel, typical: TypicalPeriodSet) -> BuiltModel:
    """Design model over typical periods: operation is weighted by cluster size.

    Storage closes cyclically within each period, so no energy moves between
    typical periods; design variables are shared across all of them.
    """
    n_k = typical.n_clusters
    g = typical.steps_per_period
    n = n_k * g
    lookup = {}
    for a, name in enumerate(typical.attribute_order):
        block = typical.representatives_physical[:, a * g:(a + 1) * g]
        lookup[name] = block.reshape(-1)
    weights = np.repeat(typical.weights.astype(float), g)
    wrap = np.arange(n)
    for k in range(n_k):
        wrap[k * g:(k + 1) * g] = np.r_[np.arange(k * g + 1, (k + 1) * g), k * g]
    label = [f"k{k}g{s}" for k in range(n_k) for s in range(g)]
    return _build(system, lookup, n, weights, wrap, typical.step_length_hours, label)


def _build(system: SystemModel, lookup: dict[str, np.ndarray], n_slots: int,
           weights: np.ndarray, wrap: np.ndarray, dt: float,
           label: list[str]) -> BuiltModel:
    problem = MilpProblem(system.name)
    capacity_vars: dict[str, int] = {}
    existence_vars: dict[str, int] = {}
    flow_vars: dict[tuple[str, str, str], list[int]] = {}
    soc_vars: dict[str, list[int]] = {}

    for device in system.devices.values():
        c_exist, c_spec = annualized_costs(device)
        capacity_vars[device.name] = problem.add_variable(
            f"D_{device.name}", lower=device.min_capacity, upper=device.max_capacity,
            objective=c_spec)
        # Devices with guaranteed existence (forced capacity or free existence
        # cost) get their binary fixed, which spares branch and bound the split.
        fixed = device.min_capacity > 0.0 or c_exist == 0.0
        existence_vars[device.name] = problem.add_variable(
            f"delta_{device.name}", kind="binary", lower=1.0 if fixed else 0.0,
            objective=c_exist)
        if not fixed:
            problem.add_constraint(
                f"bigM_{device.name}",
                {capacity_vars[device.name]: 1.0,
                 existence_vars[device.name]: -device.max_capacity},
                "<=", 0.0)

    for con in system.connections:
        key = (con.from_device, con.to_device, con.energy_type)
        flow_vars[key] = [
            problem.add_variable(f"E_{con.from_device}__{con.to_device}__{con.energy_type}__{label[t]}")
            for t in range(n_slots)
        ]

    # Variable operating costs are attributed to the source/sink owning the flow.
    for device in system.devices.values():
        if device.device_class != SOURCE_SINK or device.variable_cost == 0.0:
            continue
        cons = system.outputs_of(device.name) or system.inputs_of(device.name)
        for con in cons:
            key = (con.from_device, con.to_device, con.energy_type)
            for t, var in enumerate(flow_vars[key]):
                problem.add_objective_coefficient(var, device.variable_cost * weights[t] * dt)

    for device in system.devices.values():
        if device.device_class == SOURCE_SINK:
            _add_source_sink_rows(problem, system, device, flow_vars, capacity_vars,
                                  lookup, n_slots, label)
        elif device.device_class == COLLECTOR:
            _add_collector_rows(problem, system, device, flow_vars, n_slots, label)
        elif device.device_class == TRANSFORMER:
            _add_transformer_rows(problem, system, device, flow_vars, capacity_vars,
                                  n_slots, label)
        else:
            _add_storage_rows(problem, system, device, flow_vars, capacity_vars,
                              soc_vars, n_slots, wrap, dt, label)

    return BuiltModel(
        problem=problem,
        system=system,
        step_length_hours=dt,
        slot_weights=weights,
        capacity_vars=capacity_vars,
        existence_vars=existence_vars,
        flow_vars=flow_vars,
        soc_vars=soc_vars,
    )


def _device_flows(system: SystemModel, device: Device,
                  flow_vars: dict) -> list[list[int]]:
    cons = system.outputs_of(device.name) or system.inputs_of(device.name)
    return [flow_vars[(c.from_device, c.to_device, c.energy_type)] for c in cons]


def _add_source_sink_rows(problem, system, device, flow_vars, capacity_vars,
                          lookup, n_slots, label):
    flows = _device_flows(system, device, flow_vars)
    if not flows:
        raise ValueError(f"source/sink {device.name!r} has no connections")
    lb = device.lower_bound.resolve(lookup, n_slots, device.name)
    ub = device.upper_bound.resolve(lookup, n_slots, device.name)
    if np.any(lb > ub + 1e-9):
        raise ValueError(f"source/sink {device.name!r}: lower bound exceeds upper bound")
    cap = capacity_vars[device.name]
    equal = np.array_equal(lb, ub)
    for t in range(n_slots):
        coeffs = {f[t]: 1.0 for f in flows}
        if equal:
            coeffs[cap] = -ub[t]
            problem.add_constraint(f"fix_{device.name}_{label[t]}", coeffs, "=", 0.0)
            continue
        ub_coeffs = dict(coeffs)
        ub_coeffs[cap] = -ub[t]
        problem.add_constraint(f"ub_{device.name}_{label[t]}", ub_coeffs, "<=", 0.0)
        if lb[t] != 0.0:
            lb_coeffs = dict(coeffs)
            lb_coeffs[cap] = -lb[t]
            problem.add_constraint(f"lb_{device.name}_{label[t]}", lb_coeffs, ">=", 0.0)


def _add_collector_rows(problem, system, device, flow_vars, n_slots, label):
    ins = system.inputs_of(device.name)
    outs = system.outputs_of(device.name)
    for t in range(n_slots):
        coeffs: dict[int, float] = {}
        for c in ins:
            coeffs[flow_vars[(c.from_device, c.to_device, c.energy_type)][t]] = 1.0
        for c in outs:
            coeffs[flow_vars[(c.from_device, c.to_device, c.energy_type)][t]] = -1.0
        if coeffs:
            problem.add_constraint(f"bal_{device.name}_{label[t]}", coeffs, "=", 0.0)


def _add_transformer_rows(problem, system, device, flow_vars, capacity_vars,
                          n_slots, label):
    ins = system.inputs_of(device.name)
    outs = system.outputs_of(device.name)
    # Capacity rates the total output, so the device scaling actually binds.
    cap = capacity_vars[device.name]
    for t in range(n_slots):
        coeffs = {flow_vars[(c.from_device, c.to_device, c.energy_type)][t]: 1.0
                  for c in outs}
        coeffs[cap] = -1.0
        problem.add_constraint(f"cap_{device.name}_{label[t]}", coeffs, "<=", 0.0)
    for (e_in, e_out), eta in device.efficiencies.items():
        in_cons = [c for c in ins if c.energy_type == e_in]
        out_cons = [c for c in outs if c.energy_type == e_out]
        if not in_cons or not out_cons:
            raise ValueError(
                f"transformer {device.name!r}: no flows for conversion {e_in} -> {e_out}")
        for t in range(n_slots):
            coeffs: dict[int, float] = {}
            for c in in_cons:
                coeffs[flow_vars[(c.from_device, c.to_device, c.energy_type)][t]] = eta
            for c in out_cons:
                coeffs[flow_vars[(c.from_device, c.to_device, c.energy_type)][t]] = -1.0
            problem.add_constraint(
                f"conv_{device.name}_{e_in}_{e_out}_{label[t]}", coeffs, "=", 0.0)


def _add_storage_rows(problem, system, device, flow_vars, capacity_vars, soc_vars,
                      n_slots, wrap, dt, label):
    ins = system.inputs_of(device.name)
    outs = system.outputs_of(device.name)
    soc = [problem.add_variable(f"SOC_{device.name}_{label[t]}") for t in range(n_slots)]
    soc_vars[device.name] = soc
    keep = 1.0 - device.self_discharge_per_hour * dt
    if keep <= 0:
        raise ValueError(f"storage {device.name!r}: self discharge drains within one step")
    cap = capacity_vars[device.name]
    for t in range(n_slots):
        nxt = int(wrap[t])
        coeffs = {soc[nxt]: 1.0}
        coeffs[soc[t]] = coeffs.get(soc[t], 0.0) - keep
        for c in ins:
            var = flow_vars[(c.from_device, c.to_device, c.energy_type)][t]
            coeffs[var] = coeffs.get(var, 0.0) - device.charge_efficiency * dt
        for c in outs:
            var = flow_vars[(c.from_device, c.to_device, c.energy_type)][t]
            coeffs[var] = coeffs.get(var, 0.0) + dt / device.discharge_efficiency
        if any(v != 0.0 for v in coeffs.values()):
            problem.add_constraint(f"soc_{device.name}_{label[t]}", coeffs, "=", 0.0)
        problem.add_constraint(f"soccap_{device.name}_{label[t]}",
                               {soc[t]: 1.0, cap: -1.0}, "<=", 0.0)

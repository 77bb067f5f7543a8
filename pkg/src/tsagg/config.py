"""YAML system configuration loading for the CLI and tests."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import yaml

from .esm import Connection, Device, Profile, SystemModel

__all__ = ["load_system_config", "system_from_dict", "bundled_config_path"]

_DEVICE_KEYS = {
    "capex_exist", "capex_spec", "opex_fix_share", "wacc", "lifetime_years",
    "max_capacity", "min_capacity", "variable_cost",
    "charge_efficiency", "discharge_efficiency", "self_discharge_per_hour",
}


def _parse_profile(raw, context: str) -> Profile:
    if isinstance(raw, (int, float)):
        return Profile(constant=float(raw))
    if isinstance(raw, dict) and set(raw) == {"attribute"}:
        return Profile(attribute=str(raw["attribute"]))
    raise ValueError(f"{context}: profile must be a number or {{attribute: name}}")


def _parse_device(raw: dict) -> Device:
    if "name" not in raw or "class" not in raw:
        raise ValueError("every device needs 'name' and 'class'")
    kwargs = {"name": str(raw["name"]), "device_class": str(raw["class"])}
    for key in _DEVICE_KEYS:
        if key in raw:
            kwargs[key] = float(raw[key])
    context = f"device {kwargs['name']!r}"
    if "lower_bound" in raw:
        kwargs["lower_bound"] = _parse_profile(raw["lower_bound"], context)
    if "upper_bound" in raw:
        kwargs["upper_bound"] = _parse_profile(raw["upper_bound"], context)
    if "efficiencies" in raw:
        effs = {}
        for entry in raw["efficiencies"]:
            try:
                effs[(str(entry["from"]), str(entry["to"]))] = float(entry["value"])
            except (KeyError, TypeError) as exc:
                raise ValueError(f"{context}: efficiency entries need from/to/value") from exc
        kwargs["efficiencies"] = effs
    unknown = set(raw) - _DEVICE_KEYS - {
        "name", "class", "lower_bound", "upper_bound", "efficiencies"}
    if unknown:
        raise ValueError(f"{context}: unknown keys {sorted(unknown)}")
    return Device(**kwargs)


def system_from_dict(data: dict) -> SystemModel:
    if not isinstance(data, dict):
        raise ValueError("system config must be a mapping")
    for key in ("devices", "connections"):
        if key not in data:
            raise ValueError(f"system config misses section {key!r}")
    devices = {}
    for raw in data["devices"]:
        device = _parse_device(raw)
        if device.name in devices:
            raise ValueError(f"duplicate device name {device.name!r}")
        devices[device.name] = device
    connections = []
    for raw in data["connections"]:
        if not (isinstance(raw, list) and len(raw) == 3):
            raise ValueError("connections must be [from, to, energy_type] triples")
        connections.append(Connection(str(raw[0]), str(raw[1]), str(raw[2])))
    return SystemModel(name=str(data.get("name", "system")), devices=devices,
                       connections=connections)


def load_system_config(path: str | Path) -> SystemModel:
    """Parse a YAML system description into a validated SystemModel."""
    with open(path, "r", encoding="utf-8") as handle:
        data = yaml.safe_load(handle)
    return system_from_dict(data)


def bundled_config_path(name: str) -> Path:
    """Path of one of the shipped example configurations (chp, residential, island)."""
    path = resources.files("tsagg").joinpath("configs", f"{name}.yaml")
    if not path.is_file():
        raise ValueError(f"no bundled config named {name!r}")
    return Path(str(path))

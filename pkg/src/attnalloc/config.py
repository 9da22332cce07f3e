"""Flat sectioned key-value configuration files for the experiment harness.

Sections [experiment], [world], [fit], [channel] mirror the corresponding
dataclasses field-for-field; an optional [link] section (downlink_rate,
uplink_ber) overrides the channel model. Unknown sections or keys are errors.
"""

from __future__ import annotations

import configparser
import dataclasses
import io

from .experiment import ExperimentConfig
from .mf import FitConfig
from .qoe import ChannelConfig, LinkParams
from .world import WorldConfig


class ConfigFileError(ValueError):
    pass


_EXPERIMENT_KEYS = (
    "master_seed", "floor_k", "budget_per_object_k", "sweep_factors",
    "sweep_user", "scene_retain_lo", "scene_retain_hi",
)


def _cast_like(template, name, text):
    current = getattr(template, name)
    text = text.strip()
    try:
        if isinstance(current, bool):
            return text.lower() in ("1", "true", "yes", "on")
        if isinstance(current, int):
            return int(text)
        if isinstance(current, float):
            return float(text)
        if current is None:  # optional floats (e.g. uplink_sinr)
            return None if text.lower() in ("", "none") else float(text)
    except ValueError:
        raise ConfigFileError(f"cannot parse {name} = {text!r}") from None
    raise ConfigFileError(f"unsupported config field {name}")


def _section_to_dataclass(parser, section, cls):
    template = cls()
    known = {f.name for f in dataclasses.fields(cls)}
    updates = {}
    if parser.has_section(section):
        for key, value in parser.items(section):
            if key not in known:
                raise ConfigFileError(f"unknown key {key!r} in [{section}]")
            updates[key] = _cast_like(template, key, value)
    return dataclasses.replace(template, **updates)


def _parse_sweep_factors(text):
    try:
        factors = tuple(float(tok) for tok in text.replace(",", " ").split())
    except ValueError:
        raise ConfigFileError(f"cannot parse sweep_factors = {text!r}") from None
    if not factors:
        raise ConfigFileError("sweep_factors must list at least one budget factor")
    return factors


def parse_config(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigFileError(f"malformed config file: {exc}") from None

    allowed = {"experiment", "world", "fit", "channel", "link"}
    for section in parser.sections():
        if section not in allowed:
            raise ConfigFileError(f"unknown section [{section}]")

    world = _section_to_dataclass(parser, "world", WorldConfig)
    fit = _section_to_dataclass(parser, "fit", FitConfig)
    channel = _section_to_dataclass(parser, "channel", ChannelConfig)

    link = None
    if parser.has_section("link"):
        keys = dict(parser.items("link"))
        unknown = set(keys) - {"downlink_rate", "uplink_ber"}
        if unknown:
            raise ConfigFileError(f"unknown key(s) in [link]: {sorted(unknown)}")
        try:
            link = LinkParams(
                downlink_rate=float(keys.get("downlink_rate", "0")),
                uplink_ber=float(keys.get("uplink_ber", "0")),
            )
        except ValueError as exc:
            raise ConfigFileError(f"invalid [link] section: {exc}") from None

    defaults = ExperimentConfig()
    updates = {}
    if parser.has_section("experiment"):
        for key, value in parser.items("experiment"):
            if key not in _EXPERIMENT_KEYS:
                raise ConfigFileError(f"unknown key {key!r} in [experiment]")
            if key == "sweep_factors":
                updates[key] = _parse_sweep_factors(value)
            else:
                updates[key] = _cast_like(defaults, key, value)

    config = dataclasses.replace(
        defaults, world=world, fit=fit, channel=channel, link=link, **updates
    )
    config.validate()
    return config


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read())


def dump_config(config: ExperimentConfig) -> str:
    parser = configparser.ConfigParser()
    parser["experiment"] = {
        "master_seed": str(config.master_seed),
        "floor_k": repr(config.floor_k),
        "budget_per_object_k": repr(config.budget_per_object_k),
        "sweep_factors": ", ".join(repr(float(f)) for f in config.sweep_factors),
        "sweep_user": str(config.sweep_user),
        "scene_retain_lo": str(config.scene_retain_lo),
        "scene_retain_hi": str(config.scene_retain_hi),
    }
    for section, obj in (("world", config.world), ("fit", config.fit),
                         ("channel", config.channel)):
        parser[section] = {
            f.name: "" if getattr(obj, f.name) is None else repr(getattr(obj, f.name))
            for f in dataclasses.fields(type(obj))
        }
    if config.link is not None:
        parser["link"] = {
            "downlink_rate": repr(config.link.downlink_rate),
            "uplink_ber": repr(config.link.uplink_ber),
        }
    out = io.StringIO()
    parser.write(out)
    return out.getvalue()

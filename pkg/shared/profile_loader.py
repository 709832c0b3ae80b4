from __future__ import annotations

import copy
from pathlib import Path
from typing import Any, Dict

import yaml

from shared.errors import InputError


def load_profile(profile_path: Path) -> Dict[str, Any]:
    """Load a YAML profile and validate it is a mapping."""
    try:
        raw = Path(profile_path).read_text(encoding="utf-8")
        profile = yaml.safe_load(raw)
    except OSError as exc:
        raise InputError(f"cannot read profile {profile_path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise InputError(f"profile {profile_path} is not valid YAML: {exc}") from exc
    if not isinstance(profile, dict):
        raise InputError(f"Profile must be a YAML mapping, got {type(profile).__name__}")
    return profile


def default_profile_path(package_file: str) -> Path:
    """profiles/default.yaml next to the given module file."""
    return Path(package_file).resolve().parent / "profiles" / "default.yaml"


def get_threshold(profile: Dict[str, Any], *keys: str, default: Any = None) -> Any:
    """
    Safely traverse nested profile keys.
    Example: get_threshold(profile, "iteration", "pole_tolerance", default=1e-10)
    """
    current = profile
    for key in keys:
        if isinstance(current, dict):
            current = current.get(key)
        else:
            return default
        if current is None:
            return default
    return current


def merge_profiles(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Deep-merge overrides into a copy of base (dicts merge, scalars replace)."""
    merged = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_profiles(merged[key], value)
        else:
            merged[key] = value
    return merged

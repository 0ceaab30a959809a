#!/usr/bin/env python3

import os
from pathlib import Path
from typing import Dict, Optional

from dotenv import dotenv_values, load_dotenv

from utils.hbac_utils.hbac_constants import Env
from utils.hbac_utils.hbac_errors import InvalidParameterError


def read_config_file(path) -> Dict[str, str]:
    """KEY=VALUE file; keys are lower-cased and use '_' in place of '-'."""
    path = Path(path)
    if not path.is_file():
        raise InvalidParameterError(f"Config file {path} does not exist")
    return {
        normalize_key(key): value
        for key, value in dotenv_values(path).items()
        if value is not None
    }


def normalize_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def default_output_dir() -> Optional[Path]:
    # Try the environment first, then the local .hbac.env next to the checkout
    output_dir = os.getenv(Env.OUTPUT_DIR)
    if not output_dir:
        env_path = Path(__file__).resolve().parents[2].parent / Env.ENV_FILE_NAME
        load_dotenv(dotenv_path=env_path)
        output_dir = os.getenv(Env.OUTPUT_DIR)
    return Path(output_dir) if output_dir else None


def resolve_output_path(out, default_name: str) -> Path:
    if out:
        path = Path(out)
        if path.is_absolute() or path.parent != Path("."):
            return path
        base = default_output_dir()
        return base / path if base else path
    base = default_output_dir()
    return (base or Path(".")) / default_name


def format_vector(values, digits: int = 6) -> str:
    return "(" + ", ".join(f"{value:.{digits}f}" for value in values) + ")"

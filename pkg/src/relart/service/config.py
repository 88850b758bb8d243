"""Configuration shared by the service and the CLI.

Values come from defaults, then an optional TOML file, then RELART_*
environment variables (highest precedence). All paths are resolved
relative to the working directory at load time.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path

try:
    import tomllib as tomli
except ModuleNotFoundError:
    import tomli

__all__ = ["ServiceConfig", "load_config"]


@dataclass
class ServiceConfig:
    data_dir: Path = Path("data")
    store: Path | None = None
    dbow_model: Path | None = None
    dm_model: Path | None = None
    elink_rate: float = 3.0
    elink_api_key: str | None = None
    pmra_fixtures: Path | None = None
    seed: int = 0
    infer_epochs: int | None = None

    @property
    def store_dir(self) -> Path:
        # explicit store location wins over the data_dir layout
        return self.store if self.store is not None else self.data_dir / "store"

    @property
    def sessions_dir(self) -> Path:
        return self.data_dir / "sessions"

    @property
    def pmra_cache_dir(self) -> Path:
        return self.data_dir / "pmra-cache"

    @property
    def eval_dir(self) -> Path:
        return self.data_dir / "eval"

    @property
    def split_path(self) -> Path:
        return self.data_dir / "split.json"


_PATH_KEYS = {"data_dir", "store", "dbow_model", "dm_model", "pmra_fixtures"}

_ENV_MAP = {
    "RELART_DATA_DIR": "data_dir",
    "RELART_STORE": "store",
    "RELART_DBOW_MODEL": "dbow_model",
    "RELART_DM_MODEL": "dm_model",
    "RELART_ELINK_RATE": "elink_rate",
    "RELART_ELINK_API_KEY": "elink_api_key",
    "RELART_PMRA_FIXTURES": "pmra_fixtures",
    "RELART_SEED": "seed",
    "RELART_INFER_EPOCHS": "infer_epochs",
}


def _coerce(name: str, value) -> object:
    if value is None:
        return None
    if name in _PATH_KEYS:
        return Path(value)
    if name == "elink_rate":
        return float(value)
    if name in ("seed", "infer_epochs"):
        return int(value)
    return str(value)


def load_config(path=None, env=None) -> ServiceConfig:
    """Defaults <- TOML file <- environment. `path` falls back to the
    RELART_CONFIG variable; a missing explicit file is an error while a
    missing default is not."""
    env = os.environ if env is None else env
    known = {f.name for f in fields(ServiceConfig)}
    values: dict = {}
    if path is None:
        path = env.get("RELART_CONFIG")
    if path is not None:
        with open(path, "rb") as fh:
            raw = tomli.load(fh)
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for key, value in raw.items():
            values[key] = _coerce(key, value)
    for env_name, key in _ENV_MAP.items():
        if env_name in env:
            values[key] = _coerce(key, env[env_name])
    return ServiceConfig(**values)

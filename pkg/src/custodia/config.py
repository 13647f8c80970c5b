"""Service configuration: TOML file with CUSTODIA_* environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:        # Python 3.10
    import tomli as tomllib

from . import codec
from .state import (
    DEFAULT_CASE_STATUSES,
    DEFAULT_EVENT_STATUSES,
    DEFAULT_EVENT_TYPES,
    Vocabulary,
)

CONFIG_FILENAME = "config.toml"


@dataclass
class Config:
    bind_host: str = "127.0.0.1"
    bind_port: int = 8700
    ledger_path: Path = Path("data/ledger.log")
    store_path: Path = Path("data/store")
    admin_public_key: bytes | None = None
    case_statuses: tuple[str, ...] = DEFAULT_CASE_STATUSES
    event_statuses: tuple[str, ...] = DEFAULT_EVENT_STATUSES
    event_types: tuple[str, ...] = DEFAULT_EVENT_TYPES
    alert_buffer_size: int = 256
    static_dir: Path | None = None

    def vocabulary(self) -> Vocabulary:
        return Vocabulary(case_statuses=self.case_statuses,
                          event_statuses=self.event_statuses,
                          event_types=self.event_types)

    def to_toml(self) -> str:
        lines = [
            "[service]",
            f'bind_host = "{self.bind_host}"',
            f"bind_port = {self.bind_port}",
        ]
        if self.static_dir is not None:
            lines.append(f'static_dir = "{self.static_dir}"')
        lines += [
            "",
            "[paths]",
            f'ledger = "{self.ledger_path}"',
            f'store = "{self.store_path}"',
            "",
            "[admin]",
            f'public_key = "{self.admin_public_key.hex() if self.admin_public_key else ""}"',
            "",
            "[vocabulary]",
            f"case_statuses = {_toml_list(self.case_statuses)}",
            f"event_statuses = {_toml_list(self.event_statuses)}",
            f"event_types = {_toml_list(self.event_types)}",
            "",
            "[alerts]",
            f"buffer_size = {self.alert_buffer_size}",
            "",
        ]
        return "\n".join(lines)


def _toml_list(values) -> str:
    return "[" + ", ".join(f'"{v}"' for v in values) + "]"


def load_config(path: str | Path | None = None,
                base_dir: str | Path | None = None) -> Config:
    """Read the TOML config (if any), then apply CUSTODIA_* overrides.

    ``base_dir`` anchors relative ledger/store paths, defaulting to the
    config file's directory.
    """
    cfg = Config()
    doc: dict = {}
    if path is not None:
        path = Path(path)
        doc = tomllib.loads(path.read_text())
        if base_dir is None:
            base_dir = path.parent
    base = Path(base_dir) if base_dir is not None else Path.cwd()

    service = doc.get("service", {})
    cfg.bind_host = service.get("bind_host", cfg.bind_host)
    cfg.bind_port = int(service.get("bind_port", cfg.bind_port))
    if service.get("static_dir"):
        cfg.static_dir = Path(service["static_dir"])
    paths = doc.get("paths", {})
    cfg.ledger_path = Path(paths.get("ledger", cfg.ledger_path))
    cfg.store_path = Path(paths.get("store", cfg.store_path))
    admin = doc.get("admin", {})
    if admin.get("public_key"):
        cfg.admin_public_key = codec.from_hex(admin["public_key"], 32, "admin public key")
    vocab = doc.get("vocabulary", {})
    if vocab.get("case_statuses"):
        cfg.case_statuses = tuple(vocab["case_statuses"])
    if vocab.get("event_statuses"):
        cfg.event_statuses = tuple(vocab["event_statuses"])
    if vocab.get("event_types"):
        cfg.event_types = tuple(vocab["event_types"])
    alerts = doc.get("alerts", {})
    cfg.alert_buffer_size = int(alerts.get("buffer_size", cfg.alert_buffer_size))

    env = os.environ
    cfg.bind_host = env.get("CUSTODIA_BIND_HOST", cfg.bind_host)
    cfg.bind_port = int(env.get("CUSTODIA_BIND_PORT", cfg.bind_port))
    if env.get("CUSTODIA_LEDGER_PATH"):
        cfg.ledger_path = Path(env["CUSTODIA_LEDGER_PATH"])
    if env.get("CUSTODIA_STORE_PATH"):
        cfg.store_path = Path(env["CUSTODIA_STORE_PATH"])
    if env.get("CUSTODIA_ADMIN_KEY"):
        cfg.admin_public_key = codec.from_hex(env["CUSTODIA_ADMIN_KEY"], 32,
                                              "admin public key")
    if env.get("CUSTODIA_ALERT_BUFFER"):
        cfg.alert_buffer_size = int(env["CUSTODIA_ALERT_BUFFER"])
    if env.get("CUSTODIA_STATIC_DIR"):
        cfg.static_dir = Path(env["CUSTODIA_STATIC_DIR"])

    if not cfg.ledger_path.is_absolute():
        cfg.ledger_path = base / cfg.ledger_path
    if not cfg.store_path.is_absolute():
        cfg.store_path = base / cfg.store_path
    return cfg

import sys
from dataclasses import dataclass
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from custodia.invoker import LocalInvoker
from custodia.keys import KeyPair
from custodia.node import CustodyNode, create_data_dir, open_node

REPO_ROOT = Path(__file__).parent.parent
MALORY_DIR = REPO_ROOT / "scenarios" / "malory"


@dataclass
class Actors:
    admin: KeyPair
    prosecutor: KeyPair
    investigator: KeyPair       # assigned to case rosters in staffed setups
    outsider: KeyPair           # registered investigator, never assigned
    auditor: KeyPair
    unregistered: KeyPair


@pytest.fixture
def actors() -> Actors:
    return Actors(*(KeyPair.generate() for _ in range(6)))


def make_node(base_dir: Path, name: str, admin: KeyPair) -> CustodyNode:
    cfg = create_data_dir(base_dir / name, admin.public)
    return open_node(cfg)


@pytest.fixture
def fresh_node(tmp_path, actors):
    """Uninitialized node; nothing on the chain yet."""
    node = make_node(tmp_path, "fresh", actors.admin)
    yield node
    node.close()


@pytest.fixture
def staffed_node(tmp_path, actors):
    """Initialized node with the standard cast registered."""
    node = make_node(tmp_path, "staffed", actors.admin)
    inv = LocalInvoker(node)
    inv.init(actors.admin, 1_000)
    inv.register_identity(actors.admin, actors.prosecutor.public.hex(),
                          "prosecutor", "District Prosecutor", 1_010)
    inv.register_identity(actors.admin, actors.investigator.public.hex(),
                          "investigator", "Internal Audit Lead", 1_020)
    inv.register_identity(actors.admin, actors.outsider.public.hex(),
                          "investigator", "Unassigned Analyst", 1_030)
    inv.register_identity(actors.admin, actors.auditor.public.hex(),
                          "auditor", "Compliance Auditor", 1_040)
    yield node
    node.close()


@pytest.fixture
def staffed(staffed_node):
    return LocalInvoker(staffed_node)


@pytest.fixture
def malory_dir():
    assert MALORY_DIR.exists(), "malory fixture missing; run scripts/build_malory_fixture.py"
    return MALORY_DIR


class LiveServer:
    """uvicorn in a daemon thread; TestClient cannot stream server-push."""

    def __init__(self, app):
        import socket
        import threading

        import uvicorn

        probe = socket.socket()
        probe.bind(("127.0.0.1", 0))
        self.port = probe.getsockname()[1]
        probe.close()
        self.url = f"http://127.0.0.1:{self.port}"
        config = uvicorn.Config(app, host="127.0.0.1", port=self.port,
                                log_level="error")
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    def __enter__(self):
        import time

        self.thread.start()
        deadline = time.time() + 10
        while not self.server.started:
            if time.time() > deadline:
                raise RuntimeError("uvicorn did not start in time")
            time.sleep(0.01)
        return self

    def __exit__(self, *exc):
        self.server.should_exit = True
        self.thread.join(timeout=10)

"""Dashboard parity against the live service: the built frontend signing
path must produce envelopes the service accepts, and the alert stream
must announce the submission (no refresh needed)."""

import json
import shutil
import subprocess
import threading

import pytest

from conftest import REPO_ROOT, LiveServer, make_node
from custodia.client import HttpInvoker
from custodia.invoker import LocalInvoker
from custodia.keys import KeyPair
from custodia.scenario import load_scenario
from custodia.service import create_app

FRONTEND_DIST = REPO_ROOT / "frontend" / "dist"

requires_frontend = pytest.mark.skipif(
    not (FRONTEND_DIST / "js" / "signing.js").exists() or shutil.which("node") is None,
    reason="frontend not built (run `npm run build` in frontend/) or node missing")


NODE_SUBMIT = """
const {{ keyFromSeedHex }} = await import("{dist}/js/signing.js");
const {{ ApiClient }} = await import("{dist}/js/api.js");
const api = new ApiClient("{base}");
const key = await keyFromSeedHex("{seed}");
const receipt = await api.submitEvent(key, {{
  caseId: 0,
  type: "analysis",
  description: "submitted through the dashboard signing path",
  status: "active",
  hash: "{digest}",
}}, {ts});
console.log(JSON.stringify(receipt));
"""


@requires_frontend
def test_dashboard_signing_path_against_live_service(tmp_path, malory_dir):
    admin = KeyPair.load(malory_dir / "keys" / "admin.key")
    lead = KeyPair.load(malory_dir / "keys" / "audit-lead.key")
    node = make_node(tmp_path, "dash", admin)
    load_scenario(malory_dir, LocalInvoker(node))

    app = create_app(node, static_dir=FRONTEND_DIST)
    with LiveServer(app) as server:
        # static assets are served by the api service
        page = HttpInvoker(server.url)._request("GET", "/app/")
        assert "custodia" in page.text

        # follow the alert stream like the dashboard's EventSource does
        alerts: list[dict] = []
        stream_client = HttpInvoker(server.url)

        def consume():
            for alert in stream_client.alerts():
                alerts.append(alert)
                return

        worker = threading.Thread(target=consume, daemon=True)
        worker.start()
        import time
        deadline = time.time() + 5
        while node.alert_hub.subscriber_count() == 0 and time.time() < deadline:
            time.sleep(0.02)

        digest_hex = node.store.put_blob(b"fresh dashboard evidence").hex()
        script = NODE_SUBMIT.format(
            dist=FRONTEND_DIST.as_uri(), base=server.url,
            seed=lead.secret.hex(), digest=digest_hex,
            ts=1_700_000_000_000)
        outcome = subprocess.run(
            ["node", "--input-type=module", "-e", script],
            capture_output=True, text=True, timeout=60)
        assert outcome.returncode == 0, outcome.stderr
        receipt = json.loads(outcome.stdout.strip().splitlines()[-1])

        # fixture holds events 0..8, so the dense next id is 9
        assert receipt["eventId"] == 9
        assert receipt["height"] == node.ledger.chain_length() - 1

        worker.join(timeout=10)
        assert alerts and alerts[0]["functionCode"] == "f12"
        assert alerts[0]["txId"] == receipt["txId"]

        event = node.state.get_event(9)
        assert event.evidence_hash.hex() == digest_hex
        assert event.custody[0][0] == lead.public
        stream_client.close()
    node.close()


@requires_frontend
def test_dashboard_rejects_unassigned_key_cleanly(tmp_path, malory_dir):
    admin = KeyPair.load(malory_dir / "keys" / "admin.key")
    outsider = KeyPair.load(malory_dir / "keys" / "it-forensics.key")
    node = make_node(tmp_path, "dash2", admin)
    load_scenario(malory_dir, LocalInvoker(node))
    length = node.ledger.chain_length()

    with LiveServer(create_app(node)) as server:
        script = NODE_SUBMIT.format(
            dist=FRONTEND_DIST.as_uri(), base=server.url,
            seed=outsider.secret.hex(), digest="ab" * 32,
            ts=1_700_000_000_000)
        outcome = subprocess.run(
            ["node", "--input-type=module", "-e", script],
            capture_output=True, text=True, timeout=60)
        assert outcome.returncode != 0
        assert "PermissionDenied" in outcome.stderr
    assert node.ledger.chain_length() == length
    node.close()

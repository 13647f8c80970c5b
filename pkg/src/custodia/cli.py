"""Operator command line covering the full investigation workflow:
case registration, evidence management, evidence analysis, reporting,
and administration, plus fixture loading and chain verification.

Every command works either against a running service (--server URL) or
directly on local ledger/store files (--local DIR). Mutating commands
sign with the keyfile given via --key.
"""

from __future__ import annotations

import json
import socket
import sys
from pathlib import Path

import click

from . import audit as audit_mod
from .client import HttpInvoker
from .config import load_config
from .errors import BadRequest, BindFailure, CorruptChain, CustodiaError
from .invoker import LocalInvoker
from .keys import KeyPair
from .node import CustodyNode, create_data_dir, open_node
from .scenario import load_scenario


class Context:
    def __init__(self, server: str | None, local: str | None,
                 keyfile: str | None, as_json: bool):
        if server and local:
            raise click.UsageError("--server and --local are mutually exclusive")
        self.server = server
        self.local = Path(local) if local else None
        self.keyfile = keyfile
        self.as_json = as_json
        self._node: CustodyNode | None = None
        self._invoker = None

    def node(self) -> CustodyNode:
        if self._node is None:
            if self.local is None:
                raise click.UsageError("this command needs --local DIR")
            config_path = self.local / "config.toml"
            if not config_path.exists():
                raise click.UsageError(
                    f"{config_path} not found; run `custodia init --local {self.local}` first")
            self._node = open_node(load_config(config_path))
        return self._node

    def invoker(self):
        if self._invoker is None:
            if self.server:
                self._invoker = HttpInvoker(self.server)
            else:
                self._invoker = LocalInvoker(self.node())
        return self._invoker

    def signer(self) -> KeyPair:
        if not self.keyfile:
            raise click.UsageError("this command needs --key KEYFILE")
        return KeyPair.load(self.keyfile)

    def emit(self, doc: dict, text: str) -> None:
        if self.as_json:
            click.echo(json.dumps(doc, indent=2, sort_keys=True))
        else:
            click.echo(text)


pass_context = click.make_pass_decorator(Context)


def run_guarded(ctx: Context, fn):
    try:
        return fn()
    except CustodiaError as exc:
        if ctx.as_json:
            click.echo(json.dumps({"code": exc.code, "message": exc.message}))
        else:
            click.echo(f"error [{exc.code}]: {exc.message}", err=True)
        sys.exit(exc.exit_code)


@click.group()
@click.option("--server", metavar="URL", help="service base URL, e.g. http://127.0.0.1:8700")
@click.option("--local", metavar="DIR", help="operate directly on a local data directory")
@click.option("--key", "keyfile", metavar="FILE", help="signing keyfile for mutating commands")
@click.option("--json", "as_json", is_flag=True, help="machine-readable output")
@click.pass_context
def main(ctx, server, local, keyfile, as_json):
    """Tamper-evident chain-of-custody ledger for financial-crime investigations."""
    ctx.obj = Context(server, local, keyfile, as_json)


@main.command()
@click.argument("path", type=click.Path())
@pass_context
def keygen(ctx, path):
    """Generate a signing keypair and write the 2-line keyfile."""
    pair = KeyPair.generate()
    pair.save(path)
    ctx.emit({"keyfile": path, "publicKey": pair.public.hex()},
             f"wrote {path} (public key {pair.public.hex()})")


@main.command()
@click.option("--timestamp", type=int, default=None, help="transaction timestamp (ms)")
@pass_context
def init(ctx, timestamp):
    """Create the investigation system (constructor transaction)."""
    def run():
        signer = ctx.signer()
        if ctx.local is not None and not (ctx.local / "config.toml").exists():
            create_data_dir(ctx.local, signer.public)
        doc = ctx.invoker().init(signer, timestamp_ms=timestamp)
        ctx.emit(doc, f"initialized; genesis tx {doc['txId'][:16]}… at height {doc['height']}")
    run_guarded(ctx, run)


# -- identities ---------------------------------------------------------------

@main.group()
def identity():
    """Identity registry administration (bootstrap admin only)."""


@identity.command("register")
@click.option("--identity-key", required=True, help="public key hex of the new identity")
@click.option("--role", required=True,
              type=click.Choice(["prosecutor", "investigator", "auditor"]))
@click.option("--name", required=True, help="display name")
@click.option("--timestamp", type=int, default=None)
@pass_context
def identity_register(ctx, identity_key, role, name, timestamp):
    def run():
        doc = ctx.invoker().register_identity(ctx.signer(), identity_key, role,
                                              name, timestamp_ms=timestamp)
        ctx.emit(doc, f"registered {role} {name!r} ({identity_key[:16]}…)")
    run_guarded(ctx, run)


@identity.command("list")
@pass_context
def identity_list(ctx):
    def run():
        doc = ctx.invoker().identities()
        lines = [f"{i['key']} {i['role']} {i['displayName']}"
                 for i in doc["identities"]]
        ctx.emit(doc, "\n".join(lines) if lines else "no identities registered")
    run_guarded(ctx, run)


@main.command()
@pass_context
def whoami(ctx):
    """Show the identity behind the --key file."""
    def run():
        signer = ctx.signer()
        key_hex = signer.public.hex()
        meta = ctx.invoker().meta()
        match = next((i for i in ctx.invoker().identities()["identities"]
                      if i["key"] == key_hex), None)
        if match:
            doc = dict(match)
            text = f"{key_hex} {match['role']} {match['displayName']}"
        elif meta.get("adminKey") == key_hex:
            doc = {"key": key_hex, "role": "admin", "displayName": "bootstrap admin"}
            text = f"{key_hex} bootstrap-admin"
        else:
            doc = {"key": key_hex, "role": None}
            text = f"{key_hex} (not registered)"
        ctx.emit(doc, text)
    run_guarded(ctx, run)


# -- cases ----------------------------------------------------------------------

@main.group()
def case():
    """Register and administer investigation cases."""


@case.command("add")
@click.option("--name", required=True)
@click.option("--description", required=True)
@click.option("--responsible", required=True, help="public key hex of the responsible")
@click.option("--global-id", "global_id", required=True)
@click.option("--hash", "case_hash", help="64-hex evidence-directory digest")
@click.option("--hash-file", "hash_file", type=click.Path(exists=True),
              help="file to hash (stored as evidence) for the case pointer")
@click.option("--timestamp", type=int, default=None)
@pass_context
def case_add(ctx, name, description, responsible, global_id, case_hash,
             hash_file, timestamp):
    def run():
        if not case_hash and not hash_file:
            raise BadRequest("one of --hash or --hash-file is required")
        digest = case_hash
        if hash_file:
            digest = ctx.invoker().put_evidence(Path(hash_file).read_bytes())["digest"]
        doc = ctx.invoker().add_case(ctx.signer(), name, description, responsible,
                                     global_id, digest, timestamp_ms=timestamp)
        ctx.emit(doc, f"case {doc['caseId']} created (tx {doc['txId'][:16]}…)")
    run_guarded(ctx, run)


@case.command("close")
@click.argument("case_id", type=int)
@click.option("--timestamp", type=int, default=None)
@pass_context
def case_close(ctx, case_id, timestamp):
    def run():
        doc = ctx.invoker().update_case_status(ctx.signer(), case_id, "closed",
                                               timestamp_ms=timestamp)
        ctx.emit(doc, f"case {case_id} closed")
    run_guarded(ctx, run)


@case.command("status")
@click.argument("case_id", type=int)
@click.argument("status")
@click.option("--timestamp", type=int, default=None)
@pass_context
def case_status(ctx, case_id, status, timestamp):
    """Set a case status (open, closed, or a configured extension)."""
    def run():
        doc = ctx.invoker().update_case_status(ctx.signer(), case_id, status,
                                               timestamp_ms=timestamp)
        ctx.emit(doc, f"case {case_id} status set to {status}")
    run_guarded(ctx, run)


@case.command("describe")
@click.argument("case_id", type=int)
@click.argument("description")
@click.option("--timestamp", type=int, default=None)
@pass_context
def case_describe(ctx, case_id, description, timestamp):
    def run():
        doc = ctx.invoker().update_case_description(ctx.signer(), case_id,
                                                    description, timestamp_ms=timestamp)
        ctx.emit(doc, f"case {case_id} description updated")
    run_guarded(ctx, run)


@case.command("responsible")
@click.argument("case_id", type=int)
@click.argument("key_hex")
@click.option("--timestamp", type=int, default=None)
@pass_context
def case_responsible(ctx, case_id, key_hex, timestamp):
    def run():
        doc = ctx.invoker().update_case_responsible(ctx.signer(), case_id, key_hex,
                                                    timestamp_ms=timestamp)
        ctx.emit(doc, f"case {case_id} responsible updated")
    run_guarded(ctx, run)


@case.command("assign")
@click.argument("case_id", type=int)
@click.argument("investigator_hex")
@click.option("--timestamp", type=int, default=None)
@pass_context
def case_assign(ctx, case_id, investigator_hex, timestamp):
    """Add an investigator to the case roster."""
    def run():
        doc = ctx.invoker().add_case_investigator(ctx.signer(), case_id,
                                                  investigator_hex,
                                                  timestamp_ms=timestamp)
        ctx.emit(doc, f"investigator added to case {case_id}")
    run_guarded(ctx, run)


@case.command("list")
@pass_context
def case_list(ctx):
    def run():
        doc = ctx.invoker().list_cases()
        lines = [f"{doc['count']} case(s)"]
        for c in doc["cases"]:
            lines.append(f"case {c['caseId']} {c['name']!r} status={c['status']} "
                         f"events={len(c['eventIds'])} hash={c['caseHash']}")
        ctx.emit(doc, "\n".join(lines))
    run_guarded(ctx, run)


@case.command("show")
@click.argument("case_id", type=int)
@pass_context
def case_show(ctx, case_id):
    def run():
        c = ctx.invoker().get_case(case_id)
        text = (f"case {c['caseId']} {c['name']!r}\n"
                f"  status       {c['status']}\n"
                f"  description  {c['description']}\n"
                f"  responsible  {c['responsible']}\n"
                f"  global id    {c['globalId']}\n"
                f"  created      {c['createdAtMs']}\n"
                f"  hash         {c['caseHash']}\n"
                f"  investigators {len(c['investigators'])}\n"
                f"  events       {c['eventIds']}")
        ctx.emit(c, text)
    run_guarded(ctx, run)


# -- events -----------------------------------------------------------------------

@main.group()
def event():
    """Evidence events inside a case."""


@event.command("add")
@click.argument("case_id", type=int)
@click.option("--type", "event_type", required=True)
@click.option("--description", required=True)
@click.option("--status", default="active", show_default=True)
@click.option("--hash", "evidence_hash", help="64-hex digest already on record")
@click.option("--file", "evidence_file", type=click.Path(exists=True),
              help="evidence file to store and hash")
@click.option("--descriptor", "descriptor_file", type=click.Path(exists=True),
              help="JSON or CSV descriptor stored beside the evidence")
@click.option("--timestamp", type=int, default=None)
@pass_context
def event_add(ctx, case_id, event_type, description, status, evidence_hash,
              evidence_file, descriptor_file, timestamp):
    def run():
        if not evidence_hash and not evidence_file:
            raise BadRequest("one of --hash or --file is required")
        digest = evidence_hash
        if evidence_file:
            digest = ctx.invoker().put_evidence(Path(evidence_file).read_bytes())["digest"]
            if descriptor_file:
                desc_path = Path(descriptor_file)
                fmt = "csv" if desc_path.suffix == ".csv" else "json"
                ctx.invoker().attach_descriptor(digest, fmt, desc_path.read_bytes())
        doc = ctx.invoker().add_event(ctx.signer(), case_id, event_type, description,
                                      status, digest, timestamp_ms=timestamp)
        ctx.emit(doc, f"event {doc['eventId']} added to case {case_id} "
                      f"(digest {digest[:16]}…, tx {doc['txId'][:16]}…)")
    run_guarded(ctx, run)


@event.command("status")
@click.argument("event_id", type=int)
@click.argument("status")
@click.option("--timestamp", type=int, default=None)
@pass_context
def event_status(ctx, event_id, status, timestamp):
    """Update an event status ("deleted" records evidence destruction)."""
    def run():
        doc = ctx.invoker().update_event_status(ctx.signer(), event_id, status,
                                                timestamp_ms=timestamp)
        ctx.emit(doc, f"event {event_id} status set to {status}")
    run_guarded(ctx, run)


@event.command("list")
@click.argument("case_id", type=int)
@pass_context
def event_list(ctx, case_id):
    def run():
        doc = ctx.invoker().list_case_events(case_id)
        lines = [f"{doc['count']} event(s) in case {case_id}"]
        for e in doc["events"]:
            lines.append(f"event {e['eventId']} type={e['type']} status={e['status']} "
                         f"digest={e['evidenceHash']}")
        ctx.emit(doc, "\n".join(lines))
    run_guarded(ctx, run)


@event.command("show")
@click.argument("event_id", type=int)
@pass_context
def event_show(ctx, event_id):
    def run():
        e = ctx.invoker().get_event(event_id)
        custody = "\n".join(f"    {h['owner']} @ {h['timestampMs']}"
                            for h in e["custody"])
        text = (f"event {e['eventId']} (case {e['caseId']})\n"
                f"  type        {e['type']}\n"
                f"  status      {e['status']}\n"
                f"  description {e['description']}\n"
                f"  digest      {e['evidenceHash']}\n"
                f"  created     {e['createdAtMs']}\n"
                f"  custody:\n{custody}")
        ctx.emit(e, text)
    run_guarded(ctx, run)


# -- custody ----------------------------------------------------------------------

@main.group()
def custody():
    """Evidence custody transfers."""


@custody.command("transfer")
@click.argument("event_id", type=int)
@click.option("--to", "new_owner", required=True, help="public key hex of the new owner")
@click.option("--timestamp", type=int, default=None)
@pass_context
def custody_transfer(ctx, event_id, new_owner, timestamp):
    def run():
        doc = ctx.invoker().transfer_custody(ctx.signer(), event_id, new_owner,
                                             timestamp_ms=timestamp)
        ctx.emit(doc, f"custody of event {event_id} transferred to {new_owner[:16]}…")
    run_guarded(ctx, run)


# -- evidence blobs ------------------------------------------------------------------

@main.group()
def evidence():
    """Content-addressed evidence blobs."""


@evidence.command("put")
@click.argument("path", type=click.Path(exists=True))
@click.option("--descriptor", "descriptor_file", type=click.Path(exists=True))
@pass_context
def evidence_put(ctx, path, descriptor_file):
    def run():
        doc = ctx.invoker().put_evidence(Path(path).read_bytes())
        if descriptor_file:
            desc_path = Path(descriptor_file)
            fmt = "csv" if desc_path.suffix == ".csv" else "json"
            ctx.invoker().attach_descriptor(doc["digest"], fmt, desc_path.read_bytes())
        ctx.emit(doc, f"stored {path} as {doc['digest']}")
    run_guarded(ctx, run)


@evidence.command("get")
@click.argument("digest_hex")
@click.option("-o", "--output", type=click.Path(), required=True)
@pass_context
def evidence_get(ctx, digest_hex, output):
    def run():
        content = ctx.invoker().get_evidence(digest_hex)
        Path(output).write_bytes(content)
        ctx.emit({"digest": digest_hex, "length": len(content), "output": output},
                 f"wrote {len(content)} bytes to {output}")
    run_guarded(ctx, run)


@evidence.command("purge")
@click.argument("digest_hex")
@pass_context
def evidence_purge(ctx, digest_hex):
    """Remove local blob bytes after on-ledger destruction (local mode only)."""
    def run():
        node = ctx.node()
        node.store.purge_blob(bytes.fromhex(digest_hex))
        ctx.emit({"digest": digest_hex, "purged": True}, f"purged {digest_hex}")
    run_guarded(ctx, run)


@main.group()
def store():
    """Evidence store maintenance."""


@store.command("audit")
@pass_context
def store_audit(ctx):
    """Full-store sweep: re-hash every blob, one line per blob."""
    def run():
        text = ctx.invoker().store_audit()
        if ctx.as_json:
            lines = [l.split() for l in text.splitlines() if l]
            ctx.emit({"blobs": [{"digest": d, "length": int(n), "status": s}
                                for d, n, s in lines]}, text)
        else:
            click.echo(text.rstrip("\n"))
    run_guarded(ctx, run)


# -- chain-level commands ----------------------------------------------------------

@main.command()
@pass_context
def stats(ctx):
    """Global counters: number of cases and registered events."""
    def run():
        doc = ctx.invoker().stats()
        ctx.emit(doc, f"{doc['cases']} case(s), {doc['events']} event(s)")
    run_guarded(ctx, run)


@main.command()
@pass_context
def verify(ctx):
    """Re-hash and re-verify the whole chain."""
    def run():
        doc = ctx.invoker().verify()
        if doc.get("ok"):
            ctx.emit(doc, f"chain OK, {doc['blocks']} blocks")
        else:
            ctx.emit(doc, f"chain FAILED at height {doc.get('firstBadHeight')} "
                          f"({doc.get('failureKind')})")
            sys.exit(CorruptChain.exit_code)
    run_guarded(ctx, run)


@main.command("audit-report")
@click.option("--case", "case_id", type=int, default=None, help="narrow to one case")
@click.option("--with-store", is_flag=True,
              help="add the store consistency section (local mode)")
@pass_context
def audit_report(ctx, case_id, with_store):
    """Courtroom audit report derived purely from ledger replay."""
    def run():
        node = ctx.node()
        report = audit_mod.build_report(
            node.ledger, node.config.admin_public_key, node.config.vocabulary(),
            case_id=case_id, store=node.store if with_store else None)
        if not report.chain_ok:
            ctx.emit(report.to_dict(), report.render_text())
            sys.exit(CorruptChain.exit_code)
        ctx.emit(report.to_dict(), report.render_text().rstrip("\n"))
    run_guarded(ctx, run)


@main.group()
def scenario():
    """Scripted investigation fixtures."""


@scenario.command("load")
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@pass_context
def scenario_load(ctx, directory):
    """Replay a fixture: identities, script, evidence files."""
    def run():
        if ctx.local is not None and not (ctx.local / "config.toml").exists():
            # bootstrap a fresh data dir under the fixture's admin key
            from .scenario import ScenarioFixture
            create_data_dir(ctx.local, ScenarioFixture(directory).admin.public)
        result = load_scenario(directory, ctx.invoker())
        doc = {"name": result.name, "cases": result.cases, "events": result.events,
               "chainOk": result.chain_ok, "stateMatches": result.state_matches}
        ctx.emit(doc, result.summary())
        if result.state_matches is False or not result.chain_ok:
            sys.exit(1)
    run_guarded(ctx, run)


@main.command()
@pass_context
def alerts(ctx):
    """Follow the live alert stream (server mode)."""
    def run():
        if not ctx.server:
            raise click.UsageError("alerts requires --server URL")
        for alert in ctx.invoker().alerts():
            click.echo(json.dumps(alert) if ctx.as_json else
                       f"alert seq={alert['seq']} fn={alert['functionCode']} "
                       f"case={alert.get('caseId')} tx={alert['txId'][:16]}…")
    run_guarded(ctx, run)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@pass_context
def serve(ctx, config_path):
    """Run the HTTP service (verifies the chain before binding)."""
    def run():
        import uvicorn

        from .service import create_app

        cfg = load_config(config_path)
        probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        try:
            probe.bind((cfg.bind_host, cfg.bind_port))
        except OSError as exc:
            raise BindFailure(f"cannot bind {cfg.bind_host}:{cfg.bind_port}: {exc}")
        finally:
            probe.close()
        node = open_node(cfg)
        app = create_app(node, static_dir=cfg.static_dir)
        click.echo(f"serving on http://{cfg.bind_host}:{cfg.bind_port} "
                   f"(chain OK, {node.ledger.chain_length()} blocks)")
        uvicorn.run(app, host=cfg.bind_host, port=cfg.bind_port, log_level="warning")
    run_guarded(ctx, run)


if __name__ == "__main__":
    main()

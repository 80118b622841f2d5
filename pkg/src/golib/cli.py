"""golib command line: serve the API, seed fixtures, run admin actions."""
from __future__ import annotations

import argparse
import json
import sys

from .app import Platform
from .config import Config
from .gateway.server import GatewayServer
from .store import canonical


def _platform(args) -> Platform:
    overrides = {}
    if args.data_dir:
        overrides["data_dir"] = args.data_dir
    config = Config.from_env(**overrides)
    return Platform(config)


def cmd_serve(args) -> int:
    platform = _platform(args)
    try:
        admin = platform.ensure_admin()
        port = args.port if args.port is not None else platform.config.port
        server = GatewayServer(platform, port=port, static_dir=args.static_dir)
        print(f"golib serving on http://127.0.0.1:{server.port}", flush=True)
        print(f"data dir: {platform.config.data_dir}", flush=True)
        print(f"admin account: {admin['email']}", flush=True)
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            server.stop()
        return 0
    finally:
        platform.close()


def cmd_seed(args) -> int:
    platform = _platform(args)
    try:
        summary = platform.seed_file(args.fixture)
        print(json.dumps(summary))
        return 0
    finally:
        platform.close()


def _decide(args, decision: str) -> int:
    platform = _platform(args)
    try:
        admin = platform.ensure_admin()
        actor = platform.identity.get_account(admin["id"])
        request = platform.directory.decide_become_book_request(actor, args.request_id, decision)
        print(f"{request['id']}: {request['state']}")
        return 0
    finally:
        platform.close()


def cmd_approve(args) -> int:
    return _decide(args, "Accepted")


def cmd_reject(args) -> int:
    return _decide(args, "Rejected")


def cmd_export_ledger(args) -> int:
    platform = _platform(args)
    try:
        for entry in platform.payments.ledger_entries():
            print(canonical(entry))
        return 0
    finally:
        platform.close()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="golib", description=__doc__)
    parser.add_argument("--data-dir", help="data directory (or GOLIB_DATA_DIR)")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP gateway")
    serve.add_argument("--port", type=int, default=None, help="listen port (or GOLIB_PORT)")
    serve.add_argument("--static-dir", default=None, help="serve a web UI bundle from this directory")
    serve.set_defaults(fn=cmd_serve)

    seed = sub.add_parser("seed", help="load a fixture file")
    seed.add_argument("--fixture", required=True, help="path to a fixture JSON file")
    seed.set_defaults(fn=cmd_seed)

    approve = sub.add_parser("approve", help="accept a become-a-book request")
    approve.add_argument("request_id")
    approve.set_defaults(fn=cmd_approve)

    reject = sub.add_parser("reject", help="reject a become-a-book request")
    reject.add_argument("request_id")
    reject.set_defaults(fn=cmd_reject)

    export = sub.add_parser("export-ledger", help="print ledger entries as JSON lines")
    export.set_defaults(fn=cmd_export_ledger)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())

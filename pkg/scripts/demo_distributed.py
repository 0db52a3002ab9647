#!/usr/bin/env python3
"""Distributed-hosting demo: two service instances, one linked scenario.

Host B serves the bundled mobility document; host A serves a master
scenario that links it.  The resolver fetches across both instances and
the engine folds the linked totals into the master's scope.

Usage: python3 scripts/demo_distributed.py
"""

import json
import shutil
import sys
import tempfile
import threading
from pathlib import Path

from cfs.engine import compute
from cfs.resolver import Resolver
from cfs.server import ServerConfig, build_server

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def start_host(directory: Path):
    httpd = build_server(ServerConfig(host="127.0.0.1", port=0, scenario_dir=directory))
    threading.Thread(target=httpd.serve_forever, daemon=True).start()
    return httpd, f"http://127.0.0.1:{httpd.server_address[1]}"


def main() -> int:
    workdir = Path(tempfile.mkdtemp(prefix="cfs-demo-"))
    dir_a, dir_b = workdir / "host-a", workdir / "host-b"
    dir_a.mkdir(), dir_b.mkdir()

    shutil.copy(FIXTURES / "mobility.json", dir_b / "mobility.json")
    host_b, base_b = start_host(dir_b)

    master = {
        "title": "Commuting (master)",
        "scopes": [
            {
                "level": "Scope 1",
                "description": "Own fleet plus a shared reference scenario",
                "list": [
                    {
                        "type": "component",
                        "quantity": "120",
                        "quantity_unit": "kWh",
                        "source": {
                            "name": "Office electricity",
                            "type": "electricity",
                            "emissions": {
                                "co2e": {"value": "0.275", "unit": "kg", "base unit": "kWh"}
                            },
                        },
                    },
                    {"type": "link", "uri": f"{base_b}/scenarios/mobility", "quantity": "2"},
                ],
            }
        ],
    }
    (dir_a / "master.json").write_text(json.dumps(master, indent=2))
    host_a, base_a = start_host(dir_a)

    print(f"host A (master):  {base_a}/scenarios/master")
    print(f"host B (linked):  {base_b}/scenarios/mobility")
    print()

    tree = Resolver().resolve(f"{base_a}/scenarios/master")
    report = compute(tree)
    print(json.dumps(report.to_json_obj(), indent=2))

    host_a.shutdown(), host_b.shutdown()
    host_a.server_close(), host_b.server_close()
    shutil.rmtree(workdir, ignore_errors=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Interactive analysis over the HTTP service.

Starts the service in-process, uploads the bundled corpus, and performs the
analyst loop a browser client would: read the spectrogram, drill into a peak
year, merge two variants of the same work (with the optimistic version
check), annotate the result, and download the workspace.
"""

import socket
import threading
import time
from pathlib import Path

import httpx
import uvicorn

from rpyscope.service import create_app

CORPUS = Path(__file__).resolve().parent.parent / "tests" / "data" / "synthetic_corpus.txt"

sock = socket.socket()
sock.bind(("127.0.0.1", 0))
port = sock.getsockname()[1]
sock.close()

server = uvicorn.Server(uvicorn.Config(create_app(), host="127.0.0.1", port=port,
                                       log_level="warning"))
threading.Thread(target=server.run, daemon=True).start()
base = f"http://127.0.0.1:{port}"
while True:
    try:
        httpx.get(base + "/api", timeout=1)
        break
    except httpx.TransportError:
        time.sleep(0.05)

config = {
    "rpy": {"lo": 1900, "hi": 1995, "keep_missing": False},
    "py": {"lo": 1962, "hi": 2018, "keep_missing": False},
    "max_cr": 0,
}
session = httpx.post(base + "/sessions", json={
    "export_text": CORPUS.read_text(encoding="utf-8"), "config": config,
}).json()
sid, version = session["session_id"], session["version"]
print("session:", session["info"])

points = httpx.get(f"{base}/sessions/{sid}/spectrum").json()
busiest = max(points, key=lambda p: p["ncr"])
print(f"busiest year: {busiest['rpy']} with ncr {busiest['ncr']}")

peaks = httpx.get(f"{base}/sessions/{sid}/peaks", params={"min_dev": 1}).json()
print("peak years:", [p["rpy"] for p in peaks])

drill = httpx.get(f"{base}/sessions/{sid}/years/1924/refs").json()
for ref in drill["refs"]:
    flag = "*" if ref["top"] else " "
    print(f"  {flag} share={ref['share']:.2f} ncr={ref['ncr']} {ref['raw']}")

# merge the two spelling variants of the 1924 work
ids = [r["variant_id"] for r in drill["refs"] if r["first_author"].startswith("Ang")]
merged = httpx.post(f"{base}/sessions/{sid}/merge",
                    json={"variant_ids": ids, "expected_version": version})
version = merged.json()["version"]
print("after merge:", merged.json()["info"])

# a second client still holding the old version gets a conflict, not a lost update
conflict = httpx.post(f"{base}/sessions/{sid}/merge",
                      json={"variant_ids": ids, "expected_version": 1})
print("stale client gets:", conflict.status_code, conflict.json()["detail"]["error"])

merged_row = next(r for r in httpx.get(f"{base}/sessions/{sid}/years/1924/refs").json()["refs"]
                  if r["merged"])
note = httpx.post(f"{base}/sessions/{sid}/annotate",
                  json={"variant_id": merged_row["variant_id"],
                        "text": "statistical treatment of sunshine records",
                        "expected_version": version})
version = note.json()["version"]

workspace_doc = httpx.get(f"{base}/sessions/{sid}/export", params={"type": "workspace"}).json()
print(f"downloaded workspace: {len(workspace_doc['variants'])} variants, "
      f"{len(workspace_doc['history'])} history entries, "
      f"annotations={workspace_doc['annotations']}")

server.should_exit = True

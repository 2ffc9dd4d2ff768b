#!/usr/bin/env python3
"""Record console test fixtures: a raw one-episode SSE log and a 20-object
scene snapshot, captured from a real server.

Run from the repo root:  python tools/record_console_fixture.py
"""

import json
import socket
import threading
import time
from pathlib import Path

import httpx
import uvicorn

from twolane import serde, sim
from twolane.config import Config
from twolane.service import build_app

FIXTURES = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    server = uvicorn.Server(
        uvicorn.Config(build_app(Config()), host="127.0.0.1", port=port, log_level="error")
    )
    threading.Thread(target=server.run, daemon=True).start()
    while not server.started:
        time.sleep(0.02)

    client = httpx.Client(base_url=f"http://127.0.0.1:{port}", timeout=30)
    session_id = client.post("/v1/sessions", json={}).json()["id"]
    info = client.post(
        f"/v1/sessions/{session_id}/reset", json={"seed": 12, "family": "word_correction"}
    ).json()
    episode = client.post(
        f"/v1/sessions/{session_id}/instruction", json={"text": info["instruction_hint"]}
    ).json()
    assert episode["success"], "fixture episode must succeed"

    raw = []
    with client.stream(
        "GET", f"/v1/sessions/{session_id}/stream", params={"idle_timeout_s": 0.3}
    ) as resp:
        for chunk in resp.iter_text():
            raw.append(chunk)
    (FIXTURES / "episode_stream.txt").write_text("".join(raw), encoding="utf-8")

    scene, _ = sim.gen_scene(7, "math_reasoning")  # 20 objects
    (FIXTURES / "scene_20objects.json").write_text(
        json.dumps(serde.scene_to_dict(scene), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    server.should_exit = True
    print(f"wrote fixtures to {FIXTURES}")


if __name__ == "__main__":
    main()

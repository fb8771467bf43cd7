import json
import threading
import urllib.error
import urllib.request

import pytest

from rolecast import synthetic


@pytest.fixture(scope="session")
def world():
    return synthetic.make_world(n_subtypes=4, n_roles=5, n_entity_types=4, seed=11)


@pytest.fixture(scope="session")
def docs(world):
    return synthetic.random_corpus(world, 12, seed=23)


def http_json(method, url, payload=None, timeout=10):
    """(status, parsed_body, raw_bytes) for a JSON request; never raises on 4xx/5xx."""
    data = json.dumps(payload).encode("utf-8") if payload is not None else None
    request = urllib.request.Request(
        url, data=data, method=method,
        headers={"Content-Type": "application/json"} if data else {},
    )
    try:
        with urllib.request.urlopen(request, timeout=timeout) as response:
            raw = response.read()
            return response.status, json.loads(raw), raw
    except urllib.error.HTTPError as exc:
        raw = exc.read()
        try:
            body = json.loads(raw)
        except json.JSONDecodeError:
            body = None
        return exc.code, body, raw


class ServerThread:
    """Run an http.server instance on a background thread."""

    def __init__(self, server):
        self.server = server
        self.port = server.server_address[1]
        self.base = f"http://127.0.0.1:{self.port}"
        # small poll interval so shutdown() returns promptly in tests
        self._thread = threading.Thread(
            target=lambda: server.serve_forever(poll_interval=0.02), daemon=True,
        )

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self.server.shutdown()
        self.server.server_close()
        self._thread.join(timeout=5)

"""Hosting everything over HTTP: a scorer endpoint speaking the wire
protocol, and the workbench facade that the browser UI talks to.

Run: python demos/06_service_and_wire.py
"""

import json
import threading
import urllib.request

from rolecast.constraints import shipped_constraints
from rolecast.entailment import EntailmentJudgment, LookupBackend, Scorer, make_entailment_server
from rolecast.service import WorkbenchService, make_service_server
from rolecast.templates import shipped_library

CONTEXT = "John D. Idol was hired as the company's new chief executive."


def post(url, payload):
    request = urllib.request.Request(
        url, data=json.dumps(payload).encode(), method="POST",
        headers={"Content-Type": "application/json"},
    )
    with urllib.request.urlopen(request, timeout=5) as response:
        return json.loads(response.read())


def run_server(server):
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return thread


def main():
    oracle = LookupBackend({
        (CONTEXT, "John D. Idol was hired."): EntailmentJudgment(0.95, 0.04, 0.01),
    })

    # 1. Any backend can be hosted behind POST /v1/entail.
    scorer_server = make_entailment_server(oracle, port=0)
    run_server(scorer_server)
    port = scorer_server.server_address[1]
    reply = post(f"http://127.0.0.1:{port}/v1/entail", {
        "id": "demo",
        "pairs": [{"premise": CONTEXT, "hypothesis": "John D. Idol was hired."}],
    })
    print("wire protocol reply:", reply)

    # 2. The facade exposes verbalization, prediction, template editing and
    #    authoring timers for the workbench UI.
    service = WorkbenchService(
        library=shipped_library("main"),
        table=shipped_constraints("ace"),
        scorer=Scorer(oracle),
    )
    facade = make_service_server(service, port=0)
    run_server(facade)
    base = f"http://127.0.0.1:{facade.server_address[1]}"

    body = {
        "context": CONTEXT,
        "trigger": {"start": 17, "end": 22, "type": "Personnel",
                    "subtype": "Personnel.Start-Position"},
        "candidate": {"start": 0, "end": 12, "entity_type": "PER"},
    }
    print("verbalize:", post(base + "/v1/verbalize", body))
    print("predict:", post(base + "/v1/predict", body))

    session = post(base + "/v1/sessions", {})
    post(f"{base}/v1/sessions/{session['id']}/heartbeat", {"role": "Person", "seconds": 60})
    with urllib.request.urlopen(f"{base}/v1/sessions/{session['id']}/timers") as response:
        print("timers:", json.loads(response.read()))

    scorer_server.shutdown()
    facade.shutdown()


if __name__ == "__main__":
    main()

"""Pluggable entailment scoring.

Any model that labels a (premise, hypothesis) pair with entail / neutral /
contradict probabilities can sit behind the :class:`Scorer`. Three backends
ship here:

* :class:`LookupBackend` — a deterministic oracle over a scripted table,
  answering pure neutral (0, 1, 0) for unknown pairs so that un-scripted
  hypotheses can never win an argmax in tests.
* :class:`ConstantBackend` — the same judgment for every pair.
* :class:`RemoteBackend` — a client for the wire protocol below, which is
  how real NLI checkpoints are reached (model execution stays outside this
  package, behind the endpoint).

Wire protocol, bit-exact:

    POST /v1/entail
    {"id": "<string>", "pairs": [{"premise": "...", "hypothesis": "..."}, ...]}
    -> {"id": "<same>", "judgments": [{"entail": x, "neutral": y, "contradict": z}, ...]}

Order matches the request; probabilities are decimal floats that must sum
to 1 within 1e-6. :func:`serve_entailment` hosts any backend behind this
protocol.

The Scorer adds fixed-size batching (order-preserving, no reordering for
throughput) and an optional in-process cache: with the cache on, each
distinct pair reaches the backend at most once per scorer lifetime, and
results are identical to running with the cache off. Premises are passed
through untruncated, whatever their length.
"""

from __future__ import annotations

import json
import threading
import urllib.error
import urllib.request
import uuid
from dataclasses import dataclass
from pathlib import Path

from ._http import BadRequest, JsonRequestHandler, make_server
from .errors import RolecastError
from .ioutil import dumps_canonical, read_jsonl

Pair = tuple[str, str]  # (premise, hypothesis)

PROBABILITY_SUM_TOLERANCE = 1e-6


class EntailmentError(RolecastError):
    pass


class InvalidJudgmentError(EntailmentError, ValueError):
    pass


class BackendRequestError(EntailmentError):
    """Backend unreachable, misaligned, or returning invalid data.

    `index` names the offending pair within the request when known.
    """

    def __init__(self, message: str, index: int | None = None):
        if index is not None:
            message = f"pair {index}: {message}"
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class EntailmentJudgment:
    entail: float
    neutral: float
    contradict: float

    def __post_init__(self):
        for name, p in (("entail", self.entail), ("neutral", self.neutral),
                        ("contradict", self.contradict)):
            if not isinstance(p, (int, float)) or not 0.0 <= p <= 1.0:
                raise InvalidJudgmentError(f"{name} probability {p!r} outside [0, 1]")
        total = self.entail + self.neutral + self.contradict
        if abs(total - 1.0) > PROBABILITY_SUM_TOLERANCE:
            raise InvalidJudgmentError(f"probabilities sum to {total}, not 1")

    def as_wire(self) -> dict:
        return {"entail": self.entail, "neutral": self.neutral, "contradict": self.contradict}


NEUTRAL_DEFAULT = EntailmentJudgment(0.0, 1.0, 0.0)


def validate_pairs(pairs) -> list[Pair]:
    pairs = list(pairs)
    if not pairs:
        raise EntailmentError("empty pair batch")
    out = []
    for i, pair in enumerate(pairs):
        try:
            premise, hypothesis = pair
        except (TypeError, ValueError) as exc:
            raise BackendRequestError("not a (premise, hypothesis) pair", index=i) from exc
        if not isinstance(premise, str) or not premise:
            raise BackendRequestError("empty or non-string premise", index=i)
        if not isinstance(hypothesis, str) or not hypothesis:
            raise BackendRequestError("empty or non-string hypothesis", index=i)
        out.append((premise, hypothesis))
    return out


# ---------------------------------------------------------------------------
# Backends

class ConstantBackend:
    def __init__(self, judgment: EntailmentJudgment):
        self.judgment = judgment

    def score(self, pairs) -> list[EntailmentJudgment]:
        return [self.judgment] * len(list(pairs))


class LookupBackend:
    """Scripted oracle; unknown pairs answer the pure-neutral default."""

    def __init__(self, table: dict[Pair, EntailmentJudgment] | None = None,
                 default: EntailmentJudgment = NEUTRAL_DEFAULT):
        self.table = dict(table or {})
        self.default = default

    def score(self, pairs) -> list[EntailmentJudgment]:
        return [self.table.get((premise, hypothesis), self.default)
                for premise, hypothesis in pairs]

    @classmethod
    def from_file(cls, path) -> "LookupBackend":
        table = {}
        for lineno, record in read_jsonl(path, error=EntailmentError):
            try:
                key = (record["premise"], record["hypothesis"])
                table[key] = EntailmentJudgment(
                    record["entail"], record["neutral"], record["contradict"]
                )
            except (KeyError, TypeError, InvalidJudgmentError) as exc:
                raise EntailmentError(f"{path}, line {lineno}: {exc}") from exc
        return cls(table)


def save_lookup_table(table: dict[Pair, EntailmentJudgment], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for (premise, hypothesis) in sorted(table):
            j = table[(premise, hypothesis)]
            record = {"premise": premise, "hypothesis": hypothesis, **j.as_wire()}
            fh.write(dumps_canonical(record))
            fh.write("\n")


class RemoteBackend:
    """Client for the POST /v1/entail wire protocol."""

    def __init__(self, endpoint: str, timeout: float = 60.0):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout

    def score(self, pairs) -> list[EntailmentJudgment]:
        pairs = list(pairs)
        request_id = uuid.uuid4().hex
        body = dumps_canonical({
            "id": request_id,
            "pairs": [{"premise": p, "hypothesis": h} for p, h in pairs],
        }).encode("utf-8")
        request = urllib.request.Request(
            self.endpoint + "/v1/entail", data=body,
            headers={"Content-Type": "application/json"}, method="POST",
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as response:
                payload = json.loads(response.read())
        except urllib.error.HTTPError as exc:
            detail = exc.read().decode("utf-8", "replace")[:500]
            raise BackendRequestError(f"endpoint returned {exc.code}: {detail}") from exc
        except (urllib.error.URLError, OSError, json.JSONDecodeError) as exc:
            raise BackendRequestError(f"endpoint unreachable or malformed: {exc}") from exc
        if not isinstance(payload, dict) or payload.get("id") != request_id:
            raise BackendRequestError("response id does not echo the request id")
        judgments = payload.get("judgments")
        if not isinstance(judgments, list) or len(judgments) != len(pairs):
            raise BackendRequestError(
                f"expected {len(pairs)} judgments, got "
                f"{len(judgments) if isinstance(judgments, list) else type(judgments).__name__}"
            )
        out = []
        for i, row in enumerate(judgments):
            try:
                out.append(EntailmentJudgment(row["entail"], row["neutral"], row["contradict"]))
            except (KeyError, TypeError, InvalidJudgmentError) as exc:
                raise BackendRequestError(str(exc), index=i) from exc
        return out


# ---------------------------------------------------------------------------
# Scorer: batching + cache + trust-boundary validation

class Scorer:
    """Batched, optionally cached scoring over any backend.

    Batches are fixed-size slices in input order. The cache supports
    concurrent readers with serialized writers, and in-flight pairs are
    deduplicated across threads (single flight), so each distinct pair
    reaches the backend at most once for the scorer's lifetime even under
    concurrent calls. Judgments are immutable values, safe to share.
    """

    def __init__(self, backend, batch_size: int = 32, cache: bool = True):
        if batch_size < 1:
            raise EntailmentError(f"batch_size must be positive, got {batch_size}")
        self.backend = backend
        self.batch_size = batch_size
        self.cache_enabled = cache
        self._cache: dict[Pair, EntailmentJudgment] = {}
        self._inflight: dict[Pair, threading.Event] = {}
        self._lock = threading.Lock()

    def score_batch(self, pairs) -> list[EntailmentJudgment]:
        """Judgments aligned index-for-index with the input pairs."""
        pairs = validate_pairs(pairs)
        if not self.cache_enabled:
            results = []
            for start in range(0, len(pairs), self.batch_size):
                chunk = pairs[start:start + self.batch_size]
                results.extend(self._score_chunk(chunk, offset=start))
            return results

        results: dict[Pair, EntailmentJudgment] = {}
        remaining = []
        for p in pairs:
            if p not in results and p not in remaining:
                remaining.append(p)
        while remaining:
            owned: list[Pair] = []
            waits: list[threading.Event] = []
            with self._lock:
                for p in remaining:
                    if p in self._cache:
                        results[p] = self._cache[p]
                    elif p in self._inflight:
                        waits.append(self._inflight[p])
                    else:
                        self._inflight[p] = threading.Event()
                        owned.append(p)
            if owned:
                fresh: dict[Pair, EntailmentJudgment] = {}
                try:
                    for start in range(0, len(owned), self.batch_size):
                        chunk = owned[start:start + self.batch_size]
                        for pair, judgment in zip(chunk, self._score_chunk(chunk, offset=start)):
                            fresh[pair] = judgment
                finally:
                    # publish whatever succeeded and wake waiters either way;
                    # a waiter whose pair stayed unscored takes ownership next
                    # time around the loop
                    with self._lock:
                        self._cache.update(fresh)
                        for p in owned:
                            self._inflight.pop(p).set()
                results.update(fresh)
            for event in waits:
                event.wait()
            remaining = [p for p in remaining if p not in results]
        return [results[p] for p in pairs]

    def _score_chunk(self, chunk, offset: int) -> list[EntailmentJudgment]:
        judgments = self.backend.score(chunk)
        if len(judgments) != len(chunk):
            raise BackendRequestError(
                f"backend returned {len(judgments)} judgments for {len(chunk)} pairs",
                index=offset,
            )
        for i, j in enumerate(judgments):
            if not isinstance(j, EntailmentJudgment):
                try:
                    judgments[i] = EntailmentJudgment(*j)
                except (TypeError, InvalidJudgmentError) as exc:
                    raise BackendRequestError(str(exc), index=offset + i) from exc
        return judgments


# ---------------------------------------------------------------------------
# Backend configuration

@dataclass
class BackendConfig:
    kind: str  # remote | lookup | constant
    endpoint: str | None = None
    table_path: str | None = None
    constant: tuple[float, float, float] | None = None
    batch_size: int = 32
    cache: bool = True

    def __post_init__(self):
        if self.kind not in ("remote", "lookup", "constant"):
            raise EntailmentError(f"unknown backend kind {self.kind!r}")
        if self.kind == "remote" and not self.endpoint:
            raise EntailmentError("remote backend needs an endpoint")
        if self.kind == "lookup" and not self.table_path:
            raise EntailmentError("lookup backend needs a table_path")
        if self.kind == "constant":
            if self.constant is None:
                raise EntailmentError("constant backend needs a probability triple")
            EntailmentJudgment(*self.constant)
        if self.batch_size < 1:
            raise EntailmentError("batch_size must be positive")


def load_backend_config(path) -> BackendConfig:
    """Read a backend config file; table paths resolve against its directory."""
    path = Path(path)
    try:
        record = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise EntailmentError(f"{path}: {exc}") from exc
    try:
        config = BackendConfig(
            kind=record["kind"],
            endpoint=record.get("endpoint"),
            table_path=record.get("table"),
            constant=tuple(record["constant"]) if "constant" in record else None,
            batch_size=int(record.get("batch_size", 32)),
            cache=bool(record.get("cache", True)),
        )
    except (KeyError, TypeError) as exc:
        raise EntailmentError(f"{path}: malformed backend config ({exc})") from exc
    if config.table_path:
        config.table_path = str((path.parent / config.table_path).resolve())
    return config


def build_scorer(config: BackendConfig) -> Scorer:
    if config.kind == "constant":
        backend = ConstantBackend(EntailmentJudgment(*config.constant))
    elif config.kind == "lookup":
        backend = LookupBackend.from_file(config.table_path)
    else:
        backend = RemoteBackend(config.endpoint)
    return Scorer(backend, batch_size=config.batch_size, cache=config.cache)


# ---------------------------------------------------------------------------
# Hosting a backend behind the wire protocol

def make_entailment_server(adapter, host: str = "127.0.0.1", port: int = 0):
    """Threaded HTTP server exposing `adapter.score` as POST /v1/entail.

    `adapter` is any backend object; pass None to answer 503 until a model
    is attached (server.adapter is assignable).
    """

    class Handler(JsonRequestHandler):
        def do_POST(self):
            if self.path != "/v1/entail":
                self.send_error_json(404, f"unknown path {self.path}")
                return
            try:
                payload = self.read_json()
                request_id, pairs = _parse_entail_request(payload)
            except BadRequest as exc:
                self.send_error_json(400, str(exc))
                return
            backend = getattr(self.server, "adapter", None)
            if backend is None:
                self.send_error_json(503, "no scoring adapter attached")
                return
            try:
                judgments = backend.score(pairs)
                body = {"id": request_id, "judgments": [j.as_wire() for j in judgments]}
            except Exception as exc:  # adapter failure must not kill the server
                self.send_error_json(503, f"adapter failed: {exc}")
                return
            self.send_json(200, body)

    server = make_server(Handler, host, port)
    server.adapter = adapter
    return server


def _parse_entail_request(payload) -> tuple[str, list[Pair]]:
    if not isinstance(payload, dict):
        raise BadRequest("request body must be a JSON object")
    request_id = payload.get("id")
    if not isinstance(request_id, str) or not request_id:
        raise BadRequest("missing or non-string 'id'")
    rows = payload.get("pairs")
    if not isinstance(rows, list) or not rows:
        raise BadRequest("'pairs' must be a non-empty list")
    pairs = []
    for i, row in enumerate(rows):
        if not isinstance(row, dict):
            raise BadRequest(f"pairs[{i}] is not an object")
        premise, hypothesis = row.get("premise"), row.get("hypothesis")
        if not isinstance(premise, str) or not premise:
            raise BadRequest(f"pairs[{i}].premise missing or empty")
        if not isinstance(hypothesis, str) or not hypothesis:
            raise BadRequest(f"pairs[{i}].hypothesis missing or empty")
        pairs.append((premise, hypothesis))
    return request_id, pairs


def serve_entailment(adapter, host: str = "0.0.0.0", port: int = 8700) -> None:
    """Blocking entry point: host an adapter behind the wire protocol."""
    server = make_entailment_server(adapter, host, port)
    try:
        server.serve_forever()
    finally:
        server.server_close()

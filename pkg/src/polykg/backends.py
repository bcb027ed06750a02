"""Uniform interface to text generators, with three interchangeable backends.

* :class:`OracleBackend` answers from the graph itself (a perfect model),
* :class:`StaticBackend` serves predictions from a file,
* :class:`RemoteBackend` speaks the HTTP wire protocol of an inference service.

All backends return one candidate list per request, in request order, each
list sorted by score descending. Scores are opaque "higher is better" reals;
downstream consolidation works on ranks, never on raw scores.
"""

from __future__ import annotations

import json
import logging
import socket
import threading
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .linking import link
from .store import DESCRIPTION_PID, NAMES_PID, KnowledgeGraph, qid_sort_key
from .textnorm import normalize
from .verbalize import (
    INPUT_PATTERN,
    MissingLexicalization,
    TargetSurface,
    serialize_target,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GenerationRequest:
    input_text: str
    target_lang: str
    num_candidates: int = 1


@dataclass(frozen=True)
class GenerationCandidate:
    text: str
    score: float


class TransportError(RuntimeError):
    """A remote batch failed as a whole; `indices` lists the affected requests."""

    def __init__(self, message: str, indices: Sequence[int]):
        super().__init__(message)
        self.indices = list(indices)


class ProtocolError(RuntimeError):
    """The remote response violates the wire protocol."""


class Backend:
    """Interface: map a request batch to candidate lists, preserving order."""

    def generate(self, batch: Sequence[GenerationRequest]) -> list[list[GenerationCandidate]]:
        raise NotImplementedError


def _validate_request(req: GenerationRequest, index: int) -> None:
    if req.num_candidates < 1:
        raise ValueError(f"request {index}: num_candidates must be >= 1")
    if not INPUT_PATTERN.match(req.input_text):
        raise ValueError(f"request {index}: input does not match the task grammar: {req.input_text!r}")
    if not (len(req.target_lang) == 2 and req.target_lang.islower()):
        raise ValueError(f"request {index}: bad target language {req.target_lang!r}")


def generate(batch: Sequence[GenerationRequest], backend: Backend) -> list[list[GenerationCandidate]]:
    """Validated entry point shared by all backends."""
    if not batch:
        raise ValueError("generation batch must be non-empty")
    for i, req in enumerate(batch):
        _validate_request(req, i)
    results = backend.generate(list(batch))
    if len(results) != len(batch):
        raise ProtocolError(f"backend returned {len(results)} lists for {len(batch)} requests")
    return results


class OracleBackend(Backend):
    """Deterministic perfect model backed by a frozen graph.

    Tail queries return every gold tail's target-language surface, name
    queries return the primary name followed by aliases, and description
    queries return the gold description. Scores are -rank so candidate
    lists are sorted descending by construction.
    """

    def __init__(self, graph: KnowledgeGraph):
        graph._require_frozen()
        self.graph = graph
        self._label_to_pid: dict[tuple[str, str], str] = {}
        for pid in sorted(graph.relations, key=qid_sort_key):
            for lang, label in graph.relations[pid].labels.items():
                self._label_to_pid.setdefault((lang, normalize(label, lang)), pid)

    def _pid_for_label(self, src: str, label: str) -> Optional[str]:
        pid = self._label_to_pid.get((src, normalize(label, src)))
        if pid is None:
            pid = self._label_to_pid.get(("en", normalize(label, "en")))
        if pid is None and label in self.graph.relations:
            pid = label
        return pid

    def _resolve_head(self, src: str, head_text: str) -> Optional[str]:
        surfaces = [TargetSurface(head_text, None)]
        if ": " in head_text:
            name, desc = head_text.split(": ", 1)
            if name.strip():
                surfaces.append(TargetSurface(name.strip(), desc.strip() or None))
        for surface in surfaces:
            hit = link(surface, src, self.graph)
            if hit is not None:
                return hit.qid
        return None

    def _answer(self, req: GenerationRequest) -> list[GenerationCandidate]:
        m = INPUT_PATTERN.match(req.input_text)
        if m is None:
            return []
        src, head_text, label = m.groups()
        pid = self._pid_for_label(src, label)
        qid = self._resolve_head(src, head_text)
        if pid is None or qid is None:
            return []
        entity = self.graph.entities[qid]
        texts: list[str] = []
        if pid == NAMES_PID:
            lex = entity.lex.get(req.target_lang)
            if lex is not None:
                texts = list(lex.names())
        elif pid == DESCRIPTION_PID:
            lex = entity.lex.get(req.target_lang)
            if lex is not None and lex.description:
                texts = [lex.description]
        else:
            for tail in sorted(self.graph.known_tails(qid, pid), key=qid_sort_key):
                try:
                    texts.append(serialize_target(self.graph.entities[tail], req.target_lang))
                except MissingLexicalization:
                    continue
        texts = texts[: req.num_candidates]
        return [GenerationCandidate(text, -float(rank)) for rank, text in enumerate(texts, start=1)]

    def generate(self, batch: Sequence[GenerationRequest]) -> list[list[GenerationCandidate]]:
        return [self._answer(req) for req in batch]


class StaticBackend(Backend):
    """Offline predictions keyed exactly by (input text, target language)."""

    def __init__(self, entries: dict[tuple[str, str], list[GenerationCandidate]]):
        self._entries = {
            key: sorted(cands, key=lambda c: -c.score) for key, cands in entries.items()
        }

    @classmethod
    def from_file(cls, path) -> "StaticBackend":
        """Read line-delimited `{input, target_lang, candidates:[{text, score}]}`."""
        entries: dict[tuple[str, str], list[GenerationCandidate]] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                key = (rec["input"], rec["target_lang"])
                entries[key] = [
                    GenerationCandidate(c["text"], float(c["score"])) for c in rec["candidates"]
                ]
        return cls(entries)

    def generate(self, batch: Sequence[GenerationRequest]) -> list[list[GenerationCandidate]]:
        return [
            self._entries.get((req.input_text, req.target_lang), [])[: req.num_candidates]
            for req in batch
        ]


def write_static_predictions(path, entries: Iterable[tuple[str, str, list[GenerationCandidate]]]) -> int:
    """Write the static-predictions file format; returns the entry count."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for input_text, target_lang, cands in entries:
            rec = {
                "input": input_text,
                "target_lang": target_lang,
                "candidates": [{"text": c.text, "score": c.score} for c in cands],
            }
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
            n += 1
    return n


class RemoteBackend(Backend):
    """HTTP client for the generation wire protocol.

    POST `{endpoint}/generate` with `{"requests": [{input, target_lang,
    num_candidates}]}`; the response carries one candidate list per request.
    Batches fail atomically: partial results are never returned. Retries are
    idempotent and bounded; concurrency is capped by `max_in_flight`.
    """

    RETRYABLE_STATUS = (429, 500, 502, 503, 504)

    def __init__(self, endpoint: str, timeout: float = 30.0, max_in_flight: int = 4, retries: int = 2):
        if "://" not in endpoint:
            raise ValueError(f"endpoint must be a full URL: {endpoint!r}")
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self.retries = retries
        self._gate = threading.BoundedSemaphore(max_in_flight)

    def _post(self, body: bytes) -> bytes:
        req = urllib.request.Request(
            self.endpoint + "/generate",
            data=body,
            headers={"Content-Type": "application/json"},
            method="POST",
        )
        with urllib.request.urlopen(req, timeout=self.timeout) as resp:
            return resp.read()

    def generate(self, batch: Sequence[GenerationRequest]) -> list[list[GenerationCandidate]]:
        payload = {
            "requests": [
                {
                    "input": req.input_text,
                    "target_lang": req.target_lang,
                    "num_candidates": req.num_candidates,
                }
                for req in batch
            ]
        }
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        all_indices = list(range(len(batch)))
        raw: Optional[bytes] = None
        last_error: Optional[Exception] = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(0.2 * attempt)
            try:
                with self._gate:
                    raw = self._post(body)
                break
            except urllib.error.HTTPError as exc:
                if exc.code in self.RETRYABLE_STATUS:
                    last_error = exc
                    continue
                if exc.code == 400:
                    detail = exc.read().decode("utf-8", errors="replace")
                    raise ProtocolError(f"server rejected the request body: {detail}") from exc
                raise TransportError(f"HTTP {exc.code} from {self.endpoint}", all_indices) from exc
            except (urllib.error.URLError, socket.timeout, TimeoutError, ConnectionError) as exc:
                last_error = exc
                continue
        if raw is None:
            raise TransportError(
                f"generation service unreachable after {self.retries + 1} attempts: {last_error}",
                all_indices,
            )
        return self._parse_response(raw, batch)

    def _parse_response(
        self, raw: bytes, batch: Sequence[GenerationRequest]
    ) -> list[list[GenerationCandidate]]:
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"response is not valid JSON: {exc}") from exc
        if not isinstance(data, dict) or "candidates" not in data:
            raise ProtocolError("response is missing the 'candidates' field")
        outer = data["candidates"]
        if not isinstance(outer, list) or len(outer) != len(batch):
            raise ProtocolError(
                f"response has {len(outer) if isinstance(outer, list) else 'non-list'} "
                f"candidate lists for {len(batch)} requests"
            )
        results: list[list[GenerationCandidate]] = []
        for i, (cand_list, req) in enumerate(zip(outer, batch)):
            if not isinstance(cand_list, list):
                raise ProtocolError(f"candidate list {i} is not a list")
            cands = []
            for c in cand_list:
                if not isinstance(c, dict) or "text" not in c or "score" not in c:
                    raise ProtocolError(f"candidate list {i} has a malformed candidate")
                cands.append(GenerationCandidate(str(c["text"]), float(c["score"])))
            if any(cands[j].score < cands[j + 1].score for j in range(len(cands) - 1)):
                logger.warning("response %d arrived unsorted; re-sorting by score", i)
                cands.sort(key=lambda c: -c.score)
            results.append(cands[: req.num_candidates])
        return results


def backend_from_spec(spec: str, graph: Optional[KnowledgeGraph] = None, **remote_kwargs) -> Backend:
    """Build a backend from a `oracle` / `static:PATH` / `remote:URL` string."""
    if spec == "oracle":
        if graph is None:
            raise ValueError("the oracle backend needs a frozen graph")
        return OracleBackend(graph)
    if spec.startswith("static:"):
        return StaticBackend.from_file(spec[len("static:"):])
    if spec.startswith("remote:"):
        return RemoteBackend(spec[len("remote:"):], **remote_kwargs)
    raise ValueError(f"unknown backend spec {spec!r}")

"""Serving modes: echo and lookup for deterministic testing, model for real checkpoints."""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from typing import Sequence


class BadRequest(ValueError):
    """Client error that should surface as HTTP 400."""


@dataclass(frozen=True)
class ParsedRequest:
    input_text: str
    target_lang: str
    num_candidates: int


def parse_generate_body(raw: bytes) -> list[ParsedRequest]:
    """Validate a /generate body; raises BadRequest with a readable message."""
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise BadRequest(f"body is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("requests"), list):
        raise BadRequest("body must be an object with a 'requests' list")
    parsed = []
    for i, item in enumerate(data["requests"]):
        if not isinstance(item, dict):
            raise BadRequest(f"request {i} must be an object")
        try:
            input_text = item["input"]
            target_lang = item["target_lang"]
            num_candidates = item.get("num_candidates", 1)
        except KeyError as exc:
            raise BadRequest(f"request {i} is missing field {exc}") from exc
        if not isinstance(input_text, str) or not input_text:
            raise BadRequest(f"request {i}: 'input' must be a non-empty string")
        if not isinstance(target_lang, str) or not target_lang:
            raise BadRequest(f"request {i}: 'target_lang' must be a non-empty string")
        if not isinstance(num_candidates, int) or num_candidates < 1:
            raise BadRequest(f"request {i}: 'num_candidates' must be a positive integer")
        parsed.append(ParsedRequest(input_text, target_lang, num_candidates))
    return parsed


class EchoMode:
    """Returns the input text as the single candidate with score 0."""

    name = "echo"

    def generate(self, requests: Sequence[ParsedRequest]) -> list[list[dict]]:
        return [[{"text": req.input_text, "score": 0.0}] for req in requests]


class LookupMode:
    """Serves a static predictions file keyed by (input, target language)."""

    name = "lookup"

    def __init__(self, path):
        self._entries: dict[tuple[str, str], list[dict]] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                cands = [
                    {"text": str(c["text"]), "score": float(c["score"])}
                    for c in rec["candidates"]
                ]
                cands.sort(key=lambda c: -c["score"])
                self._entries[(rec["input"], rec["target_lang"])] = cands

    def generate(self, requests: Sequence[ParsedRequest]) -> list[list[dict]]:
        return [
            self._entries.get((req.input_text, req.target_lang), [])[: req.num_candidates]
            for req in requests
        ]


class ModelMode:
    """Hosts a sequence-to-sequence checkpoint behind the wire protocol.

    Decoding is conditioned on the request's target language through the
    configured token map; requests for unmapped languages are rejected.
    Generation is serialized on one lock (single accelerator assumption).
    """

    name = "model"

    def __init__(self, checkpoint_path, lang_tokens: dict[str, str], max_new_tokens: int = 64):
        try:
            import torch  # noqa: F401
            from transformers import AutoModelForSeq2SeqLM, AutoTokenizer
        except ImportError as exc:
            raise RuntimeError(
                "model mode needs the 'model' extra (torch + transformers)"
            ) from exc
        self.tokenizer = AutoTokenizer.from_pretrained(checkpoint_path)
        self.model = AutoModelForSeq2SeqLM.from_pretrained(checkpoint_path)
        self.model.eval()
        self.lang_tokens = lang_tokens
        self.max_new_tokens = max_new_tokens
        self._lock = threading.Lock()

    def _forced_bos(self, target_lang: str) -> int:
        token = self.lang_tokens.get(target_lang)
        if token is None:
            raise BadRequest(f"no language token configured for {target_lang!r}")
        token_id = self.tokenizer.convert_tokens_to_ids(token)
        if token_id is None or token_id == self.tokenizer.unk_token_id:
            raise BadRequest(f"checkpoint does not know the language token {token!r}")
        return token_id

    def generate(self, requests: Sequence[ParsedRequest]) -> list[list[dict]]:
        import torch

        results: list[list[dict]] = []
        with self._lock:
            for req in requests:
                bos = self._forced_bos(req.target_lang)
                inputs = self.tokenizer(req.input_text, return_tensors="pt")
                with torch.no_grad():
                    out = self.model.generate(
                        **inputs,
                        num_beams=max(req.num_candidates, 1),
                        num_return_sequences=req.num_candidates,
                        forced_bos_token_id=bos,
                        max_new_tokens=self.max_new_tokens,
                        output_scores=True,
                        return_dict_in_generate=True,
                    )
                texts = self.tokenizer.batch_decode(out.sequences, skip_special_tokens=True)
                scores = (
                    out.sequences_scores.tolist()
                    if out.sequences_scores is not None
                    else [-float(i) for i in range(1, len(texts) + 1)]
                )
                cands = [
                    {"text": t, "score": float(s)} for t, s in zip(texts, scores)
                ]
                cands.sort(key=lambda c: -c["score"])
                results.append(cands[: req.num_candidates])
        return results


def build_mode(config):
    if config.mode == "echo":
        return EchoMode()
    if config.mode == "lookup":
        return LookupMode(config.mode_arg)
    return ModelMode(config.mode_arg, config.lang_tokens)

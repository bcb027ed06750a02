"""Bidirectional conversion between task tuples and the flat text format.

A query over the graph is a five-element tuple (source language, target
language, head, relation, ?) rendered as `[xx] head | relation label | ?`.
The target language is deliberately NOT part of the text; it travels as a
separate request field so the text matches what generation backends consume.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .store import DESCRIPTION_PID, NAMES_PID, KnowledgeGraph

DELIM = " | "

# shape of every serialized input: "[xx] head | label | ?"
INPUT_PATTERN = re.compile(r"^\[([a-z]{2})\] (.+) \| (.+) \| \?$")


class VerbalizationError(ValueError):
    """Base error for tuple/text conversion failures."""


class DelimiterError(VerbalizationError):
    """A field contains the reserved ` | ` delimiter sequence."""


class OutputParseError(VerbalizationError):
    """Generated text cannot be parsed into a target surface."""


class MissingLexicalization(VerbalizationError):
    """Entity lacks the lexicalization required for serialization."""


class TaskKind(Enum):
    KGC_TAIL = "kgc_tail"
    KGE_NAME = "kge_name"
    KGE_DESCRIPTION = "kge_description"


@dataclass(frozen=True)
class TaskTuple:
    """One query: predict the tail surface for (src, tgt, head, rel, ?)."""

    kind: TaskKind
    src: str
    tgt: str
    head_qid: str
    head_name: str
    rel_pid: str
    head_desc: Optional[str] = None
    gold: Optional[str] = None


@dataclass(frozen=True)
class TargetSurface:
    """Parsed generation output: a name and an optional short description."""

    name: str
    description: Optional[str] = None


def relation_label(graph: KnowledgeGraph, pid: str, lang: str) -> str:
    """Label in `lang`, falling back to English, falling back to the pid itself."""
    rel = graph.relations.get(pid)
    if rel is None:
        return pid
    return rel.labels.get(lang) or rel.labels.get("en") or pid


def serialize_input(t: TaskTuple, graph: KnowledgeGraph) -> str:
    """Render a task tuple as `[src] head | label | ?`.

    The head is `name: description` when a description is provided, except
    for description-generation tasks where the head is always the bare name.
    Any field containing the reserved delimiter is rejected.
    """
    if not t.head_name or not t.head_name.strip():
        raise VerbalizationError("head name must be non-empty")
    if not graph.is_language(t.src) or not graph.is_language(t.tgt):
        raise VerbalizationError(f"language pair {t.src!r}->{t.tgt!r} is not configured")
    if t.kind is TaskKind.KGE_DESCRIPTION and t.head_desc:
        raise VerbalizationError("description tasks represent the head by its name only")
    head = t.head_name if not t.head_desc else f"{t.head_name}: {t.head_desc}"
    label = relation_label(graph, t.rel_pid, t.src)
    for what, value in (("head", head), ("relation label", label)):
        if DELIM in value:
            raise DelimiterError(f"{what} contains the reserved delimiter: {value!r}")
    return f"[{t.src}] {head}{DELIM}{label}{DELIM}?"


def parse_output(text: str) -> TargetSurface:
    """Split generated text into name and optional description.

    The split happens on the FIRST delimiter occurrence; text without a
    delimiter is a bare name. Both parts are whitespace-trimmed.
    """
    if not text or not text.strip():
        raise OutputParseError("empty generation output")
    idx = text.find(DELIM)
    if idx < 0:
        name, desc = text.strip(), None
    else:
        name = text[:idx].strip()
        desc = text[idx + len(DELIM):].strip() or None
    if not name:
        raise OutputParseError(f"generation output has an empty name part: {text!r}")
    return TargetSurface(name, desc)


def render_surface(surface: TargetSurface) -> str:
    """Inverse of :func:`parse_output` for well-formed surfaces."""
    if not surface.name or not surface.name.strip():
        raise VerbalizationError("surface name must be non-empty")
    if DELIM in surface.name or (surface.description and DELIM in surface.description):
        raise DelimiterError("surface fields must not contain the reserved delimiter")
    if surface.description:
        return f"{surface.name}{DELIM}{surface.description}"
    return surface.name


def serialize_target(entity, lang: str) -> str:
    """`name | description` (or bare name) of an entity in `lang`."""
    lex = entity.lex.get(lang)
    if lex is None:
        raise MissingLexicalization(f"{entity.qid} has no {lang} lexicalization")
    return render_surface(TargetSurface(lex.primary_name, lex.description))


_PSEUDO_KINDS = {
    TaskKind.KGE_NAME: NAMES_PID,
    TaskKind.KGE_DESCRIPTION: DESCRIPTION_PID,
}


def task_tuple_for_entity(
    kind: TaskKind,
    src: str,
    tgt: str,
    entity,
    rel_pid: Optional[str] = None,
) -> TaskTuple:
    """Build a task tuple whose head fields come from the entity's src lexicalization."""
    lex = entity.lex.get(src)
    if lex is None:
        raise MissingLexicalization(f"{entity.qid} has no {src} lexicalization")
    if kind in _PSEUDO_KINDS:
        rel_pid = _PSEUDO_KINDS[kind]
    elif rel_pid is None:
        raise VerbalizationError("tail-prediction tuples need an explicit relation pid")
    desc = None if kind is TaskKind.KGE_DESCRIPTION else lex.description
    return TaskTuple(
        kind=kind,
        src=src,
        tgt=tgt,
        head_qid=entity.qid,
        head_name=lex.primary_name,
        rel_pid=rel_pid,
        head_desc=desc,
    )

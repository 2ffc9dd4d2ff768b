"""Instruction discriminator: exemplar bank, augmentation, classification.

A bank entry is a labeled instruction with a cached embedding; incoming
instructions are matched against every entry by cosine (exact search —
bank scale is thousands, no index needed) and take the majority label of
the top k, ties broken by the single nearest neighbor. k defaults to 1:
the closest exemplar decides.

Bank files persist {id, text, label, source} only; embeddings are
recomputed on load so files stay portable across embedder configs.
"""

from __future__ import annotations

import enum
import json
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import instructions, providers
from .embedding import EmbedderKind, EmbedderSpec, embed_texts
from .errors import EmptyBank, LowConfidence, ProviderError, SchemaViolation, TransportError
from .model import Instruction, SystemLabel


class EntrySource(str, enum.Enum):
    SEED = "seed"
    AUGMENTED = "augmented"
    MANUAL = "manual"


@dataclass(frozen=True)
class BankEntry:
    id: int
    text: str
    label: SystemLabel
    source: EntrySource
    embedding: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, BankEntry):
            return NotImplemented
        return (self.id, self.text, self.label, self.source) == (
            other.id,
            other.text,
            other.label,
            other.source,
        )


class ThinkBank:
    def __init__(
        self,
        entries: Sequence[BankEntry],
        embedder: EmbedderSpec,
        timeout_s: float = 10.0,
        transport=None,
    ):
        ids = [e.id for e in entries]
        if len(ids) != len(set(ids)):
            raise ValueError("bank entry ids must be unique")
        for e in entries:
            if e.embedding.shape != (embedder.dimension,):
                raise ValueError(f"entry {e.id} embedding dimension mismatch")
        self.entries = list(entries)
        self.embedder = embedder
        self.timeout_s = timeout_s
        self._transport = transport
        self._ids = np.array(ids, dtype=np.int64) if entries else np.zeros(0, dtype=np.int64)
        self._matrix = (
            np.vstack([e.embedding for e in entries])
            if entries
            else np.zeros((0, embedder.dimension))
        )

    def __len__(self) -> int:
        return len(self.entries)

    def entry(self, entry_id: int) -> BankEntry:
        for e in self.entries:
            if e.id == entry_id:
                return e
        raise KeyError(entry_id)

    def embed_query(self, text: str) -> np.ndarray:
        return embed_texts(self.embedder, [text], timeout_s=self.timeout_s, transport=self._transport)[0]

    @classmethod
    def from_rows(
        cls,
        rows: Sequence[tuple[int, str, SystemLabel, EntrySource]],
        embedder: EmbedderSpec = EmbedderSpec(),
        timeout_s: float = 10.0,
        transport=None,
    ) -> "ThinkBank":
        vectors = embed_texts(embedder, [r[1] for r in rows], timeout_s=timeout_s, transport=transport)
        entries = [
            BankEntry(i, text, label, source, vec)
            for (i, text, label, source), vec in zip(rows, vectors)
        ]
        return cls(entries, embedder, timeout_s=timeout_s, transport=transport)


def classify(
    bank: ThinkBank,
    instruction: Union[Instruction, str],
    k: int = 1,
    floor: Optional[float] = None,
) -> tuple[SystemLabel, list[tuple[int, float]]]:
    """Nearest-exemplar label plus the top-k neighbors for explainability.

    `floor` is the optional confidence threshold (off by default): when the
    best score falls below it, LowConfidence is raised so a caller can fall
    back to a heavier classifier.
    """
    if len(bank) == 0:
        raise EmptyBank("cannot classify against an empty bank")
    if not 1 <= k <= len(bank):
        raise ValueError(f"k={k} out of range for bank of {len(bank)}")
    text = instruction.text if isinstance(instruction, Instruction) else instruction
    query = bank.embed_query(text)
    scores = bank._matrix @ query
    if floor is not None and (len(scores) == 0 or float(scores.max()) < floor):
        raise LowConfidence(float(scores.max()) if len(scores) else 0.0, floor)
    # Sort by descending score, ties by ascending entry id.
    order = np.lexsort((bank._ids, -scores))[:k]
    neighbors = [(int(bank._ids[i]), float(scores[i])) for i in order]
    labels = [bank.entry(eid).label for eid, _ in neighbors]
    fast = sum(1 for lb in labels if lb is SystemLabel.FAST)
    slow = len(labels) - fast
    if fast > slow:
        label = SystemLabel.FAST
    elif slow > fast:
        label = SystemLabel.SLOW
    else:
        label = labels[0]  # tie: the single nearest neighbor decides
    return label, neighbors


# -- persistence -----------------------------------------------------------------


def save_bank(bank: ThinkBank, path: str | Path) -> None:
    header = {
        "record": "bank",
        "version": 1,
        "embedder": {"kind": bank.embedder.kind.value, "dimension": bank.embedder.dimension},
    }
    lines = [json.dumps(header, sort_keys=True)]
    for e in bank.entries:
        lines.append(
            json.dumps(
                {"id": e.id, "text": e.text, "label": e.label.value, "source": e.source.value},
                sort_keys=True,
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_bank_rows(text: str) -> tuple[dict, list[tuple[int, str, SystemLabel, EntrySource]]]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SchemaViolation("header", "empty bank file")
    header = json.loads(lines[0])
    if header.get("record") != "bank" or "embedder" not in header:
        raise SchemaViolation("record", "expected bank header with embedder spec")
    rows = []
    for i, line in enumerate(lines[1:]):
        rec = json.loads(line)
        for field in ("id", "text", "label", "source"):
            if field not in rec:
                raise SchemaViolation(field, f"entry {i} missing field")
        try:
            label = SystemLabel(rec["label"])
        except ValueError:
            raise SchemaViolation("label", f"unknown label {rec['label']!r}") from None
        rows.append((int(rec["id"]), rec["text"], label, EntrySource(rec["source"])))
    return header, rows


def load_bank(
    path: str | Path,
    embedder: Optional[EmbedderSpec] = None,
    on_mismatch: str = "error",
    timeout_s: float = 10.0,
    transport=None,
) -> ThinkBank:
    """Load a bank file, recomputing embeddings under `embedder`.

    When the file was written under a different embedder spec, either raise
    EmbedderMismatch (default) or warn and recompute (`on_mismatch="recompute"`).
    """
    from .errors import EmbedderMismatch

    header, rows = _parse_bank_rows(Path(path).read_text(encoding="utf-8"))
    recorded = header["embedder"]
    file_kind = recorded.get("kind", "builtin")
    file_dim = int(recorded.get("dimension", 0) or 0)
    if embedder is None:
        if file_kind != EmbedderKind.BUILTIN.value:
            # Endpoints are not persisted, so a remote bank needs the caller
            # to supply the full spec.
            raise EmbedderMismatch("bank was written under a remote embedder; pass its spec")
        spec = EmbedderSpec(dimension=file_dim)
    else:
        spec = embedder
    if (file_kind, file_dim) != (spec.kind.value, spec.dimension):
        if on_mismatch == "recompute":
            warnings.warn(
                f"bank written under {file_kind}/{file_dim}, "
                f"recomputing embeddings for {spec.kind.value}/{spec.dimension}"
            )
        else:
            raise EmbedderMismatch(
                f"file spec {file_kind}/{file_dim} != configured {spec.kind.value}/{spec.dimension}"
            )
    return ThinkBank.from_rows(rows, spec, timeout_s=timeout_s, transport=transport)


# -- paraphrase providers ------------------------------------------------------------


_SYNONYMS = (
    ("pick up", "grab"),
    ("pick up", "lift"),
    ("place it in", "drop it into"),
    ("put", "place"),
    ("sort", "organize"),
    ("solve", "work out"),
    ("fix", "correct"),
    ("rotate", "turn"),
    ("stack", "pile up"),
    ("box", "bin"),
)


def _prefix(p: str) -> Callable[[str], Optional[str]]:
    def transform(text: str) -> Optional[str]:
        if text.lower().startswith(p):
            return None
        return p + text[0].lower() + text[1:]

    return transform


def _synonym(old: str, new: str) -> Callable[[str], Optional[str]]:
    def transform(text: str) -> Optional[str]:
        if old not in text:
            return None
        return text.replace(old, new, 1)

    return transform


DEFAULT_TEMPLATES: tuple[Callable[[str], Optional[str]], ...] = (
    _prefix("please "),
    _prefix("could you "),
    _prefix("now "),
    _prefix("robot, "),
    *(_synonym(old, new) for old, new in _SYNONYMS),
)


class TemplateParaphraser:
    """Deterministic rule-based paraphraser (the builtin provider)."""

    def __init__(self, templates: Sequence[Callable[[str], Optional[str]]] = DEFAULT_TEMPLATES):
        self.templates = list(templates)

    def paraphrase(self, text: str) -> list[str]:
        out = []
        for template in self.templates:
            candidate = template(text)
            if candidate is not None and candidate != text and candidate not in out:
                out.append(candidate)
        return out


class RemoteParaphraser:
    """LLM-backed paraphraser speaking the chat-completions wire format.

    The provider returns one paraphrase per line; blank lines are dropped.
    """

    def __init__(self, endpoint: str, model_name: str, timeout_s: float = 10.0, transport=None):
        self.endpoint = endpoint
        self.model_name = model_name
        self.timeout_s = timeout_s
        self._transport = transport

    def paraphrase(self, text: str) -> list[str]:
        prompt = (
            "Rewrite the following robot instruction in different words, one "
            f"variant per line, keeping the meaning identical:\n{text}"
        )
        content = providers.chat_complete(
            self.endpoint, self.model_name, prompt, timeout_s=self.timeout_s, transport=self._transport
        )
        return [ln.strip() for ln in content.splitlines() if ln.strip()]


def augment(
    seed_entries: Sequence[BankEntry],
    iterations: int,
    provider,
    embedder: EmbedderSpec = EmbedderSpec(),
    cap: Optional[int] = None,
    branching: Optional[int] = None,
) -> list[BankEntry]:
    """Grow a bank by iterated paraphrasing; children inherit their parent's label.

    Exact-duplicate texts are dropped. A provider failure on one item skips
    that item (collected in the report via warnings), never the whole run.
    Returns seeds plus all generations, capped at `cap` total entries.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    entries = list(seed_entries)
    seen = {e.text for e in entries}
    next_id = max((e.id for e in entries), default=0) + 1
    for _ in range(iterations):
        if cap is not None and len(entries) >= cap:
            break
        current = list(entries)
        for parent in current:
            if cap is not None and len(entries) >= cap:
                break
            try:
                variants = provider.paraphrase(parent.text)
            except (ProviderError, TransportError) as exc:
                warnings.warn(f"paraphrase failed for entry {parent.id}: {exc}")
                continue
            if branching is not None:
                variants = variants[:branching]
            fresh = [t for t in variants if t not in seen]
            if cap is not None:
                fresh = fresh[: max(0, cap - len(entries))]
            if not fresh:
                continue
            for text, vec in zip(fresh, embed_texts(embedder, fresh)):
                entries.append(BankEntry(next_id, text, parent.label, EntrySource.AUGMENTED, vec))
                seen.add(text)
                next_id += 1
    return entries


# -- starter bank ----------------------------------------------------------------------


def seed_entries(embedder: EmbedderSpec = EmbedderSpec()) -> list[BankEntry]:
    """Hand-written seeds, two per task family."""
    rows = []
    next_id = 1
    for family in sorted(instructions.SEED_INSTRUCTIONS):
        label = instructions.FAMILY_LABELS[family]
        for text in instructions.SEED_INSTRUCTIONS[family]:
            rows.append((next_id, text, label, EntrySource.SEED))
            next_id += 1
    vectors = embed_texts(embedder, [r[1] for r in rows])
    return [BankEntry(i, t, lb, src, vec) for (i, t, lb, src), vec in zip(rows, vectors)]


def make_starter_bank(embedder: EmbedderSpec = EmbedderSpec()) -> ThinkBank:
    """The shipped starter bank: seeds grown one template iteration."""
    entries = augment(seed_entries(embedder), iterations=1, provider=TemplateParaphraser(), embedder=embedder)
    return ThinkBank(entries, embedder)


def starter_bank(embedder: Optional[EmbedderSpec] = None) -> ThinkBank:
    """Load the starter bank committed under twolane/data."""
    ref = resources.files("twolane.data").joinpath("starter_bank.jsonl")
    with resources.as_file(ref) as path:
        return load_bank(path, embedder=embedder, on_mismatch="error")


# -- held-out evaluation set --------------------------------------------------------------


_HELDOUT_PREFIXES = ("would you ", "go ahead and ", "i need you to ", "kindly ", "time to ")
_HELDOUT_SUFFIXES = (" right away", " when you get a chance")


def heldout_instructions() -> list[tuple[str, SystemLabel, str]]:
    """(text, label, family) triples disjoint from the starter bank.

    Twenty paraphrases per core family, built from transforms the bank
    augmenter never uses, for discriminator evaluation.
    """
    out = []
    for family in instructions.CORE_NINE:
        label = instructions.FAMILY_LABELS[family]
        for seed in instructions.SEED_INSTRUCTIONS[family]:
            for prefix in _HELDOUT_PREFIXES:
                for suffix in _HELDOUT_SUFFIXES:
                    text = prefix + seed[0].lower() + seed[1:] + suffix
                    out.append((text, label, family))
    return out

"""Think-bank: persistence, classification, augmentation."""

import numpy as np
import pytest

from twolane import bank as bank_mod
from twolane import instructions
from twolane.bank import (
    BankEntry,
    EntrySource,
    TemplateParaphraser,
    ThinkBank,
    augment,
    classify,
    load_bank,
    save_bank,
)
from twolane.embedding import EmbedderSpec, embed
from twolane.errors import EmbedderMismatch, EmptyBank, SchemaViolation
from twolane.model import SystemLabel


def small_bank(embedder=EmbedderSpec()):
    rows = [
        (1, "pick up the red cube", SystemLabel.FAST, EntrySource.SEED),
        (2, "solve the equation on the table", SystemLabel.SLOW, EntrySource.SEED),
        (3, "I'm allergic to spicy food", SystemLabel.SLOW, EntrySource.SEED),
        (4, "put the toy into the box", SystemLabel.FAST, EntrySource.SEED),
    ]
    return ThinkBank.from_rows(rows, embedder)


def test_save_load_round_trip(tmp_path):
    b = small_bank()
    path = tmp_path / "bank.jsonl"
    save_bank(b, path)
    again = load_bank(path)
    assert again.entries == b.entries
    assert again.embedder.dimension == b.embedder.dimension


def test_load_missing_label_field(tmp_path):
    path = tmp_path / "bank.jsonl"
    path.write_text(
        '{"record": "bank", "version": 1, "embedder": {"kind": "builtin", "dimension": 512}}\n'
        '{"id": 1, "text": "x", "source": "seed"}\n'
    )
    with pytest.raises(SchemaViolation) as err:
        load_bank(path)
    assert err.value.path == "label"


def test_load_dimension_mismatch(tmp_path):
    path = tmp_path / "bank.jsonl"
    save_bank(small_bank(), path)
    with pytest.raises(EmbedderMismatch):
        load_bank(path, embedder=EmbedderSpec(dimension=256))


def test_load_mismatch_recompute_mode(tmp_path):
    path = tmp_path / "bank.jsonl"
    save_bank(small_bank(), path)
    with pytest.warns(UserWarning):
        again = load_bank(path, embedder=EmbedderSpec(dimension=256), on_mismatch="recompute")
    assert again.embedder.dimension == 256
    assert again.entries[0].embedding.shape == (256,)


def test_classify_exact_text_scores_one():
    b = small_bank()
    label, neighbors = classify(b, "pick up the red cube")
    assert label is SystemLabel.FAST
    assert neighbors[0][0] == 1
    assert neighbors[0][1] == pytest.approx(1.0, abs=1e-9)


def test_classify_intent_exemplar_slow():
    label, _ = classify(small_bank(), "I'm allergic to spicy food")
    assert label is SystemLabel.SLOW


def test_classify_empty_bank():
    with pytest.raises(EmptyBank):
        classify(ThinkBank([], EmbedderSpec()), "anything")


def test_classify_k_bounds():
    with pytest.raises(ValueError):
        classify(small_bank(), "x y z", k=5)


def test_classify_tie_breaks_by_ascending_id():
    embedder = EmbedderSpec()
    text = "pick up the red cube"
    vec = embed(text)
    entries = [
        BankEntry(7, text, SystemLabel.FAST, EntrySource.SEED, vec),
        BankEntry(3, text, SystemLabel.SLOW, EntrySource.SEED, vec),
    ]
    b = ThinkBank(entries, embedder)
    label, neighbors = classify(b, text, k=1)
    # Identical scores: the lower entry id wins the tie.
    assert neighbors[0][0] == 3
    assert label is SystemLabel.SLOW


def test_classify_k2_tie_resolved_by_nearest():
    embedder = EmbedderSpec()
    entries = [
        BankEntry(1, "pick up the red cube", SystemLabel.FAST, EntrySource.SEED, embed("pick up the red cube")),
        BankEntry(2, "solve the equation on the table", SystemLabel.SLOW, EntrySource.SEED, embed("solve the equation on the table")),
    ]
    b = ThinkBank(entries, embedder)
    label, neighbors = classify(b, "pick up the red cube", k=2)
    assert len(neighbors) == 2
    assert label is SystemLabel.FAST  # 1 FAST vs 1 SLOW: nearest neighbor decides


def test_classify_deterministic(starter_bank):
    results = {classify(starter_bank, "please sort the cubes by color")[0] for _ in range(10)}
    assert len(results) == 1


def test_self_retrieval_on_starter_bank(starter_bank):
    # Every entry retrieves its own label at similarity 1.
    for entry in starter_bank.entries:
        label, neighbors = classify(starter_bank, entry.text, k=1)
        assert label is entry.label
        assert neighbors[0][1] == pytest.approx(1.0, abs=1e-9)


# -- augmentation -------------------------------------------------------------------


def seed_entry(text="pick up the red cube", label=SystemLabel.FAST):
    return BankEntry(1, text, label, EntrySource.SEED, embed(text))


def test_augment_four_templates_four_children():
    templates = bank_mod.DEFAULT_TEMPLATES[:4]  # the four politeness prefixes
    grown = augment([seed_entry()], iterations=1, provider=TemplateParaphraser(templates))
    new = [e for e in grown if e.source is EntrySource.AUGMENTED]
    assert len(new) == 4
    assert all(e.label is SystemLabel.FAST for e in new)


def test_augment_cap_respected():
    # Five seeds, ten iterations, branching factor two: unbounded growth
    # would be enormous; the 2,000-entry cap must hold exactly.
    seeds = [
        BankEntry(i + 1, text, SystemLabel.SLOW, EntrySource.SEED, embed(text))
        for i, text in enumerate(
            ["sort the cubes", "fix the word", "solve the equation", "stack the cubes", "group the cubes"]
        )
    ]
    grown = augment(seeds, iterations=10, provider=TemplateParaphraser(), cap=2000, branching=2)
    assert len(grown) == 2000
    assert {e.label for e in grown} == {SystemLabel.SLOW}


class VerbatimProvider:
    def paraphrase(self, text):
        return [text]


def test_augment_verbatim_provider_adds_nothing():
    grown = augment([seed_entry()], iterations=3, provider=VerbatimProvider())
    assert len(grown) == 1


class FlakyProvider:
    def __init__(self):
        self.calls = 0

    def paraphrase(self, text):
        from twolane.errors import ProviderError

        self.calls += 1
        if self.calls == 1:
            raise ProviderError(500, "boom")
        return [text + "!"]


def test_augment_provider_failure_skips_item():
    seeds = [
        BankEntry(1, "alpha", SystemLabel.FAST, EntrySource.SEED, embed("alpha")),
        BankEntry(2, "beta", SystemLabel.SLOW, EntrySource.SEED, embed("beta")),
    ]
    with pytest.warns(UserWarning):
        grown = augment(seeds, iterations=1, provider=FlakyProvider())
    texts = {e.text for e in grown}
    assert "beta!" in texts and "alpha!" not in texts


def test_augment_label_preservation():
    grown = augment(
        bank_mod.seed_entries(), iterations=1, provider=TemplateParaphraser(), cap=400
    )
    by_seed_label = {e.text: e.label for e in grown if e.source is EntrySource.SEED}
    for e in grown:
        if e.source is EntrySource.AUGMENTED:
            # Every augmented text descends from some seed; its family label
            # must match the catalog's label for the matching seed family.
            candidates = [lb for t, lb in by_seed_label.items() if t.lower() in e.text.lower()]
            assert e.label in candidates or candidates == []


def test_classify_confidence_floor():
    from twolane.errors import LowConfidence

    b = small_bank()
    label, _ = classify(b, "pick up the red cube", floor=0.9)  # exact hit clears any floor
    assert label is SystemLabel.FAST
    with pytest.raises(LowConfidence) as err:
        classify(b, "zzz qqq xxyzzy", floor=0.9)
    assert err.value.floor == 0.9
    # Off by default: the same query classifies without a floor.
    classify(b, "zzz qqq xxyzzy")


def test_remote_embedder_bank_roundtrip():
    import httpx
    import json as json_mod

    from twolane.embedding import EmbedderKind, embed

    dim = 32

    def handler(request):
        body = json_mod.loads(request.content)
        data = [
            {"index": i, "embedding": embed(t, dim).tolist()} for i, t in enumerate(body["input"])
        ]
        return httpx.Response(200, json={"data": data})

    spec = EmbedderSpec(
        kind=EmbedderKind.REMOTE, dimension=dim, endpoint="http://stub/v1/embeddings", model_name="m"
    )
    transport = httpx.MockTransport(handler)
    rows = [
        (1, "pick up the red cube", SystemLabel.FAST, EntrySource.SEED),
        (2, "solve the equation on the table", SystemLabel.SLOW, EntrySource.SEED),
    ]
    b = ThinkBank.from_rows(rows, spec, transport=transport)
    # Queries embed through the remote seam too.
    label, neighbors = classify(b, "solve the equation on the table")
    assert label is SystemLabel.SLOW
    assert neighbors[0][1] == pytest.approx(1.0, abs=1e-9)


def test_load_remote_bank_requires_full_spec(tmp_path):
    path = tmp_path / "bank.jsonl"
    path.write_text(
        '{"record": "bank", "version": 1, "embedder": {"kind": "remote", "dimension": 32}}\n'
        '{"id": 1, "text": "x y z", "label": "FAST", "source": "seed"}\n'
    )
    with pytest.raises(EmbedderMismatch):
        load_bank(path)


def test_starter_bank_matches_regeneration(starter_bank):
    rebuilt = bank_mod.make_starter_bank()
    assert [e.text for e in starter_bank.entries] == [e.text for e in rebuilt.entries]
    assert [e.label for e in starter_bank.entries] == [e.label for e in rebuilt.entries]
    assert len(starter_bank) >= 100


def test_heldout_set_disjoint_and_sized(starter_bank):
    held = bank_mod.heldout_instructions()
    assert len(held) >= 180
    per_family = {}
    for _, _, family in held:
        per_family[family] = per_family.get(family, 0) + 1
    assert set(per_family) == set(instructions.CORE_NINE)
    assert all(count >= 20 for count in per_family.values())
    bank_texts = {e.text for e in starter_bank.entries}
    assert not bank_texts & {t for t, _, _ in held}

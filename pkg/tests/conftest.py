"""Shared fixtures: small hand-built corpora with fully known geometry."""
from __future__ import annotations

import json

import pytest

from corpusgen import DocSpec, RelSpec, conllu_text, make_dataset, rels_text
from relsearch.model import Dataset

# ---------------------------------------------------------------------------
# Demo corpus: two docs, four relations, every feature in play.
#
# GUM_news_flood          0..13
#   If(0) it(1) rains(2) ,(3) the(4) game(5) stops(6) .(7)
#   Then(8) we(9) go(10) home(11) quickly(12) .(13)
# GUM_interview_cats      0..10
#   Cats(0) sleep(1) to(2) stay(3) happy(4) .(5)
#   They(6) purr(7) when(8) happy(9) .(10)


def demo_docs() -> list[DocSpec]:
    return [
        DocSpec("GUM_news_flood", [
            [("If", "if", "SCONJ", "mark"),
             ("it", "it", "PRON", "nsubj"),
             ("rains", "rain", "VERB", "advcl"),
             (",", ",", "PUNCT", "punct"),
             ("the", "the", "DET", "det"),
             ("game", "game", "NOUN", "nsubj"),
             ("stops", "stop", "VERB", "root"),
             (".", ".", "PUNCT", "punct")],
            [("Then", "then", "ADV", "advmod"),
             ("we", "we", "PRON", "nsubj"),
             ("go", "go", "VERB", "root"),
             ("home", "home", "NOUN", "obl"),
             ("quickly", "quick", "ADV", "advmod"),
             (".", ".", "PUNCT", "punct")],
        ]),
        DocSpec("GUM_interview_cats", [
            [("Cats", "cat", "NOUN", "nsubj"),
             ("sleep", "sleep", "VERB", "root"),
             ("to", "to", "PART", "mark"),
             ("stay", "stay", "VERB", "advcl"),
             ("happy", "happy", "ADJ", "xcomp"),
             (".", ".", "PUNCT", "punct")],
            [("They", "they", "PRON", "nsubj"),
             ("purr", "purr", "VERB", "root"),
             ("when", "when", "ADV", "advmod"),
             ("happy", "happy", "ADJ", "advcl:pred"),
             (".", ".", "PUNCT", "punct")],
        ]),
    ]


def demo_rels() -> list[RelSpec]:
    return [
        RelSpec("GUM_news_flood", [0, 1, 2], [4, 5, 6], "1>2",
                "CONDITION", "condition-arg",
                signals=[("dm", "dm", [0])], meta={"split": "train"}),
        RelSpec("GUM_news_flood", [4, 5, 6], [8, 9, 10, 11, 12], "1<2",
                "ELABORATION", "elaboration-additional",
                meta={"split": "train"}),
        RelSpec("GUM_interview_cats", [0, 1], [2, 3, 4], "1<2",
                "PURPOSE", "purpose-goal",
                signals=[("dm", "dm", [2]), ("syntactic", None, [3])],
                meta={"split": "dev"}),
        RelSpec("GUM_interview_cats", [6, 7], [8, 9], "1<2",
                "CONDITION", "contingency-condition",
                signals=[("dm", "dm", [8])], meta={"split": "dev"}),
    ]


@pytest.fixture(scope="session")
def demo_ds() -> Dataset:
    return make_dataset(demo_docs(), demo_rels(), "demo")


@pytest.fixture(scope="session")
def demo_files(tmp_path_factory):
    """Demo corpus on disk plus a manifest pointing at it."""
    root = tmp_path_factory.mktemp("demo_data")
    (root / "demo.rels").write_text(rels_text(demo_rels()), encoding="utf-8")
    (root / "demo.conllu").write_text(conllu_text(demo_docs()),
                                      encoding="utf-8")
    manifest = root / "manifest.json"
    manifest.write_text(json.dumps({"datasets": [{
        "id": "demo",
        "rels": "demo.rels",
        "conllu": "demo.conllu",
        "language": "en",
        "framework": "test",
    }]}), encoding="utf-8")
    return {"root": root, "manifest": str(manifest),
            "rels": str(root / "demo.rels"),
            "conllu": str(root / "demo.conllu")}


# ---------------------------------------------------------------------------
# Golden corpus: seven relations arranged so the five canonical query forms
# each retrieve a distinct, hand-checkable subset.
#
# Row 0  if-then, same order, both operators hit it.
# Row 1  then ... if: source/target reversed relative to text order.
# Row 2  both words inside arg2 only.
# Row 3  "to improve" adjacent inside the source.
# Row 4  "to slowly improve": defeats exact matching, not flexible.
# Row 5  "when possible" adjacent.
# Row 6  "when it is possible": flexible-only.


def golden_docs() -> list[DocSpec]:
    return [
        DocSpec("gold_news_a", [
            [("If", "if", "SCONJ", "mark"),
             ("it", "it", "PRON", "nsubj"),
             ("rains", "rain", "VERB", "advcl"),
             ("then", "then", "ADV", "advmod"),
             ("we", "we", "PRON", "nsubj"),
             ("stay", "stay", "VERB", "root"),
             ("home", "home", "NOUN", "obl"),
             (".", ".", "PUNCT", "punct")],
        ]),
        DocSpec("gold_news_b", [
            [("Then", "then", "ADV", "advmod"),
             ("we", "we", "PRON", "nsubj"),
             ("leave", "leave", "VERB", "root"),
             (",", ",", "PUNCT", "punct"),
             ("if", "if", "SCONJ", "mark"),
             ("it", "it", "PRON", "nsubj"),
             ("rains", "rain", "VERB", "advcl"),
             (".", ".", "PUNCT", "punct")],
            [("We", "we", "PRON", "nsubj"),
             ("know", "know", "VERB", "root"),
             ("if", "if", "SCONJ", "mark"),
             ("it", "it", "PRON", "nsubj"),
             ("rains", "rain", "VERB", "advcl"),
             ("then", "then", "ADV", "advmod"),
             ("we", "we", "PRON", "nsubj"),
             ("stay", "stay", "VERB", "advcl"),
             (".", ".", "PUNCT", "punct")],
        ]),
        DocSpec("gold_fiction_c", [
            [("We", "we", "PRON", "nsubj"),
             ("train", "train", "VERB", "root"),
             ("to", "to", "PART", "mark"),
             ("improve", "improve", "VERB", "advcl"),
             ("quickly", "quick", "ADV", "advmod"),
             (".", ".", "PUNCT", "punct")],
            [("We", "we", "PRON", "nsubj"),
             ("try", "try", "VERB", "root"),
             ("to", "to", "PART", "mark"),
             ("slowly", "slow", "ADV", "advmod"),
             ("improve", "improve", "VERB", "advcl"),
             ("things", "thing", "NOUN", "obj"),
             (".", ".", "PUNCT", "punct")],
            [("When", "when", "ADV", "advmod"),
             ("possible", "possible", "ADJ", "advcl"),
             (",", ",", "PUNCT", "punct"),
             ("we", "we", "PRON", "nsubj"),
             ("help", "help", "VERB", "root"),
             (".", ".", "PUNCT", "punct")],
            [("When", "when", "ADV", "advmod"),
             ("it", "it", "PRON", "nsubj"),
             ("is", "be", "AUX", "cop"),
             ("possible", "possible", "ADJ", "advcl"),
             ("we", "we", "PRON", "nsubj"),
             ("go", "go", "VERB", "root"),
             (".", ".", "PUNCT", "punct")],
        ]),
    ]


def golden_rels() -> list[RelSpec]:
    return [
        RelSpec("gold_news_a", [0, 1, 2], [3, 4, 5, 6], "1>2",
                "CONDITION", signals=[("dm", "dm", [0])]),
        RelSpec("gold_news_b", [0, 1, 2], [4, 5, 6], "1<2",
                "CONDITION", signals=[("dm", "dm", [4])]),
        RelSpec("gold_news_b", [8, 9], [10, 11, 12, 13, 14, 15], "1<2",
                "ATTRIBUTION"),
        RelSpec("gold_fiction_c", [0, 1], [2, 3, 4], "1<2",
                "PURPOSE", signals=[("dm", "dm", [2])]),
        RelSpec("gold_fiction_c", [6, 7], [8, 9, 10, 11], "1<2",
                "PURPOSE", signals=[("dm", "dm", [8])]),
        RelSpec("gold_fiction_c", [13, 14], [16, 17], "1>2",
                "CONDITION", signals=[("dm", "dm", [13])]),
        RelSpec("gold_fiction_c", [19, 20, 21, 22], [23, 24], "1>2",
                "CONDITION", signals=[("dm", "dm", [19])]),
    ]


@pytest.fixture(scope="session")
def golden_ds() -> Dataset:
    return make_dataset(golden_docs(), golden_rels(), "golden")


# ---------------------------------------------------------------------------
# Label-by-explicitness corpus: causal relations lean implicit, the other
# three labels lean explicit, so residual signs are forced.

FIG_COUNTS = {
    "CAUSAL": (2, 8),       # (with dm signal, without)
    "CONCESSION": (8, 2),
    "CONDITION": (7, 3),
    "CONJUNCTION": (6, 4),
}


@pytest.fixture(scope="session")
def fig_ds() -> Dataset:
    sent = [("One", "one", "NUM", "nummod"),
            ("thing", "thing", "NOUN", "nsubj"),
            ("leads", "lead", "VERB", "root"),
            ("to", "to", "ADP", "case"),
            ("another", "another", "DET", "obl"),
            (".", ".", "PUNCT", "punct")]
    sentences = []
    rels = []
    offset = 0
    for label, (explicit, implicit) in FIG_COUNTS.items():
        for i in range(explicit + implicit):
            sentences.append(sent)
            signals = [("dm", "dm", [offset + 3])] if i < explicit else []
            rels.append(RelSpec("skew_doc", [offset, offset + 1, offset + 2],
                                [offset + 3, offset + 4], "1>2",
                                label, signals=signals))
            offset += len(sent)
    return make_dataset([DocSpec("skew_doc", sentences)], rels, "skew")


# ---------------------------------------------------------------------------
# Comparison pair: same shape, different label mix (6/4 versus 2/8).


def _compare_corpus(dataset_id: str, conj: int, elab: int) -> Dataset:
    sent = [("Cats", "cat", "NOUN", "nsubj"),
            ("sleep", "sleep", "VERB", "root"),
            ("and", "and", "CCONJ", "cc"),
            ("dogs", "dog", "NOUN", "nsubj"),
            ("run", "run", "VERB", "conj"),
            (".", ".", "PUNCT", "punct")]
    sentences = []
    rels = []
    offset = 0
    for label, n in (("CONJUNCTION", conj), ("ELABORATION", elab)):
        for _ in range(n):
            sentences.append(sent)
            rels.append(RelSpec(f"{dataset_id}_doc", [offset, offset + 1],
                                [offset + 3, offset + 4], "1>2", label,
                                signals=[("dm", "dm", [offset + 2])]))
            offset += len(sent)
    return make_dataset([DocSpec(f"{dataset_id}_doc", sentences)], rels,
                        dataset_id)


@pytest.fixture(scope="session")
def compare_pair() -> tuple[Dataset, Dataset]:
    return _compare_corpus("cmp_a", 6, 4), _compare_corpus("cmp_b", 2, 8)

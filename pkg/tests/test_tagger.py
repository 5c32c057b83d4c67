from __future__ import annotations

import random

import pytest

from conftest import FEE_QUESTION
from sgkr.corpus import label_tokens
from sgkr.errors import AliasCollision, SchemaViolation
from sgkr.graph import INPUT, OUTPUT, DependencyGraph, IoNode
from sgkr.tagger import TagVocabulary, build_vocabulary, extract_tags


def graph_with_labels(inputs, outputs):
    graph = DependencyGraph()
    for label in inputs:
        graph.add_io_node(IoNode(node_id=graph.io_node_id(label, INPUT), label=label, kind=INPUT))
    for label in outputs:
        graph.add_io_node(IoNode(node_id=graph.io_node_id(label, OUTPUT), label=label, kind=OUTPUT))
    return graph


class TestBuildVocabulary:
    def test_labels_collected_by_kind(self):
        vocab = build_vocabulary(graph_with_labels(["mcc"], ["fee"]))
        assert set(vocab.inputs) == {"mcc"}
        assert set(vocab.outputs) == {"fee"}

    def test_alias_merged(self):
        graph = graph_with_labels(["mcc"], ["fee"])
        vocab = build_vocabulary(graph, {
            "merchant category code": {"label": "mcc", "kind": "input"},
        })
        assert vocab.inputs["mcc"] == ("merchant category code",)

    def test_alias_collision(self):
        graph = graph_with_labels(["mcc", "merchant"], ["fee"])
        with pytest.raises(AliasCollision):
            build_vocabulary(graph, {
                "the code": {"label": "mcc", "kind": "input"},
                "The Code": {"label": "merchant", "kind": "input"},
            })

    def test_alias_shadowing_label_rejected(self):
        graph = graph_with_labels(["mcc", "merchant"], ["fee"])
        with pytest.raises(AliasCollision):
            build_vocabulary(graph, {"merchant": {"label": "mcc", "kind": "input"}})

    def test_alias_to_unknown_label_rejected(self):
        graph = graph_with_labels(["mcc"], ["fee"])
        with pytest.raises(SchemaViolation):
            build_vocabulary(graph, {"x": {"label": "nope", "kind": "input"}})

    def test_same_alias_both_kinds_allowed(self):
        graph = graph_with_labels(["total"], ["total"])
        vocab = build_vocabulary(graph, {
            "sum": {"label": "total", "kind": "input"},
        })
        assert vocab.inputs["total"] == ("sum",)
        assert vocab.outputs["total"] == ()

    def test_fee_vocabulary_contains_expected_labels(self, fee_vocab):
        assert "most expensive mcc" in fee_vocab.outputs
        assert set(fee_vocab.inputs) == {"mcc", "transaction amount", "merchant"}


class TestExtractTags:
    def test_fee_question(self, fee_vocab):
        tags = extract_tags(FEE_QUESTION, fee_vocab)
        assert tags.inputs >= {"mcc", "transaction amount"}
        assert tags.outputs >= {"most expensive mcc"}
        assert not tags.fallback

    def test_unrelated_question_falls_back(self, fee_vocab):
        tags = extract_tags("Hello there", fee_vocab)
        assert tags.inputs == frozenset()
        assert tags.outputs == frozenset()
        assert tags.fallback

    def test_inputs_only_is_fallback(self):
        vocab = TagVocabulary(inputs={"mcc": ()}, outputs={"fee": ()})
        tags = extract_tags("which mcc?", vocab)
        assert tags.inputs == {"mcc"}
        assert tags.fallback

    def test_case_and_punctuation_insensitive(self):
        vocab = TagVocabulary(inputs={"account type": ()}, outputs={"fee": ()})
        tags = extract_tags("What FEE applies to this Account-Type?", vocab)
        assert tags.inputs == {"account type"}
        assert tags.outputs == {"fee"}

    def test_two_labels_both_match(self):
        vocab = TagVocabulary(
            inputs={"account type": ()},
            outputs={"average fee": ()},
        )
        question = "What is the average fee for this account type?"
        tags = extract_tags(question, vocab)
        # Brute-force window check agrees.
        tokens = label_tokens(question)
        for label in ("account type", "average fee"):
            pattern = label_tokens(label)
            windows = [tokens[i:i + len(pattern)] for i in range(len(tokens))]
            assert pattern in windows
        assert tags.inputs == {"account type"}
        assert tags.outputs == {"average fee"}

    def test_longer_label_consumes_span_within_kind(self):
        vocab = TagVocabulary(inputs={"account type": (), "account": ()}, outputs={"fee": ()})
        tags = extract_tags("fee by account type", vocab)
        assert tags.inputs == {"account type"}

    def test_shorter_label_still_matches_leftover_span(self):
        vocab = TagVocabulary(inputs={"account type": (), "account": ()}, outputs={"fee": ()})
        tags = extract_tags("fee by account type for my account", vocab)
        assert tags.inputs == {"account type", "account"}

    def test_input_and_output_match_same_span(self, fee_vocab):
        # "mcc" (input) sits inside "most expensive mcc" (output); the two
        # kinds are matched independently so both hit.
        tags = extract_tags("most expensive mcc", fee_vocab)
        assert "mcc" in tags.inputs
        assert "most expensive mcc" in tags.outputs

    def test_deterministic(self, fee_vocab):
        first = extract_tags(FEE_QUESTION, fee_vocab)
        second = extract_tags(FEE_QUESTION, fee_vocab)
        assert first == second


class TestMonotonicity:
    def test_appending_unrelated_text_never_removes_matches(self):
        rng = random.Random(20250811)
        vocab_words = ["alpha", "beta", "gamma", "delta", "epsilon"]
        noise_words = ["zig", "zag", "quux", "wobble"]
        for _ in range(200):
            inputs = {}
            outputs = {}
            for _ in range(rng.randint(1, 3)):
                label = " ".join(rng.sample(vocab_words, rng.randint(1, 2)))
                inputs[label] = ()
            for _ in range(rng.randint(1, 3)):
                label = " ".join(rng.sample(vocab_words, rng.randint(1, 2)))
                outputs[label] = ()
            vocab = TagVocabulary(inputs=inputs, outputs=outputs)
            question = " ".join(rng.choices(vocab_words + noise_words, k=rng.randint(3, 10)))
            suffix = " ".join(rng.choices(noise_words, k=rng.randint(1, 5)))
            base = extract_tags(question, vocab)
            extended = extract_tags(question + " " + suffix, vocab)
            assert base.inputs <= extended.inputs
            assert base.outputs <= extended.outputs

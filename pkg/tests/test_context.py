from __future__ import annotations

import pytest

from conftest import FEE_QUESTION
from sgkr.context import (
    FUNCTIONS_HEADER,
    KNOWLEDGE_HEADER,
    ContextBundle,
    assemble_context,
    bundle_to_dict,
    render_prompt_block,
)
from sgkr.retriever import RetrievalResult, SearchStats, retrieve
from sgkr.tagger import extract_tags


@pytest.fixture()
def fee_bundle(fee_graph, fee_vocab):
    result = retrieve(fee_graph, extract_tags(FEE_QUESTION, fee_vocab))
    return assemble_context(result, fee_graph)


def empty_result():
    return RetrievalResult(paths=(), subgraph_nodes=frozenset(), fallback=True,
                           stats=SearchStats())


class TestAssembleContext:
    def test_callee_before_caller(self, fee_graph, fee_vocab):
        # f2 called by f1 must come first in the bundle.
        result = retrieve(fee_graph, extract_tags(FEE_QUESTION, fee_vocab))
        bundle = assemble_context(result, fee_graph)
        names = [name for name, _ in bundle.knowledge_texts]
        assert names.index("compute_fee") < names.index("most_expensive")
        assert names.index("rule_applies") < names.index("compute_fee")
        assert names.index("find_all_mccs") < names.index("sum_fee")

    def test_fallback_gives_empty_bundle(self, fee_graph):
        bundle = assemble_context(empty_result(), fee_graph)
        assert bundle.knowledge_texts == ()
        assert bundle.code_examples == ()
        assert bundle.source_paths == ()

    def test_fee_bundle_has_five_of_each(self, fee_bundle):
        assert len(fee_bundle.knowledge_texts) == 5
        assert len(fee_bundle.code_examples) == 5

    def test_knowledge_and_code_share_name_order(self, fee_bundle):
        assert [n for n, _ in fee_bundle.knowledge_texts] == \
            [n for n, _ in fee_bundle.code_examples]

    def test_deterministic_order(self, fee_bundle):
        assert [n for n, _ in fee_bundle.knowledge_texts] == [
            "find_all_mccs", "rule_applies", "compute_fee", "most_expensive", "sum_fee",
        ]

    def test_source_paths_preserved(self, fee_graph, fee_vocab):
        result = retrieve(fee_graph, extract_tags(FEE_QUESTION, fee_vocab))
        bundle = assemble_context(result, fee_graph)
        assert bundle.source_paths == result.paths


class TestRenderPromptBlock:
    def test_headers_present_with_one_entry(self):
        bundle = ContextBundle(
            knowledge_texts=(("f", "does f things"),),
            code_examples=(("f", "def f():\n    pass"),),
            source_paths=(),
        )
        text = render_prompt_block(bundle)
        assert KNOWLEDGE_HEADER in text
        assert FUNCTIONS_HEADER in text
        assert "f: does f things" in text
        assert "def f():" in text

    def test_empty_bundle_renders_headers_only(self):
        text = render_prompt_block(ContextBundle((), (), ()))
        assert text == f"{KNOWLEDGE_HEADER}\n\n{FUNCTIONS_HEADER}\n"

    def test_rendering_is_byte_deterministic(self, fee_bundle):
        assert render_prompt_block(fee_bundle) == render_prompt_block(fee_bundle)

    def test_fee_render_shape(self, fee_bundle):
        text = render_prompt_block(fee_bundle)
        knowledge_part = text.split(FUNCTIONS_HEADER)[0]
        assert len([ln for ln in knowledge_part.splitlines() if ": " in ln]) == 5
        assert text.count("def ") == 5
        assert text.index(KNOWLEDGE_HEADER) < text.index(FUNCTIONS_HEADER)

    def test_rendered_names_come_from_bundle(self, fee_bundle, fee_graph):
        text = render_prompt_block(fee_bundle)
        subgraph_names = {name for name, _ in fee_bundle.knowledge_texts}
        for line in text.splitlines():
            if line.startswith("def "):
                name = line.split("def ", 1)[1].split("(", 1)[0]
                assert name in subgraph_names

    def test_knowledge_section_count_equals_code_section_count(self, fee_bundle):
        assert len(fee_bundle.knowledge_texts) == len(fee_bundle.code_examples)


class TestStructuredExport:
    def test_fields_mirror_bundle(self, fee_bundle):
        payload = bundle_to_dict(fee_bundle)
        assert [item["function_name"] for item in payload["knowledge"]] == \
            [name for name, _ in fee_bundle.knowledge_texts]
        assert [item["function_name"] for item in payload["functions"]] == \
            [name for name, _ in fee_bundle.code_examples]
        assert payload["paths"] == [list(p.nodes) for p in fee_bundle.source_paths]

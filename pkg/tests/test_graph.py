from __future__ import annotations

import random

import pytest

from oracles import oracle_merge, oracle_reachable, random_premerge_graph
from sgkr.corpus import Corpus, CorpusEntry, IoDecl, IoSpec
from sgkr.errors import (
    AnchorNotFound,
    FormatVersionMismatch,
    KnowledgeBindingError,
    SchemaViolation,
)
from sgkr.graph import (
    CALL,
    FEEDS,
    INPUT,
    YIELDS,
    DependencyGraph,
    IoNode,
    KnowledgeCodeNode,
    assemble_raw_graph,
    build_graph,
    deserialize,
    insert_io_nodes,
    kc_node_id,
    merge_identical,
    serialize,
    to_dot,
    validate_graph,
)
from sgkr.parser import build_trace_fragment


def make_entry(entry_id, source, knowledge=None, inputs=(("x", None),), outputs=(("y", None),)):
    """Entry whose io anchors default to the first defined function."""
    from sgkr.parser import extract_functions
    first = extract_functions(source)[0].name if extract_functions(source) else "missing"
    io = IoSpec(
        inputs=tuple(IoDecl(lbl, anchor or first) for lbl, anchor in inputs),
        outputs=tuple(IoDecl(lbl, anchor or first) for lbl, anchor in outputs),
    )
    return CorpusEntry(entry_id=entry_id, source_text=source,
                       io_spec=io, knowledge_map=knowledge or {})


def corpus_of(*entries):
    return Corpus(name="t", version="1", entries=tuple(entries))


def assemble(*entries):
    corpus = corpus_of(*entries)
    fragments = [build_trace_fragment(e) for e in corpus.entries]
    return assemble_raw_graph(fragments, corpus)


class TestAssembleRawGraph:
    def test_same_name_across_entries_gives_two_nodes(self):
        graph = assemble(
            make_entry("e1", "def func1(x):\n    return x\n"),
            make_entry("e2", "def func1(x):\n    return x + 1\n"),
        )
        names = [n.function_name for n in graph.kc_nodes.values()]
        assert names == ["func1", "func1"]

    def test_chain_has_one_call_edge(self):
        graph = assemble(make_entry("e1", "def a():\n    b()\n\ndef b():\n    return 1\n"))
        assert len(graph.kc_nodes) == 2
        assert graph.edges == {(kc_node_id("e1", "a"), kc_node_id("e1", "b"), CALL)}

    def test_fee_fixture_premerge_node_count(self, fee_corpus):
        fragments = [build_trace_fragment(e) for e in fee_corpus.entries]
        graph = assemble_raw_graph(fragments, fee_corpus)
        assert len(graph.kc_nodes) == 13
        assert len({n.function_name for n in graph.kc_nodes.values()}) == 12

    def test_placeholder_knowledge_when_unannotated(self):
        graph = assemble(make_entry("e1", "def a(x):\n    return x + 1\n"))
        node = next(iter(graph.kc_nodes.values()))
        assert node.knowledge == "function a: return x + 1"

    def test_unknown_knowledge_key_raises(self):
        entry = make_entry("e1", "def a(x):\n    return x\n", knowledge={"b": "text"})
        with pytest.raises(KnowledgeBindingError):
            assemble(entry)

    def test_code_is_full_definition(self):
        graph = assemble(make_entry("e1", "def a(x):\n    return x\n"))
        node = next(iter(graph.kc_nodes.values()))
        assert node.code.startswith("def a(x):")


class TestMergeIdentical:
    def test_all_unique_is_identity(self):
        graph = assemble(make_entry("e1", "def a():\n    b()\n\ndef b():\n    return 1\n"))
        assert merge_identical(graph) == graph

    def test_input_does_not_mutate(self):
        graph = assemble(
            make_entry("e1", "def func1(x):\n    return x\n"),
            make_entry("e2", "def func1(x):\n    return x + 1\n"),
        )
        before = serialize(graph)
        merge_identical(graph)
        assert serialize(graph) == before

    def test_canonical_is_earliest_entry(self):
        graph = assemble(
            make_entry("e1", "def func1(x):\n    return x\n"),
            make_entry("e2", "def func1(x):\n    return x + 1\n"),
        )
        merged = merge_identical(graph)
        assert list(merged.kc_nodes) == [kc_node_id("e1", "func1")]
        node = merged.kc_nodes[kc_node_id("e1", "func1")]
        assert node.origin_entries == ("e1", "e2")
        assert node.variants == ("def func1(x):\n    return x + 1",)

    def test_differing_knowledge_appended_in_entry_order(self):
        graph = DependencyGraph()
        for entry_id, text in (("e1", "first"), ("e2", "second"), ("e3", "first")):
            graph.add_kc_node(KnowledgeCodeNode(
                node_id=kc_node_id(entry_id, "f"), function_name="f",
                code="def f():\n    pass", knowledge=text, origin_entries=(entry_id,),
            ))
        merged = merge_identical(graph)
        node = merged.kc_nodes[kc_node_id("e1", "f")]
        assert node.knowledge == "first\n\nsecond"

    def test_matches_relabel_oracle_on_random_graphs(self):
        rng = random.Random(7)
        for _ in range(200):
            graph = random_premerge_graph(rng)
            assert merge_identical(graph) == oracle_merge(graph)

    def test_idempotent(self):
        rng = random.Random(8)
        for _ in range(100):
            graph = random_premerge_graph(rng)
            merged = merge_identical(graph)
            assert merge_identical(merged) == merged

    def test_preserves_reachability_up_to_relabeling(self):
        rng = random.Random(9)
        for _ in range(100):
            graph = random_premerge_graph(rng)
            canon = {}
            for node in graph.kc_nodes.values():
                canon.setdefault(node.function_name, node.node_id)
            relabel = {n.node_id: canon[n.function_name] for n in graph.kc_nodes.values()}
            merged = merge_identical(graph)
            for start in graph.kc_nodes:
                before = {relabel[x] for x in oracle_reachable(graph, start) if x in relabel}
                after = oracle_reachable(merged, relabel[start])
                assert before <= after

    def test_node_count_equals_distinct_names(self):
        rng = random.Random(10)
        for _ in range(50):
            graph = random_premerge_graph(rng)
            merged = merge_identical(graph)
            names = {n.function_name for n in graph.kc_nodes.values()}
            assert len(merged.kc_nodes) == len(names)
            for edge in merged.edges:
                assert merged.has_node(edge.src) and merged.has_node(edge.dst)


class TestInsertIoNodes:
    def test_feeds_edge_added(self):
        graph = assemble(make_entry("e1", "def compute_fee(a):\n    return a\n"))
        spec = IoSpec(inputs=(IoDecl("transaction amount", "compute_fee"),),
                      outputs=(IoDecl("fee", "compute_fee"),))
        out = insert_io_nodes(graph, [spec])
        assert ("io:input:transaction amount", kc_node_id("e1", "compute_fee"), FEEDS) in out.edges
        assert (kc_node_id("e1", "compute_fee"), "io:output:fee", YIELDS) in out.edges

    def test_repeated_label_reuses_node_accumulates_edges(self):
        graph = assemble(make_entry(
            "e1", "def a(x):\n    return x\n\ndef b(x):\n    return x\n"))
        specs = [
            IoSpec(inputs=(IoDecl("x", "a"),), outputs=(IoDecl("y", "a"),)),
            IoSpec(inputs=(IoDecl("x", "b"),), outputs=(IoDecl("y", "b"),)),
        ]
        out = insert_io_nodes(graph, specs)
        assert len(out.io_nodes) == 2
        feeds = [e for e in out.edges if e.type == FEEDS]
        assert len(feeds) == 2

    def test_anchor_not_found(self):
        graph = assemble(make_entry("e1", "def a(x):\n    return x\n"))
        spec = IoSpec(inputs=(IoDecl("x", "missing"),), outputs=(IoDecl("y", "a"),))
        with pytest.raises(AnchorNotFound):
            insert_io_nodes(graph, [spec])

    def test_pure(self):
        graph = assemble(make_entry("e1", "def a(x):\n    return x\n"))
        before = serialize(graph)
        insert_io_nodes(graph, [IoSpec(inputs=(IoDecl("x", "a"),),
                                       outputs=(IoDecl("y", "a"),))])
        assert serialize(graph) == before


class TestValidateGraph:
    def test_fee_fixture_is_clean(self, fee_graph):
        report = validate_graph(fee_graph)
        assert report.ok
        assert report.violations == ()
        assert report.cycles == ()

    def test_two_cycle_reported(self):
        graph = assemble(make_entry("e1", "def a():\n    b()\n\ndef b():\n    a()\n"))
        report = validate_graph(graph)
        assert (kc_node_id("e1", "a"), kc_node_id("e1", "b"), kc_node_id("e1", "a")) \
            in report.cycles

    def test_self_loop_reported(self):
        graph = assemble(make_entry("e1", "def a():\n    return a()\n"))
        report = validate_graph(graph)
        assert report.cycles == ((kc_node_id("e1", "a"), kc_node_id("e1", "a")),)

    def test_dangling_edge_flagged(self):
        graph = assemble(make_entry("e1", "def a(x):\n    return x\n"))
        graph.add_edge(kc_node_id("e1", "a"), "kc:e1:ghost", CALL)
        report = validate_graph(graph)
        assert any("missing node" in v for v in report.violations)

    def test_unattached_io_flagged(self):
        graph = assemble(make_entry("e1", "def a(x):\n    return x\n"))
        graph.add_io_node(IoNode(node_id="io:input:x", label="x", kind=INPUT))
        report = validate_graph(graph)
        assert any("unattached" in v for v in report.violations)

    def test_duplicate_names_flagged_pre_merge(self):
        graph = assemble(
            make_entry("e1", "def func1(x):\n    return x\n"),
            make_entry("e2", "def func1(x):\n    return x\n"),
        )
        report = validate_graph(graph)
        assert any("duplicate function name" in v for v in report.violations)


class TestSerialization:
    def test_round_trip_equality(self, fee_graph):
        document = serialize(fee_graph)
        assert deserialize(document) == fee_graph

    def test_serialize_deserialize_is_byte_stable(self, fee_graph):
        document = serialize(fee_graph)
        assert serialize(deserialize(document)) == document

    def test_empty_graph_round_trips(self):
        empty = DependencyGraph()
        assert deserialize(serialize(empty)) == empty

    def test_fee_fixture_has_twelve_kc_nodes_after_merge(self, fee_graph):
        document = serialize(fee_graph)
        restored = deserialize(document)
        assert len(restored.kc_nodes) == 12

    def test_version_mismatch(self, fee_graph):
        document = serialize(fee_graph).replace('"format_version": "1"', '"format_version": "99"')
        with pytest.raises(FormatVersionMismatch):
            deserialize(document)

    def test_schema_violation_on_unknown_field(self):
        with pytest.raises(SchemaViolation):
            deserialize('{"format_version": "1", "kc_nodes": [], "io_nodes": [], '
                        '"edges": [], "bogus": 1}')

    def test_schema_violation_on_bad_edge_type(self, fee_graph):
        document = serialize(fee_graph).replace('"type": "CALL"', '"type": "WIBBLE"', 1)
        with pytest.raises(SchemaViolation):
            deserialize(document)

    def test_not_json(self):
        with pytest.raises(SchemaViolation):
            deserialize("][")

    def test_canonical_same_graph_same_bytes(self, fee_corpus):
        first = serialize(build_graph(fee_corpus))
        second = serialize(build_graph(fee_corpus))
        assert first == second


class TestDotExport:
    def test_labels_and_edge_types_present(self, fee_graph):
        dot = to_dot(fee_graph)
        assert dot.startswith("digraph")
        assert '[label="compute_fee", shape=box]' in dot
        assert '[label="mcc (input)", shape=ellipse]' in dot
        assert 'label="CALL"' in dot and 'label="FEEDS"' in dot and 'label="YIELDS"' in dot


class TestBuildGraph:
    def test_fee_fixture_counts(self, fee_graph):
        assert len(fee_graph.kc_nodes) == 12
        assert len(fee_graph.io_nodes) == 6
        edge_types = [e.type for e in fee_graph.edges]
        assert edge_types.count(CALL) == 10
        assert edge_types.count(FEEDS) == 4
        assert edge_types.count(YIELDS) == 3

    def test_shared_function_has_both_origins(self, fee_graph):
        node = fee_graph.kc_nodes[kc_node_id("q1", "compute_fee")]
        assert node.origin_entries == ("q1", "q2")
        assert node.variants == ()  # identical bodies collapse without variants

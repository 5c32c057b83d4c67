# Walks through offline graph construction on the bundled fee corpus:
# load the manifest, parse each solution into functions and call edges,
# assemble the pre-merge graph, merge duplicate names, insert semantic
# I/O nodes, validate, and persist the canonical document.

from pathlib import Path

from sgkr import (
    assemble_raw_graph,
    build_trace_fragment,
    insert_io_nodes,
    load_corpus,
    merge_identical,
    serialize,
    to_dot,
    validate_graph,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures" / "fee_corpus"

# ---- 1. Load the corpus ---------------------------------------------------
# Each entry is one worked example: source code, declared inputs/outputs
# (with the function each attaches to), and per-function knowledge notes.
corpus = load_corpus(FIXTURES / "manifest.json")
print(f"corpus {corpus.name!r} v{corpus.version} with {len(corpus.entries)} entries")
for entry in corpus.entries:
    print(f"  {entry.entry_id}: {len(entry.knowledge_map)} annotated functions, "
          f"inputs={[d.label for d in entry.io_spec.inputs]}, "
          f"outputs={[d.label for d in entry.io_spec.outputs]}")

# ---- 2. Parse each entry --------------------------------------------------
# The parser finds definitions and records caller->callee edges between
# functions defined in the same entry. Library calls drop out.
fragments = [build_trace_fragment(entry) for entry in corpus.entries]
for fragment in fragments:
    print(f"\nentry {fragment.entry_id}: "
          f"{len(fragment.functions)} functions, {len(fragment.call_edges)} call edges")
    for caller, callee in fragment.call_edges:
        print(f"  {caller} -> {callee}")

# ---- 3. Assemble, merge, insert I/O nodes ----------------------------------
# Before merging there is one node per (entry, function) pair, so the
# shared compute_fee appears twice. Merging collapses it and thereby
# connects the two solutions' pipelines.
raw = assemble_raw_graph(fragments, corpus)
print(f"\npre-merge: {len(raw.kc_nodes)} nodes "
      f"({len({n.function_name for n in raw.kc_nodes.values()})} distinct names)")

merged = merge_identical(raw)
print(f"merged:    {len(merged.kc_nodes)} nodes")
shared = [n for n in merged.kc_nodes.values() if len(n.origin_entries) > 1]
for node in shared:
    print(f"  {node.function_name} now carries entries {node.origin_entries}")

graph = insert_io_nodes(merged, [entry.io_spec for entry in corpus.entries])
print(f"with I/O:  {len(graph.io_nodes)} io nodes, {len(graph.edges)} edges total")

# ---- 4. Validate and persist ------------------------------------------------
report = validate_graph(graph)
print(f"\nvalidation: ok={report.ok} "
      f"(violations={len(report.violations)}, call cycles={len(report.cycles)})")

out_dir = Path(__file__).resolve().parent / "output"
out_dir.mkdir(exist_ok=True)
(out_dir / "fee_graph.json").write_text(serialize(graph))
(out_dir / "fee_graph.dot").write_text(to_dot(graph))
print(f"wrote {out_dir / 'fee_graph.json'}")
print(f"wrote {out_dir / 'fee_graph.dot'} (render with: dot -Tpng)")

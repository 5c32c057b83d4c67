"""Assembly of retrieved subgraphs into prompt-ready context bundles.

A bundle pairs every retrieved function with its knowledge text, ordered
so that callees precede their callers (reading the code bottom-up), and
renders into the two fixed prompt sections a downstream model consumes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import CALL, DependencyGraph
from .retriever import DependencyPath, RetrievalResult

KNOWLEDGE_HEADER = "Following domain knowledge and context should be helpful:"
FUNCTIONS_HEADER = "Here are some example functions that you may refer to:"


@dataclass(frozen=True)
class ContextBundle:
    """Knowledge texts and code examples for one retrieval, plus the
    dependency paths that produced them. Both lists share the same
    function-name order."""

    knowledge_texts: tuple[tuple[str, str], ...]
    code_examples: tuple[tuple[str, str], ...]
    source_paths: tuple[DependencyPath, ...]


def _topological_names(result: RetrievalResult, graph: DependencyGraph) -> list[str]:
    """Subgraph function names with callees before callers, ties and any
    recursive knots broken by name order."""
    kc_ids = [nid for nid in result.subgraph_nodes if nid in graph.kc_nodes]
    names = {nid: graph.kc_nodes[nid].function_name for nid in kc_ids}
    id_set = set(kc_ids)

    # Pending callee count per node, over CALL edges inside the subgraph.
    pending = {nid: 0 for nid in kc_ids}
    callers: dict[str, list[str]] = {nid: [] for nid in kc_ids}
    for edge in graph.edges:
        if edge.type == CALL and edge.src in id_set and edge.dst in id_set:
            pending[edge.src] += 1
            callers[edge.dst].append(edge.src)

    ordered: list[str] = []
    remaining = set(kc_ids)
    while remaining:
        ready = [nid for nid in remaining if pending[nid] == 0]
        pool = ready if ready else list(remaining)  # cycle: fall back to name order
        chosen = min(pool, key=lambda nid: (names[nid], nid))
        ordered.append(chosen)
        remaining.discard(chosen)
        for caller in callers[chosen]:
            if caller in remaining:
                pending[caller] -= 1
    return [names[nid] for nid in ordered]


def assemble_context(result: RetrievalResult, graph: DependencyGraph) -> ContextBundle:
    """One (knowledge, code) entry per retrieved knowledge-code node;
    I/O nodes are ignored. A fallback result gives an empty bundle."""
    if result.fallback:
        return ContextBundle(knowledge_texts=(), code_examples=(), source_paths=())

    by_name = {node.function_name: node for node in graph.kc_nodes.values()}
    ordered = _topological_names(result, graph)
    knowledge = tuple((name, by_name[name].knowledge) for name in ordered)
    code = tuple((name, by_name[name].code) for name in ordered)
    return ContextBundle(
        knowledge_texts=knowledge,
        code_examples=code,
        source_paths=result.paths,
    )


def render_prompt_block(bundle: ContextBundle) -> str:
    """Plain-text rendering: the knowledge section then the function
    section, each under its fixed header. Deterministic byte-for-byte."""
    parts = [KNOWLEDGE_HEADER, ""]
    for name, knowledge in bundle.knowledge_texts:
        parts.append(f"{name}: {knowledge}")
        parts.append("")
    parts.append(FUNCTIONS_HEADER)
    parts.append("")
    for _, code in bundle.code_examples:
        parts.append(code)
        parts.append("")
    while parts and parts[-1] == "":
        parts.pop()
    return "\n".join(parts) + "\n"


def bundle_to_dict(bundle: ContextBundle) -> dict:
    """Structured export mirroring the bundle fields, for programmatic
    consumers."""
    return {
        "knowledge": [
            {"function_name": name, "knowledge": text}
            for name, text in bundle.knowledge_texts
        ],
        "functions": [
            {"function_name": name, "code": code}
            for name, code in bundle.code_examples
        ],
        "paths": [list(path.nodes) for path in bundle.source_paths],
    }

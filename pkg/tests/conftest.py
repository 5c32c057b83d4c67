from __future__ import annotations

from pathlib import Path

import pytest

from sgkr import build_graph, build_vocabulary, load_aliases, load_corpus

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures" / "fee_corpus"

FEE_QUESTION = "What is the most expensive MCC for a transaction of 5 euros, in general?"

FEE_NEEDED = {"rule_applies", "find_all_mccs", "sum_fee", "most_expensive", "compute_fee"}
FEE_UNNEEDED = {
    "average_fee", "output_average_fee", "merchant_matches_fee",
    "match_fee_conditions", "match_capture_delay", "cheapest_card_scheme",
    "get_mcc_code_from_dsp",
}


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture(scope="session")
def fee_corpus():
    return load_corpus(FIXTURE_DIR / "manifest.json")


@pytest.fixture(scope="session")
def fee_graph(fee_corpus):
    return build_graph(fee_corpus)


@pytest.fixture(scope="session")
def fee_vocab(fee_graph):
    return build_vocabulary(fee_graph, load_aliases(FIXTURE_DIR / "aliases.json"))

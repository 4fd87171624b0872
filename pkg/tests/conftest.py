from __future__ import annotations

import pytest

from ecolink.demo import generate_demo_corpus, write_demo_corpus
from ecolink.embedding import LocalHashEmbedder
from ecolink.index import build_index
from ecolink.llm import CannedChatBackend
from ecolink.model import PipelineConfig
from ecolink.pipeline import Backends

_acceptance_outcomes: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _acceptance_outcomes[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance_outcomes.items():
        label = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{label}  {name}")


@pytest.fixture(scope="session")
def demo_corpus():
    return generate_demo_corpus()


@pytest.fixture(scope="session")
def demo_paths(demo_corpus, tmp_path_factory):
    return write_demo_corpus(demo_corpus, tmp_path_factory.mktemp("demo"))


@pytest.fixture(scope="session")
def embedder():
    return LocalHashEmbedder(dim=256)


@pytest.fixture(scope="session")
def demo_index(demo_corpus, embedder):
    return build_index(demo_corpus.activities, embedder)


@pytest.fixture(scope="session")
def canned_chat(demo_paths):
    return CannedChatBackend(demo_paths.chat_fixtures)


@pytest.fixture(scope="session")
def demo_backends(embedder, canned_chat):
    return Backends(embedder=embedder, chat=canned_chat)


@pytest.fixture()
def config():
    return PipelineConfig()

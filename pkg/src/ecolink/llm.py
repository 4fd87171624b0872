"""Chat-LLM gateway: prompt assembly, backend calls, response parsing.

The prompt template is frozen in a versioned package resource so golden
outputs survive refactors. Two backends: a remote chat-completions client
(temperature 0, fixed seed) and a canned backend that replays responses
keyed by prompt hash from a fixtures file, erroring on unknown prompts so
fixture gaps surface immediately.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable

from ecolink.errors import BackendError, FixtureMissError, IngestError
from ecolink.model import BomEntry, Datasheet

LLM_API_KEY_VAR = "ECOLINK_LLM_API_KEY"
DEFAULT_CHAT_MODEL = "llama-3.1-8b-instruct"
PROMPT_VERSION = "v1"
MAX_ATTEMPTS = 3
BACKOFF_START_SECONDS = 1.0
DEFAULT_IN_FLIGHT = 4

_NAME_LABEL = "activity name:"
_INFO_LABEL = "activity information:"


def _load_resource(name: str) -> str:
    return resources.files("ecolink.resources").joinpath(name).read_text(encoding="utf-8")


_PROMPT_TEMPLATE = _load_resource(f"prompt_{PROMPT_VERSION}.txt")
_DATASHEET_SECTION = _load_resource(f"prompt_datasheet_{PROMPT_VERSION}.txt")


@dataclass(frozen=True)
class LlmResponse:
    """Parsed chat response; empty fields mean the lenient fallback fired."""

    activity_name: str
    activity_information: str
    raw: str
    parsed: bool = False


def build_prompt(entry: BomEntry, datasheet: Datasheet | None = None) -> str:
    """Assemble the deterministic context prompt for one component.

    Identical inputs yield byte-identical prompts; the datasheet body is
    included, clearly delimited, only when a datasheet is given.
    """
    section = ""
    if datasheet is not None:
        section = _DATASHEET_SECTION.format(filename=datasheet.filename, body=datasheet.body)
    return _PROMPT_TEMPLATE.format(
        name=entry.name,
        supplier=entry.supplier,
        material=entry.material,
        datasheet_section=section,
    )


def prompt_sha256(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def parse_llm_response(raw: str) -> LlmResponse:
    """Extract the two labeled sections, case-insensitively.

    If either label is missing the fields stay empty and callers fall back
    to the raw text; parsing never fails.
    """
    if not raw:
        raise ValueError("response text is empty")
    lines = raw.splitlines()
    name_value: str | None = None
    info_value: str | None = None
    for idx, line in enumerate(lines):
        stripped = line.strip()
        lowered = stripped.lower()
        if lowered.startswith(_NAME_LABEL) and name_value is None:
            name_value = stripped[len(_NAME_LABEL) :].strip()
        elif lowered.startswith(_INFO_LABEL) and info_value is None:
            parts = [stripped[len(_INFO_LABEL) :].strip()]
            for follower in lines[idx + 1 :]:
                follower_lowered = follower.strip().lower()
                if follower_lowered.startswith(_NAME_LABEL) or follower_lowered.startswith(
                    _INFO_LABEL
                ):
                    break
                parts.append(follower)
            info_value = "\n".join(parts).strip()
    if name_value is None or info_value is None:
        return LlmResponse("", "", raw, parsed=False)
    return LlmResponse(name_value, info_value, raw, parsed=True)


def ranking_query_text(response: LlmResponse) -> str:
    """Query text for database ranking: parsed name+information, raw fallback.

    Mirrors the index side's name+newline+description layout so query and
    corpus live in the same textual register.
    """
    if response.parsed:
        return f"{response.activity_name}\n{response.activity_information}"
    return response.raw


def complete(prompt: str, backend) -> str:
    """Run one chat completion through the given backend."""
    if not prompt:
        raise ValueError("prompt must be nonempty")
    return backend.complete(prompt)


class CannedChatBackend:
    """Replays responses from a fixtures file keyed by prompt sha256."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self._responses: dict[str, str] = {}
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise IngestError(
                        f"chat fixtures line {lineno}: invalid JSON ({exc.msg})"
                    ) from None
                if "prompt_sha256" not in record or "response" not in record:
                    raise IngestError(
                        f"chat fixtures line {lineno}: needs prompt_sha256 and response"
                    )
                self._responses[record["prompt_sha256"]] = record["response"]

    def complete(self, prompt: str) -> str:
        digest = prompt_sha256(prompt)
        try:
            return self._responses[digest]
        except KeyError:
            raise FixtureMissError(
                f"no canned response for prompt sha256={digest}"
            ) from None


def write_chat_fixtures(pairs: Iterable[tuple[str, str]], path: str | Path) -> None:
    """Write (prompt, response) pairs in the canned fixtures format."""
    with open(path, "w", encoding="utf-8") as fh:
        for prompt, response in pairs:
            fh.write(
                json.dumps(
                    {"prompt_sha256": prompt_sha256(prompt), "response": response},
                    ensure_ascii=False,
                    sort_keys=True,
                )
            )
            fh.write("\n")


class RemoteChatBackend:
    """Chat-completions client: POST {model, messages, temperature, seed}.

    Sampling is pinned to temperature 0 with a fixed seed for
    reproducibility; transient failures retry up to MAX_ATTEMPTS with
    exponential backoff. A semaphore bounds in-flight requests.
    """

    def __init__(
        self,
        endpoint: str,
        model: str = DEFAULT_CHAT_MODEL,
        api_key: str | None = None,
        in_flight: int = DEFAULT_IN_FLIGHT,
        seed: int = 0,
        sleeper: Callable[[float], None] = time.sleep,
    ) -> None:
        self.endpoint = endpoint
        self.model = model
        self.api_key = api_key if api_key is not None else os.environ.get(LLM_API_KEY_VAR)
        self.seed = seed
        self._sleeper = sleeper
        self._slots = threading.Semaphore(in_flight)

    def complete(self, prompt: str) -> str:
        with self._slots:
            return self._request(prompt)

    def _request(self, prompt: str) -> str:
        import requests

        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
            "seed": self.seed,
        }
        last_error: BackendError | None = None
        for attempt in range(MAX_ATTEMPTS):
            if attempt:
                self._sleeper(BACKOFF_START_SECONDS * 2 ** (attempt - 1))
            try:
                response = requests.post(self.endpoint, json=payload, headers=headers, timeout=120)
            except requests.RequestException as exc:
                last_error = BackendError(f"chat request failed: {exc}", retryable=True)
                continue
            if response.status_code >= 500:
                last_error = BackendError(
                    f"chat service returned {response.status_code}",
                    retryable=True,
                    status=response.status_code,
                )
                continue
            if response.status_code != 200:
                raise BackendError(
                    f"chat service returned {response.status_code}: {response.text[:200]}",
                    status=response.status_code,
                )
            try:
                return response.json()["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError) as exc:
                raise BackendError(f"malformed chat response: {exc}") from None
        assert last_error is not None
        raise last_error

"""Prompt rendering, provider adapters, and replayable run storage.

A run is a directory of plain-text record files plus a JSON manifest. Raw
responses and extracted configs are stored side by side so every metric can
be recomputed offline. The scripted mock provider makes full runs
deterministic and byte-reproducible.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Mapping, Sequence

import requests

from .parser import extract_config_from_response

RUN_FORMAT = "pwqeval-run/1"
TEMPLATE_VERSION = "1"

TASK_INSTRUCTION = (
    "You are configuring password quality checking on a Linux system.\n"
    "Write a pwquality.conf file that enforces the password policy below.\n"
    "Reply with only the contents of pwquality.conf and no explanation.\n"
)
POLICY_HEADER = "Password policy:"
DOC_BEGIN = "----- BEGIN pwquality.conf DOCUMENTATION -----"
DOC_END = "----- END pwquality.conf DOCUMENTATION -----"


class ProviderError(Exception):
    """Base failure talking to a completion provider."""


class ProviderAuthError(ProviderError):
    """Credentials missing or rejected; retrying cannot help."""


class ProviderTransientError(ProviderError):
    """Rate limit or server-side failure; retrying may help."""


@dataclass(frozen=True)
class PolicyPrompt:
    prompt_id: str
    policy_text: str
    doc_text: str | None = None

    def __post_init__(self) -> None:
        if not self.prompt_id:
            raise ValueError("prompt_id must be non-empty")


@dataclass(frozen=True)
class GenerationRecord:
    model: str
    prompt_id: str
    doc_augmented: bool
    iteration_index: int
    raw_response: str
    extracted_config: str
    timestamp: str

    def __post_init__(self) -> None:
        # extracted_config is derived state; reject records that drift
        if self.extracted_config != extract_config_from_response(self.raw_response):
            raise ValueError(
                f"extracted_config does not match raw_response for "
                f"{self.key()} (stale or corrupt record)"
            )

    def key(self) -> tuple[str, str, bool, int]:
        return (self.model, self.prompt_id, self.doc_augmented, self.iteration_index)


@dataclass(frozen=True)
class GenerationFailure:
    prompt_id: str
    doc_augmented: bool
    iteration_index: int
    error: str


def render_prompt(prompt: PolicyPrompt, doc_augmented: bool) -> str:
    """Render the versioned prompt template. Pure; identical in, identical out."""
    if doc_augmented and not prompt.doc_text:
        raise ValueError(f"prompt {prompt.prompt_id!r} has no doc_text to embed")
    parts = [TASK_INSTRUCTION, POLICY_HEADER, "", prompt.policy_text.rstrip("\n")]
    if doc_augmented:
        assert prompt.doc_text is not None
        parts += ["", DOC_BEGIN, prompt.doc_text.rstrip("\n"), DOC_END]
    return "\n".join(parts) + "\n"


def template_fingerprint() -> str:
    """Hash of the template text, recorded in manifests so results cite it."""
    material = "\n".join(
        [TEMPLATE_VERSION, TASK_INSTRUCTION, POLICY_HEADER, DOC_BEGIN, DOC_END]
    )
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


class Provider(ABC):
    """One completion interface; adapters own each vendor's API shape."""

    model: str

    @abstractmethod
    def complete(self, prompt_text: str) -> str:
        """Send one prompt, return the completion text."""


class MockProvider(Provider):
    """Replays a fixed response list, cycling when calls outnumber entries."""

    def __init__(self, model: str, responses: Sequence[str]):
        if not responses:
            raise ValueError("mock provider needs at least one response")
        self.model = model
        self.responses = tuple(responses)
        self.calls = 0

    @classmethod
    def from_script(cls, path: str | Path) -> "MockProvider":
        """Load a JSON script: {"model": str, "responses": [str, ...]}."""
        with open(path, encoding="utf-8") as handle:
            script = json.load(handle)
        if not isinstance(script, dict) or "responses" not in script:
            raise ValueError(f"{path}: mock script must be an object with a responses list")
        return cls(script.get("model", "mock"), script["responses"])

    def complete(self, prompt_text: str) -> str:
        response = self.responses[self.calls % len(self.responses)]
        self.calls += 1
        return response


# transport(url, headers, payload, timeout) -> (status_code, parsed_json_body)
Transport = Callable[[str, Mapping[str, str], Mapping[str, object], float], tuple[int, dict]]


def _requests_transport(
    url: str, headers: Mapping[str, str], payload: Mapping[str, object], timeout: float
) -> tuple[int, dict]:
    try:
        reply = requests.post(url, headers=dict(headers), json=payload, timeout=timeout)
    except requests.RequestException as exc:
        raise ProviderTransientError(f"request failed: {exc}") from exc
    try:
        body = reply.json()
    except ValueError:
        body = {}
    return reply.status_code, body


class OpenAIChatProvider(Provider):
    """Adapter for OpenAI-style chat-completion HTTP APIs.

    Credentials come from the OPENAI_API_KEY environment variable unless an
    api_key is passed. Sampling parameters are left at the provider default
    and this is recorded in the run manifest as a reproducibility caveat.
    """

    ENV_VAR = "OPENAI_API_KEY"
    DEFAULT_BASE_URL = "https://api.openai.com/v1"

    def __init__(
        self,
        model: str,
        api_key: str | None = None,
        base_url: str | None = None,
        transport: Transport | None = None,
        env: Mapping[str, str] | None = None,
        timeout: float = 60.0,
    ):
        env = os.environ if env is None else env
        self.model = model
        self.api_key = api_key or env.get(self.ENV_VAR, "")
        if not self.api_key:
            raise ProviderAuthError(f"no API key: set {self.ENV_VAR} or pass api_key")
        self.base_url = (base_url or env.get("OPENAI_BASE_URL") or self.DEFAULT_BASE_URL).rstrip("/")
        self.transport = transport or _requests_transport
        self.timeout = timeout

    def complete(self, prompt_text: str) -> str:
        url = f"{self.base_url}/chat/completions"
        headers = {
            "Authorization": f"Bearer {self.api_key}",
            "Content-Type": "application/json",
        }
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt_text}],
        }
        status, body = self.transport(url, headers, payload, self.timeout)
        if status in (401, 403):
            raise ProviderAuthError(f"provider rejected credentials (HTTP {status})")
        if status == 429 or status >= 500:
            raise ProviderTransientError(f"provider unavailable (HTTP {status})")
        if status != 200:
            raise ProviderError(f"provider error (HTTP {status}): {body}")
        try:
            text = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise ProviderError(f"malformed completion body: {body!r}") from None
        if not isinstance(text, str):
            raise ProviderError(f"completion content is not text: {text!r}")
        return text


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def generate_responses(
    provider: Provider,
    prompt: PolicyPrompt,
    iterations: int,
    doc_augmented: bool,
    max_attempts: int = 3,
    sleep: Callable[[float], None] = time.sleep,
    clock: Callable[[], str] = _utc_now,
    failures: list[GenerationFailure] | None = None,
) -> list[GenerationRecord]:
    """Issue `iterations` independent completions of one rendered prompt.

    Transient provider errors are retried up to max_attempts per iteration.
    Auth errors always propagate. Other failures are appended to `failures`
    when a list is supplied (so partial runs are recorded, never silently
    dropped) and raised otherwise.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    rendered = render_prompt(prompt, doc_augmented)
    records = []
    for index in range(iterations):
        try:
            raw = _complete_with_retry(provider, rendered, max_attempts, sleep)
        except ProviderAuthError:
            raise
        except ProviderError as exc:
            if failures is None:
                raise
            failures.append(
                GenerationFailure(prompt.prompt_id, doc_augmented, index, str(exc))
            )
            continue
        records.append(
            GenerationRecord(
                model=provider.model,
                prompt_id=prompt.prompt_id,
                doc_augmented=doc_augmented,
                iteration_index=index,
                raw_response=raw,
                extracted_config=extract_config_from_response(raw),
                timestamp=clock(),
            )
        )
    return records


def _complete_with_retry(
    provider: Provider, rendered: str, max_attempts: int, sleep: Callable[[float], None]
) -> str:
    last: ProviderTransientError | None = None
    for attempt in range(1, max_attempts + 1):
        try:
            return provider.complete(rendered)
        except ProviderTransientError as exc:
            last = exc
            if attempt < max_attempts:
                sleep(0.5 * attempt)
    assert last is not None
    raise last


def _slug(text: str) -> str:
    cleaned = re.sub(r"[^A-Za-z0-9._-]+", "-", text).strip("-")
    return cleaned or "x"


def _record_stem(record: GenerationRecord) -> str:
    arm = "doc" if record.doc_augmented else "nodoc"
    return (
        f"{_slug(record.model)}__{_slug(record.prompt_id)}"
        f"__{arm}__{record.iteration_index:02d}"
    )


def content_digest(records: Sequence[GenerationRecord]) -> str:
    """Order-independent digest of run content, timestamps excluded.

    Two runs with identical responses digest identically even when generated
    at different times, which is what makes mock-run reports byte-stable.
    """
    digest = hashlib.sha256()
    for record in sorted(records, key=GenerationRecord.key):
        blob = json.dumps(
            [
                record.model,
                record.prompt_id,
                record.doc_augmented,
                record.iteration_index,
                record.raw_response,
                record.extracted_config,
            ],
            ensure_ascii=True,
        )
        digest.update(blob.encode("utf-8"))
        digest.update(b"\x00")
    return digest.hexdigest()


@dataclass(frozen=True)
class StoredRun:
    run_dir: Path
    manifest: dict
    records: tuple[GenerationRecord, ...]
    failures: tuple[GenerationFailure, ...]


def run_generation(
    provider: Provider,
    prompts: Sequence[PolicyPrompt],
    iterations: int,
    out_dir: str | Path,
    with_doc: bool = False,
    max_attempts: int = 3,
    sleep: Callable[[float], None] = time.sleep,
    clock: Callable[[], str] = _utc_now,
) -> StoredRun:
    """Generate and persist a full run under out_dir.

    Deterministic order: prompts sorted by id, plain arm before the
    doc-augmented arm, iteration indices ascending. with_doc adds the
    doc-augmented arm alongside the plain one for every prompt that
    carries documentation text.
    """
    out_dir = Path(out_dir)
    if (out_dir / "manifest.json").exists():
        raise FileExistsError(f"{out_dir} already holds a run manifest")
    ids = [p.prompt_id for p in prompts]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate prompt_id in corpus")

    records: list[GenerationRecord] = []
    failures: list[GenerationFailure] = []
    for prompt in sorted(prompts, key=lambda p: p.prompt_id):
        arms = [False, True] if with_doc else [False]
        for arm in arms:
            records.extend(
                generate_responses(
                    provider,
                    prompt,
                    iterations,
                    doc_augmented=arm,
                    max_attempts=max_attempts,
                    sleep=sleep,
                    clock=clock,
                    failures=failures,
                )
            )
    return write_run(out_dir, records, failures, iterations=iterations)


def write_run(
    out_dir: str | Path,
    records: Sequence[GenerationRecord],
    failures: Sequence[GenerationFailure] = (),
    iterations: int | None = None,
) -> StoredRun:
    """Persist records to the run layout: records/*.raw.txt + *.conf + manifest."""
    out_dir = Path(out_dir)
    records_dir = out_dir / "records"
    records_dir.mkdir(parents=True, exist_ok=True)

    keys = [r.key() for r in records]
    if len(set(keys)) != len(keys):
        raise ValueError("duplicate (model, prompt_id, doc_augmented, iteration_index)")

    manifest_records = []
    for record in sorted(records, key=GenerationRecord.key):
        stem = _record_stem(record)
        raw_rel = f"records/{stem}.raw.txt"
        conf_rel = f"records/{stem}.conf"
        _write_text(out_dir / raw_rel, record.raw_response)
        _write_text(out_dir / conf_rel, record.extracted_config)
        manifest_records.append(
            {
                "model": record.model,
                "prompt_id": record.prompt_id,
                "doc_augmented": record.doc_augmented,
                "iteration_index": record.iteration_index,
                "timestamp": record.timestamp,
                "raw_file": raw_rel,
                "config_file": conf_rel,
            }
        )

    manifest = {
        "format": RUN_FORMAT,
        "template_version": TEMPLATE_VERSION,
        "template_fingerprint": template_fingerprint(),
        "sampling": "provider defaults (not pinned)",
        "iterations": iterations if iterations is not None else 0,
        "content_digest": content_digest(records),
        "records": manifest_records,
        "failures": [
            {
                "prompt_id": f.prompt_id,
                "doc_augmented": f.doc_augmented,
                "iteration_index": f.iteration_index,
                "error": f.error,
            }
            for f in failures
        ],
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8", newline="") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return StoredRun(
        run_dir=out_dir,
        manifest=manifest,
        records=tuple(sorted(records, key=GenerationRecord.key)),
        failures=tuple(failures),
    )


def load_run(run_dir: str | Path) -> StoredRun:
    """Reload a persisted run, verifying format, uniqueness, and content digest."""
    run_dir = Path(run_dir)
    manifest_path = run_dir / "manifest.json"
    if not manifest_path.exists():
        raise FileNotFoundError(f"{run_dir} has no manifest.json")
    with open(manifest_path, encoding="utf-8") as handle:
        manifest = json.load(handle)
    if manifest.get("format") != RUN_FORMAT:
        raise ValueError(f"unsupported run format: {manifest.get('format')!r}")

    records = []
    for entry in manifest["records"]:
        raw = _read_text(run_dir / entry["raw_file"])
        extracted = _read_text(run_dir / entry["config_file"])
        records.append(
            GenerationRecord(
                model=entry["model"],
                prompt_id=entry["prompt_id"],
                doc_augmented=entry["doc_augmented"],
                iteration_index=entry["iteration_index"],
                raw_response=raw,
                extracted_config=extracted,
                timestamp=entry["timestamp"],
            )
        )
    keys = [r.key() for r in records]
    if len(set(keys)) != len(keys):
        raise ValueError(f"{run_dir}: duplicate record keys in manifest")
    digest = content_digest(records)
    if digest != manifest.get("content_digest"):
        raise ValueError(f"{run_dir}: content digest mismatch (corrupt or edited run)")

    failures = tuple(
        GenerationFailure(
            prompt_id=f["prompt_id"],
            doc_augmented=f["doc_augmented"],
            iteration_index=f["iteration_index"],
            error=f["error"],
        )
        for f in manifest.get("failures", [])
    )
    return StoredRun(
        run_dir=run_dir,
        manifest=manifest,
        records=tuple(records),
        failures=failures,
    )


def _write_text(path: Path, text: str) -> None:
    # newline="" so record bytes survive round-trips on any platform
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)


def _read_text(path: Path) -> str:
    with open(path, encoding="utf-8", newline="") as handle:
        return handle.read()

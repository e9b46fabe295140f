"""Clients for the external generation services, behind a mockable transport.

The pipeline needs four remote capabilities: text completion (scene parsing,
constraint proposals, redundancy pruning), image generation (reference image,
per-object images, background texture), and image-to-3D asset generation.
``HttpTransport`` talks to a configured endpoint; ``MockTransport`` produces
deterministic fixture content with zero network access; ``RecordingTransport``
and ``ReplayTransport`` capture and replay live traffic for tests.

All jobs are tracked in a JSON ledger so an interrupted pipeline run can be
resumed with completed work skipped.
"""

from __future__ import annotations

import base64
import hashlib
import json
import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Protocol

import httpx

from . import glb, prompts
from .fixtures import BEDROOM_CONSTRAINTS_JSON, BEDROOM_SCENE_JSON
from .scene import AssetDims, ObjectSpec, Scene, SceneParseError, parse_scene, rescale_spec_dims

logger = logging.getLogger(__name__)


class TransportError(RuntimeError):
    """Retriable transport-level failure."""


class ServiceError(RuntimeError):
    """Hard service failure; carries the raw response when available."""

    def __init__(self, message: str, raw: str | None = None):
        super().__init__(message)
        self.raw = raw


class Transport(Protocol):
    def text(self, kind: str, prompt: str, *, system: str | None = None, image: bytes | None = None) -> str: ...

    def image(self, kind: str, prompt: str, *, image: bytes | None = None) -> bytes: ...

    def asset(self, kind: str, image: bytes, *, hint_size: tuple | None = None) -> bytes: ...


class HttpTransport:
    """JSON-over-HTTP client for a generation gateway.

    Endpoints (relative to the base URL): POST /v1/text, /v1/image,
    /v1/asset.  Request and response bodies are JSON with base64-encoded
    binary payloads; the API key travels as a bearer token.
    """

    def __init__(self, base_url: str, api_key: str | None = None, timeout: float = 300.0, client: httpx.Client | None = None):
        self.base_url = base_url.rstrip("/")
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = client or httpx.Client(timeout=timeout, headers=headers)

    @classmethod
    def from_env(cls) -> "HttpTransport":
        url = os.environ.get("SCENELAYOUT_SERVICES_URL")
        if not url:
            raise ServiceError(
                "SCENELAYOUT_SERVICES_URL is not set; use --mock or configure the service endpoint"
            )
        return cls(url, api_key=os.environ.get("SCENELAYOUT_SERVICES_KEY"))

    def _post(self, path: str, payload: dict) -> dict:
        try:
            response = self._client.post(f"{self.base_url}{path}", json=payload)
            response.raise_for_status()
            return response.json()
        except httpx.HTTPError as exc:
            raise TransportError(f"{path}: {exc}") from exc

    def text(self, kind, prompt, *, system=None, image=None):
        payload = {"kind": kind, "prompt": prompt}
        if system:
            payload["system"] = system
        if image:
            payload["image_b64"] = base64.b64encode(image).decode()
        return self._post("/v1/text", payload)["text"]

    def image(self, kind, prompt, *, image=None):
        payload = {"kind": kind, "prompt": prompt}
        if image:
            payload["image_b64"] = base64.b64encode(image).decode()
        return base64.b64decode(self._post("/v1/image", payload)["image_b64"])

    def asset(self, kind, image, *, hint_size=None):
        payload = {"kind": kind, "image_b64": base64.b64encode(image).decode()}
        if hint_size:
            payload["hint_size"] = list(hint_size)
        return base64.b64decode(self._post("/v1/asset", payload)["asset_b64"])


# A valid 1x1 gray PNG; mock image responses append a prompt digest after
# IEND so different prompts yield distinct (still decodable) bytes.
_TINY_PNG = bytes.fromhex(
    "89504e470d0a1a0a0000000d4948445200000001000000010802000000907753de"
    "0000000c4944415408d763f8cfc000000301010018dd8db00000000049454e44ae426082"
)


class MockTransport:
    """Deterministic offline stand-in for the remote services.

    Text responses default to the built-in bedroom fixture (scene parse and
    constraint generation) and an empty prune list; ``overrides`` maps a kind
    to a fixed string or a ``callable(prompt) -> str`` for tests.  Assets are
    box meshes whose aspect follows the hint size with a small per-image
    jitter, mimicking an imperfect mesh that the rescale rule corrects.
    """

    def __init__(self, overrides: dict | None = None):
        self.overrides = dict(overrides or {})
        self.calls: list[tuple[str, str]] = []

    def _override(self, method: str, kind: str, prompt: str) -> str | None:
        key = kind if kind in self.overrides else f"{method}:{kind}"
        if key in self.overrides:
            value = self.overrides[key]
            return value(prompt) if callable(value) else value
        return None

    def text(self, kind, prompt, *, system=None, image=None):
        self.calls.append(("text", kind))
        hit = self._override("text", kind, prompt)
        if hit is not None:
            return hit
        if kind == "scene_parse":
            return BEDROOM_SCENE_JSON
        if kind == "prune":
            return json.dumps({"filenames": []})
        if kind in ("generate_constraints", "regenerate_constraints", "edit_constraints"):
            return BEDROOM_CONSTRAINTS_JSON
        raise TransportError(f"mock transport has no text response for kind '{kind}'")

    def image(self, kind, prompt, *, image=None):
        self.calls.append(("image", kind))
        hit = self._override("image", kind, prompt)
        if hit is not None:
            return hit if isinstance(hit, bytes) else hit.encode()
        digest = hashlib.sha256(f"{kind}|{prompt}".encode()).digest()[:8]
        return _TINY_PNG + digest

    def asset(self, kind, image, *, hint_size=None):
        self.calls.append(("asset", kind))
        digest = hashlib.sha256(image).digest()
        jitter = [0.98 + 0.04 * (b / 255.0) for b in digest[:3]]
        if hint_size and hint_size[2] > 0:
            base = [hint_size[0] / hint_size[2], hint_size[1] / hint_size[2], 1.0]
        else:
            base = [1.0, 1.0, 1.0]
        return glb.write_box_glb(
            base[0] * jitter[0], base[1] * jitter[1], base[2] * jitter[2], name="mock-asset"
        )


class RecordingTransport:
    """Wraps a live transport and appends every exchange to a JSONL file."""

    def __init__(self, inner: Transport, path):
        self.inner = inner
        self.path = Path(path)

    def _log(self, record: dict) -> None:
        with open(self.path, "a") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    @staticmethod
    def request_key(method: str, kind: str, payload: bytes) -> str:
        return hashlib.sha256(f"{method}|{kind}|".encode() + payload).hexdigest()

    def text(self, kind, prompt, *, system=None, image=None):
        result = self.inner.text(kind, prompt, system=system, image=image)
        self._log(
            {
                "key": self.request_key("text", kind, prompt.encode()),
                "method": "text",
                "kind": kind,
                "response": result,
            }
        )
        return result

    def image(self, kind, prompt, *, image=None):
        result = self.inner.image(kind, prompt, image=image)
        self._log(
            {
                "key": self.request_key("image", kind, prompt.encode()),
                "method": "image",
                "kind": kind,
                "response_b64": base64.b64encode(result).decode(),
            }
        )
        return result

    def asset(self, kind, image, *, hint_size=None):
        result = self.inner.asset(kind, image, hint_size=hint_size)
        self._log(
            {
                "key": self.request_key("asset", kind, image),
                "method": "asset",
                "kind": kind,
                "response_b64": base64.b64encode(result).decode(),
            }
        )
        return result


class ReplayTransport:
    """Replays a RecordingTransport log; unknown requests fail hard."""

    def __init__(self, path):
        self.records: dict[str, dict] = {}
        with open(path) as fh:
            for line in fh:
                record = json.loads(line)
                self.records[record["key"]] = record

    def _lookup(self, method: str, kind: str, payload: bytes) -> dict:
        key = RecordingTransport.request_key(method, kind, payload)
        if key not in self.records:
            raise TransportError(f"no recorded response for {method}/{kind}")
        return self.records[key]

    def text(self, kind, prompt, *, system=None, image=None):
        return self._lookup("text", kind, prompt.encode())["response"]

    def image(self, kind, prompt, *, image=None):
        return base64.b64decode(self._lookup("image", kind, prompt.encode())["response_b64"])

    def asset(self, kind, image, *, hint_size=None):
        return base64.b64decode(self._lookup("asset", kind, image)["response_b64"])


# ---------------------------------------------------------------------------
# Job ledger


JOB_PENDING = "pending"
JOB_RUNNING = "running"
JOB_DONE = "done"
JOB_FAILED = "failed"


@dataclass
class GenerationJob:
    kind: str
    inputs: dict
    output: str | None = None
    status: str = JOB_PENDING
    attempts: int = 0
    error: str | None = None

    @property
    def key(self) -> str:
        digest = hashlib.sha256(
            json.dumps({"kind": self.kind, "inputs": self.inputs}, sort_keys=True).encode()
        ).hexdigest()
        return f"{self.kind}:{digest[:16]}"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "inputs": self.inputs,
            "output": self.output,
            "status": self.status,
            "attempts": self.attempts,
            "error": self.error,
        }


class JobLedger:
    """Persistent job records keyed by (kind, inputs)."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self.jobs: dict[str, GenerationJob] = {}
        if self.path.exists():
            for key, raw in json.loads(self.path.read_text()).items():
                self.jobs[key] = GenerationJob(**raw)

    def save(self) -> None:
        with self._lock:
            payload = {key: job.to_dict() for key, job in self.jobs.items()}
            self.path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

    def get(self, job: GenerationJob) -> GenerationJob:
        with self._lock:
            return self.jobs.setdefault(job.key, job)

    def is_done(self, job: GenerationJob, base_dir: Path) -> bool:
        existing = self.jobs.get(job.key)
        return (
            existing is not None
            and existing.status == JOB_DONE
            and existing.output is not None
            and (base_dir / existing.output).exists()
        )


@dataclass
class ServiceConfig:
    max_inflight: int = 4
    retries: int = 3
    backoff: float = 0.1


class SceneServices:
    """Scene analysis and object generation stages over one transport."""

    def __init__(
        self,
        transport: Transport,
        out_dir,
        config: ServiceConfig = ServiceConfig(),
        ledger: JobLedger | None = None,
    ):
        self.transport = transport
        self.out_dir = Path(out_dir)
        self.config = config
        (self.out_dir / "images").mkdir(parents=True, exist_ok=True)
        (self.out_dir / "assets").mkdir(parents=True, exist_ok=True)
        self.ledger = ledger or JobLedger(self.out_dir / "ledger.json")

    # -- plumbing -----------------------------------------------------------

    def _with_retries(self, fn):
        last: Exception | None = None
        for attempt in range(self.config.retries):
            try:
                return fn()
            except TransportError as exc:
                last = exc
                logger.warning("transport error (attempt %d): %s", attempt + 1, exc)
                time.sleep(self.config.backoff * (2**attempt))
        raise ServiceError(f"transport failed after {self.config.retries} attempts: {last}")

    def _run_job(self, job: GenerationJob, produce) -> Path:
        """Run ``produce(path)`` unless the ledger already has this job done."""
        if self.ledger.is_done(job, self.out_dir):
            return self.out_dir / self.ledger.jobs[job.key].output
        record = self.ledger.get(job)
        record.status = JOB_RUNNING
        record.attempts += 1
        try:
            output = produce()
            record.output = str(Path(output).relative_to(self.out_dir))
            record.status = JOB_DONE
            record.error = None
            return Path(output)
        except Exception as exc:
            record.status = JOB_FAILED
            record.error = str(exc)
            raise
        finally:
            self.ledger.save()

    # -- operations ---------------------------------------------------------

    def generate_reference_image(self, description: str, style: str) -> Path:
        if not description:
            raise ValueError("scene description must be non-empty")
        job = GenerationJob("reference_image", {"description": description, "style": style})

        def produce():
            prompt = prompts.reference_image_prompt(description, style)
            data = self._with_retries(lambda: self.transport.image("reference_image", prompt))
            path = self.out_dir / "images" / "reference.png"
            path.write_bytes(data)
            return path

        return self._run_job(job, produce)

    def parse_scene_from_inputs(self, description: str, reference_image: Path) -> Scene:
        """Ask the scene-parse service for object properties; one corrective
        re-request on a schema violation, then a hard error."""
        ref_bytes = Path(reference_image).read_bytes()
        instruction = prompts.scene_parse_instruction()
        prompt = description
        raw = self._with_retries(
            lambda: self.transport.text("scene_parse", prompt, system=instruction, image=ref_bytes)
        )
        try:
            return parse_scene(raw)
        except SceneParseError as first_error:
            corrective = (
                f"{description}\n\nYour previous response was not valid: {first_error}. "
                "Return corrected JSON only."
            )
            raw2 = self._with_retries(
                lambda: self.transport.text(
                    "scene_parse", corrective, system=instruction, image=ref_bytes
                )
            )
            try:
                return parse_scene(raw2)
            except SceneParseError as second_error:
                raise ServiceError(
                    f"scene parse failed after corrective re-request: {second_error}", raw=raw2
                ) from second_error

    def generate_object_images(self, scene: Scene, reference_image: Path, style: str) -> dict[str, Path]:
        """One front-view image per item, generated in parallel.  Per-item
        failures are recorded in the ledger; the rest proceed."""
        ref_bytes = Path(reference_image).read_bytes()
        results: dict[str, Path] = {}

        def one(item: ObjectSpec) -> tuple[str, Path | None]:
            job = GenerationJob("object_image", {"id": item.id, "name": item.name, "style": style})
            try:
                def produce():
                    prompt = prompts.object_image_prompt(item.name, style)
                    data = self._with_retries(
                        lambda: self.transport.image("object_image", prompt, image=ref_bytes)
                    )
                    path = self.out_dir / "images" / f"{item.id}.png"
                    path.write_bytes(data)
                    return path

                return item.id, self._run_job(job, produce)
            except Exception as exc:
                logger.warning("object image for '%s' failed: %s", item.id, exc)
                return item.id, None

        with ThreadPoolExecutor(max_workers=self.config.max_inflight) as pool:
            for object_id, path in pool.map(one, scene.items):
                if path is not None:
                    results[object_id] = path
        return results

    def prune_redundant_images(self, filenames: list[str]) -> list[str]:
        """Filenames to delete as redundant sub-components; always a subset
        of the input."""
        if not filenames:
            raise ValueError("prune requires at least one filename")
        instruction = prompts.prune_instruction(filenames)
        raw = self._with_retries(
            lambda: self.transport.text("prune", instruction, system=prompts.PRUNE_SYSTEM_MESSAGE)
        )
        try:
            listed = prompts.ImageListModel.model_validate_json(raw).filenames
        except ValueError as exc:
            raise ServiceError(f"prune response did not match the schema: {exc}", raw=raw) from exc
        known = set(filenames)
        kept = []
        for name in listed:
            if name in known:
                kept.append(name)
            else:
                logger.warning("prune returned unknown filename '%s'; dropped", name)
        return kept

    def generate_background(self, reference_image: Path) -> Path:
        ref = Path(reference_image)
        if not ref.exists():
            raise ValueError(f"reference image {ref} does not exist")
        job = GenerationJob("background", {"reference": ref.name})

        def produce():
            data = self._with_retries(
                lambda: self.transport.image("background", prompts.BACKGROUND_PROMPT, image=ref.read_bytes())
            )
            path = self.out_dir / "images" / "background.png"
            path.write_bytes(data)
            return path

        return self._run_job(job, produce)

    def generate_asset(self, object_image: Path, spec: ObjectSpec) -> tuple[ObjectSpec, Path, AssetDims]:
        """Generate a GLB for one object, measure it, and apply the
        height-reference rescale.  Returns (updated spec, asset path,
        measured dims)."""
        image_path = Path(object_image)
        if not image_path.exists():
            raise ValueError(f"object image {image_path} does not exist")
        job = GenerationJob("asset3d", {"id": spec.id})

        def produce():
            data = self._with_retries(
                lambda: self.transport.asset(
                    "asset3d",
                    image_path.read_bytes(),
                    hint_size=(spec.size.x, spec.size.y, spec.size.z),
                )
            )
            path = self.out_dir / "assets" / f"{spec.id}.glb"
            path.write_bytes(data)
            return path

        path = self._run_job(job, produce)
        measured = AssetDims(*glb.measure_extents(path))
        updated = replace(
            rescale_spec_dims(spec, measured),
            asset_ref=str(path.relative_to(self.out_dir)),
        )
        return updated, path, measured

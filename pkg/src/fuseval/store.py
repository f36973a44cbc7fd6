"""Durable, append-oriented experiment storage.

A store root is a plain directory:

    <root>/manifest.jsonl        one JSON record per line, append-only
    <root>/objects/<xx>/<digest> immutable content-addressed blobs

Manifest entries reference blobs by sha256 digest. Replaying the manifest
rebuilds the full index; a torn final line (crash mid-append) is discarded.
Experiment updates append superseding entries, last-wins per experiment_id.
Appends are serialized through an advisory file lock; blob writes go
write-temp-then-rename so readers never observe partial objects.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyDataset, NotFound, StoreCorrupt
from .trec_io import (
    Qrels,
    Run,
    canonical_sort,
    format_score,
    parse_qrels,
    parse_run,
    write_run,
)

STORE_ENV_VAR = "FUSEVAL_STORE"

try:
    import fcntl
except ImportError:  # pragma: no cover - non-POSIX fallback
    fcntl = None


def default_store_root() -> Path:
    return Path(os.environ.get(STORE_ENV_VAR, "./fuseval-store"))


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _round_scores(run: Run) -> Run:
    """The run as it reads back after serialization: scores at 6 significant
    digits, lists re-sorted where rounding introduced new ties."""
    rounded: dict[float, float] = {}  # scores repeat heavily; round once each
    changed = False
    for entries in run.lists.values():
        for _doc, score in entries:
            if score not in rounded:
                value = rounded[score] = float(format_score(score))
                if value != score:
                    changed = True
    if not changed:
        return run  # already a serialization fixed point
    lists: dict[str, list[tuple[str, float]]] = {}
    for topic_id, entries in run.lists.items():
        out = [(d, rounded[s]) for d, s in entries]
        # re-sort only where rounding moved a score
        lists[topic_id] = out if out == entries else canonical_sort(out)
    return Run(run_tag=run.run_tag, lists=lists)


@dataclass
class DatasetRecord:
    dataset_id: str
    name: str
    run_refs: dict[str, str]  # run_tag -> blob digest
    qrels_ref: str
    topic_ids: list[str]
    provenance: str = ""
    coverage_warnings: list[str] = field(default_factory=list)
    created: float = 0.0

    def as_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "name": self.name,
            "run_refs": self.run_refs,
            "qrels_ref": self.qrels_ref,
            "topic_ids": self.topic_ids,
            "provenance": self.provenance,
            "coverage_warnings": self.coverage_warnings,
            "created": self.created,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetRecord":
        return cls(**d)


class Store:
    """Filesystem-backed append-only store for datasets, experiments and blobs."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.objects = self.root / "objects"
        self.manifest_path = self.root / "manifest.jsonl"
        self.root.mkdir(parents=True, exist_ok=True)
        self.objects.mkdir(exist_ok=True)
        if not self.manifest_path.exists():
            self.manifest_path.touch()
        # parsed-run cache keyed by blob digest; blobs are immutable, so
        # entries never go stale. Cached Run objects are shared: read-only.
        self._parsed_runs: dict[str, Run] = {}

    # --- blobs ---

    def put_blob(self, data: bytes | str) -> str:
        if isinstance(data, str):
            data = data.encode("utf-8")
        digest = _digest(data)
        path = self.objects / digest[:2] / digest
        if path.exists():
            return digest
        path.parent.mkdir(exist_ok=True)
        tmp = path.parent / f".tmp-{uuid.uuid4().hex}"
        tmp.write_bytes(data)
        os.replace(tmp, path)
        return digest

    def get_blob(self, digest: str) -> bytes:
        path = self.objects / digest[:2] / digest
        if not path.exists():
            raise NotFound(f"blob {digest}")
        data = path.read_bytes()
        if _digest(data) != digest:
            raise StoreCorrupt(f"blob {digest} fails verification")
        return data

    def get_text(self, digest: str) -> str:
        return self.get_blob(digest).decode("utf-8")

    # --- manifest ---

    def _append(self, record: dict) -> None:
        line = json.dumps(record, sort_keys=True) + "\n"
        lock_path = self.root / ".lock"
        with open(lock_path, "w") as lock:
            if fcntl is not None:
                fcntl.flock(lock, fcntl.LOCK_EX)
            with open(self.manifest_path, "r+b") as f:
                # drop a torn (unterminated) final line from a crashed append
                data = f.read()
                if data and not data.endswith(b"\n"):
                    f.seek(data.rfind(b"\n") + 1)
                    f.truncate()
                f.seek(0, os.SEEK_END)
                f.write(line.encode("utf-8"))
                f.flush()
                os.fsync(f.fileno())

    def _replay(self) -> list[dict]:
        with open(self.manifest_path, "rb") as f:
            chunks = [c for c in f.read().split(b"\n") if c.strip()]
        records = []
        for i, raw in enumerate(chunks):
            try:
                records.append(json.loads(raw))
            except json.JSONDecodeError:
                if i == len(chunks) - 1:
                    break  # torn final line from a crashed append
                raise StoreCorrupt("undecodable manifest entry before final line")
        return records

    # --- datasets ---

    def ingest_dataset(
        self,
        name: str,
        run_texts: list[str],
        qrels_text: str,
        provenance: str = "",
        max_per_topic: int | None = 10_000,
    ) -> DatasetRecord:
        """Parse, blob and register a dataset of runs plus one qrels file."""
        if not run_texts:
            raise EmptyDataset("a dataset needs at least one run")
        runs = [parse_run(t, max_per_topic=max_per_topic) for t in run_texts]
        qrels = parse_qrels(qrels_text)
        qrels_topics = set(qrels.judgments)
        warnings = []
        refs: dict[str, str] = {}
        for run, text in zip(runs, run_texts):
            # store the canonical serialization so identical content dedups;
            # rounding scores first makes the stored bytes a parse/write
            # fixed point, and the rounded run doubles as the cache entry
            canonical = _round_scores(run)
            ref = self.put_blob(write_run(canonical))
            refs[run.run_tag] = ref
            self._parsed_runs[ref] = canonical
            overlap = set(run.lists) & qrels_topics
            if not overlap:
                warnings.append(f"run {run.run_tag!r} shares no topics with the qrels")
            elif len(overlap) < len(qrels_topics):
                missing = len(qrels_topics) - len(overlap)
                warnings.append(f"run {run.run_tag!r} missing {missing} qrels topics")
        qrels_ref = self.put_blob(qrels_text)
        record = DatasetRecord(
            dataset_id="",
            name=name,
            run_refs=refs,
            qrels_ref=qrels_ref,
            topic_ids=sorted(qrels_topics),
            provenance=provenance,
            coverage_warnings=warnings,
            created=time.time(),
        )
        body = json.dumps(record.as_dict(), sort_keys=True)
        record.dataset_id = _digest((body + uuid.uuid4().hex).encode())[:16]
        self._append({"type": "dataset", "record": record.as_dict()})
        return record

    def get_dataset(self, dataset_id: str) -> DatasetRecord:
        for rec in reversed(self._replay()):
            if rec.get("type") == "dataset" and rec["record"]["dataset_id"] == dataset_id:
                return DatasetRecord.from_dict(rec["record"])
        raise NotFound(f"dataset {dataset_id}")

    def list_datasets(self) -> list[DatasetRecord]:
        seen = set()
        out = []
        for rec in reversed(self._replay()):
            if rec.get("type") != "dataset":
                continue
            did = rec["record"]["dataset_id"]
            if did in seen:
                continue
            seen.add(did)
            out.append(DatasetRecord.from_dict(rec["record"]))
        return out

    def load_run(self, digest: str) -> Run:
        """Parse a stored run blob, memoized per digest; treat the result as read-only."""
        run = self._parsed_runs.get(digest)
        if run is None:
            run = parse_run(self.get_text(digest), max_per_topic=None)
            self._parsed_runs[digest] = run
        return run

    def load_dataset_runs(self, record: DatasetRecord) -> list[Run]:
        return [self.load_run(ref) for _tag, ref in sorted(record.run_refs.items())]

    def load_dataset_qrels(self, record: DatasetRecord) -> Qrels:
        return parse_qrels(self.get_text(record.qrels_ref))

    # --- experiments ---

    def put_experiment(self, record: dict) -> None:
        """Append an experiment record (a JSON-serializable dict with experiment_id)."""
        if "experiment_id" not in record:
            raise ValueError("experiment record needs an experiment_id")
        self._append({"type": "experiment", "record": record})

    def get_experiment(self, experiment_id: str) -> dict:
        for rec in reversed(self._replay()):
            if rec.get("type") == "experiment" and rec["record"]["experiment_id"] == experiment_id:
                return rec["record"]
        raise NotFound(f"experiment {experiment_id}")

    def list_experiments(self) -> list[dict]:
        """Latest version of each experiment, newest first."""
        seen = set()
        out = []
        for rec in reversed(self._replay()):
            if rec.get("type") != "experiment":
                continue
            eid = rec["record"]["experiment_id"]
            if eid in seen:
                continue
            seen.add(eid)
            out.append(rec["record"])
        return out

    def fresh_experiment_id(self, definition: dict) -> str:
        body = json.dumps(definition, sort_keys=True)
        existing = {r["experiment_id"] for r in self.list_experiments()}
        while True:
            eid = _digest((body + uuid.uuid4().hex).encode())[:16]
            if eid not in existing:
                return eid

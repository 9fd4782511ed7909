"""Single-file transactional persistence for the orchestrator.

Backed by sqlite in WAL mode: embedded, write-ahead, atomic commits. A
coarse lock serializes writes through one connection; status changes go
through compare-and-set UPDATEs so racing transitions have exactly one
winner. On open, any job left SCHEDULED or RUNNING by a dead process is
failed (never silently completed).
"""

from __future__ import annotations

import json
import sqlite3
import threading
from pathlib import Path

from pathharbor.jobs.state import Job, JobStatus
from pathharbor.jobs.tokens import ScopeToken

_SCHEMA = """
CREATE TABLE IF NOT EXISTS apps (
    app_id TEXT PRIMARY KEY,
    namespace TEXT UNIQUE NOT NULL,
    ead_json TEXT NOT NULL,
    executor_json TEXT NOT NULL,
    position INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS jobs (
    job_id TEXT PRIMARY KEY,
    app_id TEXT NOT NULL,
    namespace TEXT NOT NULL,
    mode TEXT NOT NULL,
    status TEXT NOT NULL,
    inputs_json TEXT NOT NULL,
    outputs_json TEXT NOT NULL,
    token_id TEXT NOT NULL,
    created_at REAL NOT NULL,
    started_at REAL,
    ended_at REAL,
    failure_message TEXT,
    origin TEXT
);
CREATE TABLE IF NOT EXISTS tokens (
    token_id TEXT PRIMARY KEY,
    secret_hash TEXT UNIQUE NOT NULL,
    job_id TEXT,
    allowed_slides_json TEXT NOT NULL,
    allowed_outputs_json TEXT NOT NULL,
    issued_at REAL NOT NULL,
    expiry_seconds REAL NOT NULL,
    revoked INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE IF NOT EXISTS entities (
    entity_id TEXT PRIMARY KEY,
    kind TEXT NOT NULL,
    doc_json TEXT NOT NULL,
    job_id TEXT,
    root_id TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS output_posts (
    job_id TEXT NOT NULL,
    key TEXT NOT NULL,
    content_hash TEXT NOT NULL,
    entity_id TEXT NOT NULL,
    PRIMARY KEY (job_id, key, content_hash)
);
CREATE TABLE IF NOT EXISTS preprocessing_runs (
    slide_id TEXT NOT NULL,
    app_id TEXT NOT NULL,
    job_id TEXT NOT NULL,
    PRIMARY KEY (slide_id, app_id)
);
"""


class JobStore:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(
            self.path, check_same_thread=False, isolation_level=None
        )
        self._conn.execute("PRAGMA journal_mode=WAL")
        self._conn.execute("PRAGMA synchronous=NORMAL")
        with self._lock:
            self._conn.executescript(_SCHEMA)

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    # -- recovery ------------------------------------------------------------

    def recover_orphans(self, message: str, now: float) -> list[str]:
        """Fail jobs a dead orchestrator left mid-flight. Returns their ids."""
        with self._lock:
            rows = self._conn.execute(
                "SELECT job_id FROM jobs WHERE status IN (?, ?)",
                (JobStatus.SCHEDULED.value, JobStatus.RUNNING.value),
            ).fetchall()
            ids = [r[0] for r in rows]
            self._conn.execute(
                "UPDATE jobs SET status = ?, failure_message = ?, ended_at = ? "
                "WHERE status IN (?, ?)",
                (
                    JobStatus.FAILED.value,
                    message,
                    now,
                    JobStatus.SCHEDULED.value,
                    JobStatus.RUNNING.value,
                ),
            )
        return ids

    # -- apps ----------------------------------------------------------------

    def insert_app(self, app_id: str, namespace: str, ead_doc: dict, executor_doc: dict) -> bool:
        """False when the namespace is already taken."""
        with self._lock:
            position = self._conn.execute("SELECT COUNT(*) FROM apps").fetchone()[0]
            try:
                self._conn.execute(
                    "INSERT INTO apps VALUES (?, ?, ?, ?, ?)",
                    (app_id, namespace, json.dumps(ead_doc), json.dumps(executor_doc), position),
                )
            except sqlite3.IntegrityError:
                return False
        return True

    def get_app(self, app_id: str) -> tuple[str, dict, dict] | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT namespace, ead_json, executor_json FROM apps WHERE app_id = ?",
                (app_id,),
            ).fetchone()
        if row is None:
            return None
        return row[0], json.loads(row[1]), json.loads(row[2])

    def find_app_by_namespace(self, namespace: str) -> str | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT app_id FROM apps WHERE namespace = ?", (namespace,)
            ).fetchone()
        return row[0] if row else None

    def list_apps(self) -> list[tuple[str, str, dict, dict]]:
        """(app_id, namespace, ead_doc, executor_doc) in registration order."""
        with self._lock:
            rows = self._conn.execute(
                "SELECT app_id, namespace, ead_json, executor_json FROM apps ORDER BY position"
            ).fetchall()
        return [(r[0], r[1], json.loads(r[2]), json.loads(r[3])) for r in rows]

    # -- jobs ----------------------------------------------------------------

    def insert_job(self, job: Job) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO jobs VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                (
                    job.job_id,
                    job.app_id,
                    job.namespace,
                    job.mode,
                    job.status.value,
                    json.dumps(job.inputs),
                    json.dumps(job.outputs),
                    job.token_id,
                    job.created_at,
                    job.started_at,
                    job.ended_at,
                    job.failure_message,
                    job.origin,
                ),
            )

    def get_job(self, job_id: str) -> Job | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM jobs WHERE job_id = ?", (job_id,)
            ).fetchone()
        if row is None:
            return None
        return Job(
            job_id=row[0],
            app_id=row[1],
            namespace=row[2],
            mode=row[3],
            status=JobStatus(row[4]),
            inputs=json.loads(row[5]),
            outputs=json.loads(row[6]),
            token_id=row[7],
            created_at=row[8],
            started_at=row[9],
            ended_at=row[10],
            failure_message=row[11],
            origin=row[12],
        )

    def list_jobs(self) -> list[Job]:
        with self._lock:
            ids = [
                r[0]
                for r in self._conn.execute(
                    "SELECT job_id FROM jobs ORDER BY created_at"
                ).fetchall()
            ]
        return [self.get_job(i) for i in ids]

    def cas_status(
        self,
        job_id: str,
        expected: JobStatus,
        new: JobStatus,
        *,
        started_at: float | None = None,
        ended_at: float | None = None,
        failure_message: str | None = None,
    ) -> bool:
        """Atomic compare-and-set; True when this caller won the transition."""
        sets = ["status = ?"]
        args: list = [new.value]
        if started_at is not None:
            sets.append("started_at = ?")
            args.append(started_at)
        if ended_at is not None:
            sets.append("ended_at = ?")
            args.append(ended_at)
        if failure_message is not None:
            sets.append("failure_message = ?")
            args.append(failure_message)
        args += [job_id, expected.value]
        with self._lock:
            cursor = self._conn.execute(
                f"UPDATE jobs SET {', '.join(sets)} WHERE job_id = ? AND status = ?",
                args,
            )
            return cursor.rowcount == 1

    def update_bindings(self, job_id: str, expected: JobStatus, inputs: dict[str, str],
                        new_status: JobStatus | None = None) -> bool:
        """Write input bindings (optionally flipping ASSEMBLY->READY) atomically."""
        target = (new_status or expected).value
        with self._lock:
            cursor = self._conn.execute(
                "UPDATE jobs SET inputs_json = ?, status = ? WHERE job_id = ? AND status = ?",
                (json.dumps(inputs), target, job_id, expected.value),
            )
            return cursor.rowcount == 1

    def update_outputs(self, job_id: str, outputs: dict[str, str]) -> None:
        with self._lock:
            self._conn.execute(
                "UPDATE jobs SET outputs_json = ? WHERE job_id = ?",
                (json.dumps(outputs), job_id),
            )

    # -- tokens ----------------------------------------------------------------

    def insert_token(self, token: ScopeToken) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO tokens VALUES (?, ?, ?, ?, ?, ?, ?, ?)",
                (
                    token.token_id,
                    token.secret_hash,
                    token.job_id,
                    json.dumps(sorted(token.allowed_slide_ids)),
                    json.dumps(sorted(token.allowed_output_keys)),
                    token.issued_at,
                    token.expiry_seconds,
                    int(token.revoked),
                ),
            )

    def _token_from_row(self, row) -> ScopeToken:
        return ScopeToken(
            token_id=row[0],
            secret_hash=row[1],
            job_id=row[2],
            allowed_slide_ids=set(json.loads(row[3])),
            allowed_output_keys=set(json.loads(row[4])),
            issued_at=row[5],
            expiry_seconds=row[6],
            revoked=bool(row[7]),
        )

    def find_token_by_hash(self, secret_hash: str) -> ScopeToken | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM tokens WHERE secret_hash = ?", (secret_hash,)
            ).fetchone()
        return self._token_from_row(row) if row else None

    def get_token(self, token_id: str) -> ScopeToken | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM tokens WHERE token_id = ?", (token_id,)
            ).fetchone()
        return self._token_from_row(row) if row else None

    def update_token_slides(self, token_id: str, slide_ids: set[str]) -> None:
        with self._lock:
            self._conn.execute(
                "UPDATE tokens SET allowed_slides_json = ? WHERE token_id = ?",
                (json.dumps(sorted(slide_ids)), token_id),
            )

    def revoke_token(self, token_id: str) -> None:
        with self._lock:
            self._conn.execute(
                "UPDATE tokens SET revoked = 1 WHERE token_id = ?", (token_id,)
            )

    # -- entities ----------------------------------------------------------------

    def insert_entity_tree(self, docs: list[tuple[str, str, dict, str]], job_id: str | None) -> None:
        """(entity_id, kind, doc, root_id) rows staged in one transaction so
        readers never see a partially indexed collection."""
        with self._lock:
            self._conn.execute("BEGIN IMMEDIATE")
            try:
                for entity_id, kind, doc, root_id in docs:
                    self._conn.execute(
                        "INSERT OR REPLACE INTO entities VALUES (?, ?, ?, ?, ?)",
                        (entity_id, kind, json.dumps(doc), job_id, root_id),
                    )
                self._conn.execute("COMMIT")
            except BaseException:
                self._conn.execute("ROLLBACK")
                raise

    def get_entity_doc(self, entity_id: str) -> dict | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT doc_json FROM entities WHERE entity_id = ?", (entity_id,)
            ).fetchone()
        return json.loads(row[0]) if row else None

    # -- idempotent output posts ---------------------------------------------

    def record_post(self, job_id: str, key: str, content_hash: str, entity_id: str) -> str:
        """Returns the entity id already recorded for this exact body, or the
        new one after recording it."""
        with self._lock:
            row = self._conn.execute(
                "SELECT entity_id FROM output_posts WHERE job_id = ? AND key = ? AND content_hash = ?",
                (job_id, key, content_hash),
            ).fetchone()
            if row:
                return row[0]
            self._conn.execute(
                "INSERT INTO output_posts VALUES (?, ?, ?, ?)",
                (job_id, key, content_hash, entity_id),
            )
            return entity_id

    # -- preprocessing dedup ----------------------------------------------------

    def record_preprocessing(self, slide_id: str, app_id: str, job_id: str) -> str | None:
        """Returns an existing job id when this (slide, app) already ran."""
        with self._lock:
            row = self._conn.execute(
                "SELECT job_id FROM preprocessing_runs WHERE slide_id = ? AND app_id = ?",
                (slide_id, app_id),
            ).fetchone()
            if row:
                return row[0]
            self._conn.execute(
                "INSERT INTO preprocessing_runs VALUES (?, ?, ?)",
                (slide_id, app_id, job_id),
            )
            return None

    def preprocessing_jobs_for(self, slide_id: str) -> list[str]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT p.job_id FROM preprocessing_runs p JOIN apps a ON a.app_id = p.app_id "
                "WHERE p.slide_id = ? ORDER BY a.position",
                (slide_id,),
            ).fetchall()
        return [r[0] for r in rows]

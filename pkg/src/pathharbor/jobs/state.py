"""Job records and the lifecycle state machine.

The only legal edges are

    ASSEMBLY -> READY -> SCHEDULED -> RUNNING -> {COMPLETED, FAILED, TIMEOUT}

Terminal states absorb everything. Transitions happen through atomic
compare-and-set on (job_id, expected_status); a losing racer gets
WRONG_STATE and the job is untouched.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class JobStatus(str, enum.Enum):
    ASSEMBLY = "ASSEMBLY"
    READY = "READY"
    SCHEDULED = "SCHEDULED"
    RUNNING = "RUNNING"
    COMPLETED = "COMPLETED"
    FAILED = "FAILED"
    TIMEOUT = "TIMEOUT"


TERMINAL_STATES = frozenset({JobStatus.COMPLETED, JobStatus.FAILED, JobStatus.TIMEOUT})

ALLOWED_EDGES = frozenset(
    {
        (JobStatus.ASSEMBLY, JobStatus.READY),
        (JobStatus.READY, JobStatus.SCHEDULED),
        (JobStatus.SCHEDULED, JobStatus.RUNNING),
        (JobStatus.RUNNING, JobStatus.COMPLETED),
        (JobStatus.RUNNING, JobStatus.FAILED),
        (JobStatus.RUNNING, JobStatus.TIMEOUT),
    }
)


@dataclass
class Job:
    job_id: str
    app_id: str
    namespace: str
    mode: str
    status: JobStatus
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    token_id: str = ""
    created_at: float = 0.0
    started_at: float | None = None
    ended_at: float | None = None
    failure_message: str | None = None
    origin: str | None = None

    def to_doc(self) -> dict:
        return {
            "job_id": self.job_id,
            "app_id": self.app_id,
            "namespace": self.namespace,
            "mode": self.mode,
            "status": self.status.value,
            "inputs": dict(self.inputs),
            "outputs": dict(self.outputs),
            "token_id": self.token_id,
            "created_at": self.created_at,
            "started_at": self.started_at,
            "ended_at": self.ended_at,
            "failure_message": self.failure_message,
            "origin": self.origin,
        }

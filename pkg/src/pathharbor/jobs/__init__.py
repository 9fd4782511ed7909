"""Job orchestration: app registry, job lifecycle, scoped tokens, executors."""

from pathharbor.jobs.state import Job, JobStatus
from pathharbor.jobs.executors import ExecutorSpec
from pathharbor.jobs.service import Orchestrator

__all__ = ["Job", "JobStatus", "ExecutorSpec", "Orchestrator"]

"""Executor adapters and the bounded worker pool.

Apps are launched under a uniform environment contract:

    PH_JOB_ID     the job being executed
    PH_TOKEN      the job's scope token secret (only transport for secrets)
    PH_APP_API    base URL of the app-facing API
    PH_SLIDE_API  base URL of the slide service

Adapters:
    process    plain OS process (default; what the fixtures use)
    container  container-runtime shim building a run command from the same
               template contract (no daemon required to construct it)
    inline     registered Python callable run on the worker thread with a
               local client (hermetic tests, no sockets)
    manual     platform moves the job to RUNNING and an external actor
               drives the app API (state-machine tests)

The pool admits at most ``max_workers`` concurrently RUNNING jobs; jobs wait
in SCHEDULED while the pool is saturated. A wall-clock timeout per job moves
RUNNING to TIMEOUT and kills the executor.
"""

from __future__ import annotations

import os
import subprocess
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

DEFAULT_TIMEOUT_SECONDS = 600.0

ADAPTERS = ("process", "container", "inline", "manual")

# Inline fixture callables register here by name: fn(client) -> None
INLINE_REGISTRY: dict[str, Callable] = {}


def register_inline(name: str, fn: Callable) -> None:
    INLINE_REGISTRY[name] = fn


@dataclass
class ExecutorSpec:
    adapter: str = "process"
    command: list[str] = field(default_factory=list)
    container_image: str = ""
    container_runtime: str = "docker"
    timeout_seconds: float = DEFAULT_TIMEOUT_SECONDS
    inline_name: str = ""
    extra_env: dict[str, str] = field(default_factory=dict)

    def validate(self) -> str | None:
        if self.adapter not in ADAPTERS:
            return f"unknown adapter {self.adapter!r}"
        if self.adapter == "process" and not self.command:
            return "process adapter needs a command"
        if self.adapter == "container" and not self.container_image:
            return "container adapter needs an image"
        if self.adapter == "inline" and not self.inline_name:
            return "inline adapter needs a registered callable name"
        if self.timeout_seconds <= 0:
            return "timeout must be positive"
        return None

    def to_doc(self) -> dict:
        return {
            "adapter": self.adapter,
            "command": list(self.command),
            "container_image": self.container_image,
            "container_runtime": self.container_runtime,
            "timeout_seconds": self.timeout_seconds,
            "inline_name": self.inline_name,
            "extra_env": dict(self.extra_env),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "ExecutorSpec":
        return cls(
            adapter=doc.get("adapter", "process"),
            command=list(doc.get("command") or []),
            container_image=doc.get("container_image", ""),
            container_runtime=doc.get("container_runtime", "docker"),
            timeout_seconds=float(doc.get("timeout_seconds", DEFAULT_TIMEOUT_SECONDS)),
            inline_name=doc.get("inline_name", ""),
            extra_env=dict(doc.get("extra_env") or {}),
        )


def container_command(spec: ExecutorSpec, env_keys: list[str]) -> list[str]:
    """The run command the container shim would execute; env values flow via
    ``-e KEY`` passthrough so secrets never appear in the command line."""
    cmd = [spec.container_runtime, "run", "--rm"]
    for key in env_keys:
        cmd += ["-e", key]
    cmd.append(spec.container_image)
    cmd += spec.command
    return cmd


class LaunchFailure(Exception):
    pass


class RunningExecutor:
    """Supervision handle for one launched app."""

    def __init__(self, kind: str, process: subprocess.Popen | None = None, thread: threading.Thread | None = None):
        self.kind = kind
        self.process = process
        self.thread = thread
        self._killed = threading.Event()

    def wait(self, timeout: float) -> bool:
        """True if the executor finished within ``timeout`` seconds."""
        if self.process is not None:
            try:
                self.process.wait(timeout=timeout)
                return True
            except subprocess.TimeoutExpired:
                return False
        if self.thread is not None:
            self.thread.join(timeout=timeout)
            return not self.thread.is_alive()
        return True  # manual: nothing to supervise

    def kill(self) -> None:
        self._killed.set()
        if self.process is not None and self.process.poll() is None:
            self.process.kill()
            try:
                self.process.wait(timeout=5)
            except subprocess.TimeoutExpired:
                pass


def launch(spec: ExecutorSpec, env: dict[str, str], local_client_factory=None) -> RunningExecutor:
    """Start the app per its adapter; raises LaunchFailure when it cannot start."""
    full_env = {**os.environ, **spec.extra_env, **env}
    if spec.adapter == "manual":
        return RunningExecutor("manual")
    if spec.adapter == "inline":
        fn = INLINE_REGISTRY.get(spec.inline_name)
        if fn is None:
            raise LaunchFailure(f"inline callable {spec.inline_name!r} not registered")
        if local_client_factory is None:
            raise LaunchFailure("inline adapter needs a local client factory")
        client = local_client_factory(env)

        thread = threading.Thread(target=fn, args=(client,), daemon=True)
        thread.start()
        return RunningExecutor("inline", thread=thread)

    command = spec.command
    if spec.adapter == "container":
        command = container_command(spec, sorted(env))
    try:
        process = subprocess.Popen(
            command,
            env=full_env,
            stdout=subprocess.DEVNULL,
            stderr=subprocess.DEVNULL,
        )
    except OSError as exc:
        raise LaunchFailure(str(exc)) from exc
    return RunningExecutor(spec.adapter, process=process)


class WorkerPool:
    """Bounded pool running job executions; SCHEDULED jobs queue here."""

    def __init__(self, max_workers: int = 2):
        self._pool = ThreadPoolExecutor(max_workers=max_workers, thread_name_prefix="ph-worker")

    def submit(self, fn, *args) -> None:
        self._pool.submit(fn, *args)

    def shutdown(self) -> None:
        self._pool.shutdown(wait=False, cancel_futures=True)

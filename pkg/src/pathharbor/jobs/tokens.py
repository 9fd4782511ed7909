"""Scoped bearer tokens.

A token is minted per job (or per viewer session), its secret returned
exactly once; only a salted hash is kept. A token authorizes exactly the
slides reachable from its job's bound inputs plus the job's own data
endpoints. Deny is the default for everything else.
"""

from __future__ import annotations

import hashlib
import secrets
import time
from dataclasses import dataclass, field
from typing import Callable

DEFAULT_EXPIRY_SECONDS = 24 * 3600.0

Clock = Callable[[], float]


def hash_secret(secret: str) -> str:
    return hashlib.sha256(secret.encode("ascii")).hexdigest()


def mint_secret() -> str:
    return secrets.token_hex(16)  # 128 bits


@dataclass
class ScopeToken:
    token_id: str
    secret_hash: str
    job_id: str | None  # None marks a viewer scope
    allowed_slide_ids: set[str] = field(default_factory=set)
    allowed_output_keys: set[str] = field(default_factory=set)
    issued_at: float = field(default_factory=time.time)
    expiry_seconds: float = DEFAULT_EXPIRY_SECONDS
    revoked: bool = False

    def expired(self, now: float) -> bool:
        return now >= self.issued_at + self.expiry_seconds

    def live(self, now: float) -> bool:
        return not self.revoked and not self.expired(now)

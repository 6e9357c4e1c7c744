import typing
from typing import List, Optional

from pydantic import BaseModel


class RowError(BaseModel):
    line: int
    reason: str


class CommandResult(BaseModel):
    status_code: int
    content: Optional[typing.Any] = None
    message: Optional[str] = None
    debug: Optional[str] = None


class ArtifactDigest(BaseModel):
    path: str
    sha256: str


class ManifestEntry(BaseModel):
    command: str
    config_hash: str
    seed: int
    inputs: List[ArtifactDigest] = []
    outputs: List[str] = []

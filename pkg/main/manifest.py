"""
Run manifest: everything needed to reproduce an `analyze` run and check its
outputs, written as `key = value` lines and optionally stored in the run
registry.
"""

import hashlib
import logging
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Union

from django.db import transaction

from lifescope import config
from main.spectral import AnalysisConfig

logger = logging.getLogger("lifescope.cli")


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def config_echo(cfg: AnalysisConfig) -> dict:
    """AnalysisConfig as plain values; tuples become lists."""
    return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(cfg).items()}


def parse_manifest(text: str) -> dict:
    """`key = value` lines back into a dict of strings, in file order."""
    entries = {}
    for line in text.splitlines():
        key, sep, value = line.partition(" = ")
        if sep:
            entries[key] = value
    return entries


def replay_argv(entries: dict) -> list:
    """analyze arguments that repeat a run from its `flag.*` lines."""
    argv = []
    for key, value in entries.items():
        if not key.startswith("flag."):
            continue
        name = key[len("flag."):]
        if value == "True":
            argv.append(f"--{name}")
        elif value != "False":
            argv.append(f"--{name}={value}")
    return argv


@dataclass
class RunManifest:
    pattern_path: str
    pattern_sha256: str
    cfg: AnalysisConfig
    flags: dict = field(default_factory=dict)         # analyze flags as given, defaults resolved
    engine_version: str = config.ENGINE_VERSION
    stage_seconds: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)       # (name, path, sha256)
    class_counts: dict = field(default_factory=dict)
    changed_cells: int = 0
    boundary_contacts: int = 0

    @contextmanager
    def stage(self, name: str):
        started = time.perf_counter()
        try:
            yield
        finally:
            self.stage_seconds[name] = round(time.perf_counter() - started, 6)
            logger.info("stage %s took %.3fs", name, self.stage_seconds[name])

    def add_output(self, name: str, path: Union[str, Path]) -> None:
        self.outputs.append((name, str(path), sha256_file(path)))

    def to_text(self) -> str:
        lines = [
            f"pattern = {self.pattern_path}",
            f"pattern_sha256 = {self.pattern_sha256}",
            f"engine_version = {self.engine_version}",
        ]
        for key, value in config_echo(self.cfg).items():
            if isinstance(value, list):
                value = ",".join(str(v) for v in value)
            elif value is None:
                value = ""
            lines.append(f"config.{key} = {value}")
        for name, value in self.flags.items():
            if isinstance(value, (list, tuple)):
                value = ",".join(str(v) for v in value)
            lines.append(f"flag.{name} = {value}")
        lines.append(f"changed_cells = {self.changed_cells}")
        lines.append(f"boundary_contacts = {self.boundary_contacts}")
        for cls, count in self.class_counts.items():
            lines.append(f"count.{cls} = {count}")
        for stage, seconds in self.stage_seconds.items():
            lines.append(f"time.{stage} = {seconds:.6f}")
        for name, path, digest in self.outputs:
            lines.append(f"output.{name} = {path} sha256:{digest}")
        return "\n".join(lines) + "\n"

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(self.to_text(), encoding="utf-8")
        return path

    @transaction.atomic
    def record(self):
        """Store the manifest in the run registry; returns the AnalysisRun row."""
        from main.models import AnalysisRun, RunOutput

        run = AnalysisRun.objects.create(
            pattern_path=self.pattern_path,
            pattern_sha256=self.pattern_sha256,
            engine_version=self.engine_version,
            mode=self.cfg.mode,
            window=self.cfg.T,
            config=config_echo(self.cfg),
            stage_seconds=dict(self.stage_seconds),
            class_counts=dict(self.class_counts),
            changed_cells=self.changed_cells,
            boundary_contacts=self.boundary_contacts,
        )
        RunOutput.objects.bulk_create(
            RunOutput(run=run, name=name, path=path, sha256=digest)
            for name, path, digest in self.outputs
        )
        logger.info("recorded run %d with %d outputs", run.pk, len(self.outputs))
        return run

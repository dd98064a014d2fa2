"""On-disk ground-state cache, one text file per solve.

File layout: ``# key = value`` header lines (parameters, energy, parity,
residual, solver tag, sha256 of the amplitude block) followed by the
amplitudes, one per line, with 17 significant digits so every double
round-trips exactly.
"""

from __future__ import annotations

import hashlib
import logging
import os
import tempfile
import threading
from pathlib import Path

import numpy as np

from .symmetric import SOLVER_VERSION, DickeVector, GroundState, ModelParams, ground_state

log = logging.getLogger(__name__)

CACHE_ENV = "LMG_GMC_CACHE_DIR"


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def cache_filename(params: ModelParams) -> str:
    return (f"lmg_N{params.n_spins}_g{params.gamma:.12f}_h{params.field:.12f}"
            f"_l{params.coupling:.12f}_{SOLVER_VERSION}.txt")


def _amplitude_block(amps: np.ndarray) -> str:
    return "".join(fmt(a) + "\n" for a in amps)


def serialize(gs: GroundState) -> str:
    body = _amplitude_block(gs.vector.amplitudes)
    p = gs.params
    header = [
        ("solver", SOLVER_VERSION),
        ("n_spins", str(p.n_spins)),
        ("gamma", fmt(p.gamma)),
        ("field", fmt(p.field)),
        ("coupling", fmt(p.coupling)),
        ("energy", fmt(gs.energy)),
        ("parity", gs.parity),
        ("residual", fmt(gs.eigensolve_residual)),
        ("sha256", hashlib.sha256(body.encode()).hexdigest()),
    ]
    return "".join(f"# {k} = {v}\n" for k, v in header) + body


class CacheCorrupt(ValueError):
    pass


def deserialize(text: str, expected: ModelParams | None = None) -> GroundState:
    header: dict[str, str] = {}
    lines = text.splitlines(keepends=True)
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        key, _, value = lines[i][1:].partition("=")
        header[key.strip()] = value.strip()
        i += 1
    body = "".join(lines[i:])
    try:
        if hashlib.sha256(body.encode()).hexdigest() != header["sha256"]:
            raise CacheCorrupt("checksum mismatch")
        if header["solver"] != SOLVER_VERSION:
            raise CacheCorrupt(f"solver tag {header['solver']!r}")
        params = ModelParams(int(header["n_spins"]), float(header["gamma"]),
                             float(header["field"]), float(header["coupling"]))
        amps = np.array([float(x) for x in body.split()])
        gs = GroundState(params, float(header["energy"]), DickeVector(params.n_spins, amps),
                         header["parity"], float(header["residual"]))
    except (KeyError, ValueError) as exc:
        if isinstance(exc, CacheCorrupt):
            raise
        raise CacheCorrupt(str(exc)) from exc
    if expected is not None and params != expected:
        raise CacheCorrupt(f"cached params {params} differ from requested {expected}")
    return gs


class GroundStateCache:
    """Ground-state solver backed by a cache directory.

    Writes go to a temporary file in the same directory and are renamed into
    place, so concurrent readers never see a partial record.
    """

    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    @classmethod
    def from_env(cls, directory=None) -> "GroundStateCache | None":
        directory = directory or os.environ.get(CACHE_ENV)
        return cls(directory) if directory else None

    def path_for(self, params: ModelParams) -> Path:
        return self.directory / cache_filename(params)

    def load(self, params: ModelParams) -> GroundState | None:
        path = self.path_for(params)
        try:
            text = path.read_text()
        except FileNotFoundError:
            return None
        try:
            return deserialize(text, params)
        except CacheCorrupt as exc:
            log.warning("discarding corrupt cache entry %s: %s", path, exc)
            return None

    def store(self, gs: GroundState) -> Path:
        path = self.path_for(gs.params)
        text = serialize(gs)
        with self._write_lock:
            fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp_", suffix=".txt")
            try:
                with os.fdopen(fd, "w", newline="\n") as fh:
                    fh.write(text)
                os.replace(tmp, path)
            except BaseException:
                Path(tmp).unlink(missing_ok=True)
                raise
        return path

    def __call__(self, params: ModelParams) -> GroundState:
        gs = self.load(params)
        if gs is not None:
            self.hits += 1
            return gs
        self.misses += 1
        gs = ground_state(params)
        self.store(gs)
        return gs

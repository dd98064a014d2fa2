import numpy as np
import pytest

from lmg_gmc.cache import (CACHE_ENV, CacheCorrupt, GroundStateCache, deserialize,
                           serialize)
from lmg_gmc.symmetric import ModelParams, ground_state


@pytest.mark.parametrize("params", [ModelParams(2, 0.5, 0.0), ModelParams(157, 0.5, 0.9731),
                                    ModelParams(40, 0.0, 1.0 / 3.0, 1.7)])
def test_round_trip_bitwise(params):
    gs = ground_state(params)
    back = deserialize(serialize(gs), params)
    assert back.params == gs.params
    assert back.energy == gs.energy
    assert back.parity == gs.parity
    assert back.eigensolve_residual == gs.eigensolve_residual
    assert np.array_equal(back.vector.amplitudes, gs.vector.amplitudes)


def test_cache_hit_equals_fresh(tmp_path):
    cache = GroundStateCache(tmp_path)
    p = ModelParams(80, 0.5, 0.95)
    first = cache(p)
    second = cache(p)
    assert (cache.misses, cache.hits) == (1, 1)
    assert np.array_equal(first.vector.amplitudes, second.vector.amplitudes)
    assert second.energy == ground_state(p).energy
    assert not list(tmp_path.glob(".tmp_*"))


def test_corrupt_entry_is_recomputed(tmp_path):
    cache = GroundStateCache(tmp_path)
    p = ModelParams(12, 0.5, 0.4)
    path = cache.path_for(p)
    cache(p)
    lines = path.read_text().splitlines(keepends=True)
    lines[-1] = "0.123\n"
    path.write_text("".join(lines))
    with pytest.raises(CacheCorrupt):
        deserialize(path.read_text(), p)
    gs = cache(p)
    assert cache.misses == 2
    assert np.array_equal(gs.vector.amplitudes, ground_state(p).vector.amplitudes)
    deserialize(path.read_text(), p)


def test_truncated_entry_is_recomputed(tmp_path):
    cache = GroundStateCache(tmp_path)
    p = ModelParams(6, 0.5, 0.4)
    cache.path_for(p).write_text("# solver = tridiag-1\n")
    assert cache.load(p) is None
    cache(p)
    assert cache.load(p) is not None


def test_mismatched_params_rejected():
    gs = ground_state(ModelParams(6, 0.5, 0.4))
    with pytest.raises(CacheCorrupt):
        deserialize(serialize(gs), ModelParams(6, 0.5, 0.5))


def test_filename_distinguishes_params(tmp_path):
    cache = GroundStateCache(tmp_path)
    names = {cache.path_for(ModelParams(10, 0.5, h)).name for h in (0.1, 0.1000001, 0.2)}
    assert len(names) == 3


def test_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path / "c"))
    cache = GroundStateCache.from_env()
    assert cache is not None and cache.directory == tmp_path / "c"
    monkeypatch.delenv(CACHE_ENV)
    assert GroundStateCache.from_env() is None

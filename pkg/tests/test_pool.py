from pathlib import Path

import pytest

from mrdikit.algebra import QQ, ZZ, Polynomial, polynomial_ring, univariate_ring
from mrdikit.errors import (
    PoolClosedError,
    TransportError,
    ValidationError,
    WorkerFailure,
)
from mrdikit.ipc import LoadContext, spawn_pool
from mrdikit.mrdi import GlobalSerializerState

TESTS_DIR = str(Path(__file__).parent)


@pytest.fixture
def extras_env(monkeypatch):
    # Make tests/worker_extras.py importable inside spawned workers.
    import os

    existing = os.environ.get("PYTHONPATH")
    joined = TESTS_DIR if not existing else f"{TESTS_DIR}:{existing}"
    monkeypatch.setenv("PYTHONPATH", joined)


def test_spawn_rejects_zero():
    with pytest.raises(ValidationError):
        spawn_pool(0)


def test_spawn_failure_raises_transport_error():
    with pytest.raises(TransportError):
        spawn_pool(2, command=["/nonexistent/binary/path", "--worker"])


def test_single_worker_pool_basics():
    with spawn_pool(1) as pool:
        assert len(pool.workers) == 1
        assert pool.workers[0].state == "idle"
        assert pool.workers[0].known_contexts == set()
        assert pool.remote_call("identity", (42,)) == 42


def test_remote_poly_square_matches_local():
    with spawn_pool(2) as pool:
        R, (x,) = polynomial_ring(QQ, "x")
        p = x + Polynomial.constant(R, 1)
        result = pool.remote_call("poly_square", (p,))
        assert result == p * p
        assert result.parent is R


def test_unknown_function_failure():
    with spawn_pool(1) as pool:
        with pytest.raises(WorkerFailure, match="unknown function"):
            pool.remote_call("unregistered_fn", (1,))


def test_bare_int_args_send_no_contexts():
    events = []
    with spawn_pool(1, tap=events.append) as pool:
        assert pool.remote_call("identity", (7,)) == 7
    loads = [e for e in events if isinstance(e[2], LoadContext)]
    assert loads == []


def test_parallel_map_empty():
    with spawn_pool(2) as pool:
        assert pool.parallel_map("identity", []) == []


def test_parallel_map_preserves_order():
    with spawn_pool(3) as pool:
        items = [(i,) for i in range(20)]
        assert pool.parallel_map("identity", items) == list(range(20))


def test_parallel_map_single_worker_matches_serial():
    Rt, t = univariate_ring(ZZ, "t")
    polys = [t + Polynomial.constant(Rt, k) for k in range(6)]
    with spawn_pool(1) as pool:
        got = pool.parallel_map("poly_square", [(p,) for p in polys])
    assert got == [p * p for p in polys]


def test_parallel_map_reports_failing_index(extras_env):
    with spawn_pool(2, init_modules=["worker_extras"]) as pool:
        items = [(i,) for i in range(6)]
        with pytest.raises(WorkerFailure) as info:
            pool.parallel_map("fail_on_three", items)
        assert info.value.index == 3
        assert "three is right out" in str(info.value)


def test_worker_created_contexts_flow_back(extras_env):
    with spawn_pool(2, init_modules=["worker_extras"]) as pool:
        p1 = pool.remote_call("fresh_ring_poly", (5,))
        p2 = pool.remote_call("fresh_ring_poly", (5,))
        # Both calls may land on different workers minting different UUIDs,
        # but the reconstructed values intern to the same local ring.
        assert p1 == p2
        assert p1.parent is p2.parent


def test_shutdown_then_call_rejected():
    pool = spawn_pool(1)
    pool.shutdown()
    with pytest.raises(PoolClosedError):
        pool.remote_call("identity", (1,))
    with pytest.raises(PoolClosedError):
        pool.parallel_map("identity", [(1,)])
    pool.shutdown()  # second shutdown is a no-op


def test_shutdown_waits_for_busy_worker(extras_env):
    import threading
    import time

    pool = spawn_pool(1, init_modules=["worker_extras"])
    outcome = {}

    def slow_call():
        outcome["value"] = pool.remote_call("sleep_ms", (600,))

    thread = threading.Thread(target=slow_call)
    thread.start()
    time.sleep(0.2)  # let the call get in flight
    start = time.perf_counter()
    pool.shutdown()
    waited = time.perf_counter() - start
    thread.join()
    assert outcome["value"] == 600  # the in-flight call completed
    assert waited > 0.15  # shutdown actually drained it


def test_worker_processes_reaped_after_shutdown():
    pool = spawn_pool(2)
    procs = [w.proc for w in pool.workers]
    pool.remote_call("identity", (0,))
    pool.shutdown()
    assert all(proc.poll() is not None for proc in procs)


# -- context distribution -------------------------------------------------------


def nested_ring_polys(count):
    Rt, t = univariate_ring(ZZ, "t")
    Ru, u = univariate_ring(Rt, "u")
    return Rt, Ru, [u.scale(t) + u**k for k in range(2, 2 + count)]


def test_exactly_once_context_delivery_and_order():
    events = []
    Rt, Ru, polys = nested_ring_polys(9)
    with spawn_pool(3, tap=events.append) as pool:
        results = pool.parallel_map("poly_square", [(p,) for p in polys])
        assert results == [p * p for p in polys]
        inner_uuid = pool.global_state.uuid_for(Rt)
        outer_uuid = pool.global_state.uuid_for(Ru)

    loads = [
        (worker, msg.uuid)
        for direction, worker, msg in events
        if direction == "send" and isinstance(msg, LoadContext)
    ]
    # at most one LoadContext per (worker, context)
    assert len(loads) == len(set(loads))
    # dependency order: the inner ring reaches each worker before the outer
    for worker in {w for w, _ in loads}:
        sequence = [u for w, u in loads if w == worker]
        if outer_uuid in sequence:
            assert inner_uuid in sequence
            assert sequence.index(inner_uuid) < sequence.index(outer_uuid)


def test_second_ensure_sends_nothing():
    events = []
    _, _, polys = nested_ring_polys(1)
    with spawn_pool(1, tap=events.append) as pool:
        pool.remote_call("poly_square", (polys[0],))
        first_loads = sum(
            isinstance(msg, LoadContext) for d, _, msg in events if d == "send"
        )
        pool.remote_call("poly_square", (polys[0],))
        second_loads = sum(
            isinstance(msg, LoadContext) for d, _, msg in events if d == "send"
        )
    assert first_loads == 2  # inner then outer ring
    assert second_loads == first_loads


def test_calls_overlap_across_workers(extras_env):
    # Sleeps release the CPU, so overlap shows even on a single-core host:
    # 6 x 300 ms must take well under the 1.8 s serial floor on 3 workers.
    import time

    with spawn_pool(3, init_modules=["worker_extras"]) as pool:
        start = time.perf_counter()
        assert pool.parallel_map("sleep_ms", [(300,)] * 6) == [300] * 6
        elapsed = time.perf_counter() - start
    assert elapsed < 1.5, f"calls did not overlap: {elapsed:.2f}s for 6 x 300ms on 3 workers"


def test_parallel_map_deterministic_across_pool_sizes():
    Rt, t = univariate_ring(ZZ, "t")
    items = [(t**k + Polynomial.constant(Rt, k),) for k in range(10)]
    expected = [p * p for (p,) in items]
    for size in (1, 2, 4):
        with spawn_pool(size) as pool:
            assert pool.parallel_map("poly_square", items) == expected


def test_six_worker_pool_shape():
    with spawn_pool(6) as pool:
        assert len(pool.workers) == 6
        assert all(w.state == "idle" for w in pool.workers)
        assert pool.parallel_map("identity", [(i,) for i in range(12)]) == list(range(12))


def test_worker_log_files(extras_env, tmp_path, monkeypatch):
    prefix = tmp_path / "workerlog"
    monkeypatch.setenv("MRDI_WORKER_LOG", str(prefix))
    with spawn_pool(2) as pool:
        pool.parallel_map("identity", [(i,) for i in range(4)])
    logs = sorted(tmp_path.glob("workerlog.w*"))
    assert logs, "no worker log files written"
    text = "".join(p.read_text() for p in logs)
    assert "call" in text and "shutting down" in text


def test_pool_accepts_shared_global_state():
    gs = GlobalSerializerState()
    R, (x,) = polynomial_ring(QQ, "shared_x")
    with spawn_pool(1, global_state=gs) as pool:
        assert pool.global_state is gs
        got = pool.remote_call("poly_square", (x,))
        assert got == x * x
        assert gs.uuid_for(R) is not None

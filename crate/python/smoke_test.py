"""Smoke test for the semibfs extension module.

Build it first, then point PYTHONPATH at a directory holding it as
semibfs.so, for example:

    cargo build --release -p semibfs-python
    mkdir -p /tmp/semibfs-py && cp target/release/libsemibfs.so /tmp/semibfs-py/semibfs.so
    PYTHONPATH=/tmp/semibfs-py python3 python/smoke_test.py
"""

import os
import tempfile

import semibfs


def main():
    with tempfile.TemporaryDirectory() as d:
        g = os.path.join(d, "g.bin")
        assert semibfs.generate(g, 2000, 12000, seed=3) == 12000

        trees = {}
        for algo in ("ee", "eb", "ep"):
            tree, stats = semibfs.run(g, algo=algo, k=0.5)
            ok, bad = semibfs.verify(g, tree)
            assert ok and bad == 0, (algo, bad)
            assert stats["peak_in_memory_edges"] <= stats["edge_budget"]
            assert stats["dt_bytes"] == stats["bytes_read"] + stats["bytes_written"]
            trees[algo] = tree
            print(f"{algo}: passes={stats['outer_iterations']} dt={stats['dt_bytes']} "
                  f"time={stats['wall_time_s']:.3f}s")
        assert sorted(trees["ep"].b) == list(range(1, 2001))

        # round trip through a tree file
        t = os.path.join(d, "t.bin")
        trees["ep"].write(t)
        assert semibfs.BfsTree.read(t) == trees["ep"]

        # a tree that hangs node 1 off the root although 0 -> 1 exists
        small = os.path.join(d, "small.bin")
        assert semibfs.generate(small, 2, 2) == 2
        good = semibfs.reference_bfs(2, [(0, 1), (1, 0)])
        assert good.p == [None, 0] and good.b == [1, 2]
        assert semibfs.verify(small, good) == (True, 0)
        bad = semibfs.BfsTree([1, 2], [None, None])
        assert semibfs.verify(small, bad) == (False, 1)

        s = os.path.join(d, "s.bin")
        assert semibfs.subsample(g, 1.0, s, seed=5) == 12000

        try:
            semibfs.run(g, algo="nope")
        except ValueError:
            pass
        else:
            raise AssertionError("unknown algorithm accepted")
    print("ok")


if __name__ == "__main__":
    main()

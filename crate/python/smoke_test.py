#!/usr/bin/env python3
"""Smoke test for the ergo_py extension module.

Builds nothing itself: expects `cargo build -p ergo-python --release` to
have produced target/release/libergo_py.so, which is staged under a
temporary directory with the import name Python expects.
"""

import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def stage_module(tmp: Path) -> None:
    built = REPO / "target" / "release" / "libergo_py.so"
    if not built.exists():
        sys.exit(f"missing {built}; run `cargo build -p ergo-python --release` first")
    shutil.copy(built, tmp / "ergo_py.so")
    sys.path.insert(0, str(tmp))


def main() -> None:
    with tempfile.TemporaryDirectory() as tmpdir:
        tmp = Path(tmpdir)
        stage_module(tmp)
        import ergo_py

        # Deterministic generation.
        corpus = ergo_py.demo_corpus(samples=4, seed=0)
        assert len(corpus) == 4
        assert corpus.width == 64 and corpus.height == 48
        events = corpus.events(0)
        assert events, "demo window should contain events"
        assert all(p == 1 for (_, _, _, p) in events)
        t0, t1 = corpus.window(0)
        assert t0 == 0.0 and t1 > t0
        again = ergo_py.demo_corpus(samples=4, seed=0)
        assert again.events(0) == events, "generation must be deterministic"

        # Round trip through the on-disk corpus format.
        corpus.write(tmp / "corpus")
        reloaded = ergo_py.read_corpus(tmp / "corpus")
        assert len(reloaded) == 4
        assert reloaded.events(0) == events

        # Representation building.
        shape, flat = corpus.representation(0, "voxel12")
        assert shape == (48, 64, 12)
        assert len(flat) == 48 * 64 * 12
        assert any(v != 0.0 for v in flat)
        blurred_shape, blurred = corpus.representation(0, "voxel12", blur_sigma=1.0)
        assert blurred_shape == shape
        assert abs(sum(blurred) - sum(flat)) < 1e-6, "blur must conserve mass"

        # GWD scoring.
        g = corpus.gwd(0, "voxel12", event_cap=200)
        assert g >= 0.0, f"GWD must be non-negative, got {g}"
        assert corpus.gwd(0, "voxel12", event_cap=200) == g, "scoring must be deterministic"
        mean, n, skipped = corpus.gwd_batch("hist2", n=2, event_cap=200)
        assert n == 2 and skipped == 0 and mean >= 0.0

        # Custom scenes and validation errors.
        edge = ergo_py.generate_corpus(
            "translating-edge", 32, 24, 1.0, 32.0, samples=2, seed=1
        )
        assert len(edge) == 2
        try:
            ergo_py.generate_corpus("no-such-pattern", 32, 24, 1.0, 32.0, samples=2)
        except ValueError:
            pass
        else:
            raise AssertionError("unknown pattern should raise ValueError")
        try:
            corpus.gwd(99, "voxel12")
        except ValueError:
            pass
        else:
            raise AssertionError("bad window index should raise ValueError")

        # Similarity invariances.
        suites = ergo_py.invariance(seed=0, point_sets=3)
        assert len(suites) == 3
        for name, deviation, ok in suites:
            assert ok, f"invariance suite {name} failed (deviation {deviation})"

        # One-channel exhaustive search on a small batch.
        spec_json, scores = corpus.search(1, n=2, event_cap=100)
        assert len(scores) == 1
        assert "channels" in spec_json

    print("smoke test passed")


if __name__ == "__main__":
    main()

"""Aggregate one dump in a fresh interpreter and report time and peak RSS as JSON.

Run as ``python scale_probe.py DUMP BUFFER_BYTES``; kept out of the test
process so the measured peak belongs to the aggregation alone.
"""

from __future__ import annotations

import json
import resource
import sys
import time

from dsa_audit.ingest import AggregationSpec, aggregate_sor, stream_sor_records
from sor_synth import BOUNDS


def main() -> None:
    path, buffer_size = sys.argv[1], int(sys.argv[2])
    spec = AggregationSpec(
        frozenset({"period", "category", "account_action", "automated_detection"}), BOUNDS
    )
    before = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024
    start = time.perf_counter()
    stream = stream_sor_records(path, buffer_size=buffer_size)
    result = aggregate_sor(stream, spec)
    seconds = time.perf_counter() - start
    after = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024
    json.dump(
        {
            "seconds": seconds,
            "rss_before": before,
            "rss_after": after,
            "rows": stream.stats.rows_read,
            "matched": result.matched,
        },
        sys.stdout,
    )


if __name__ == "__main__":
    main()

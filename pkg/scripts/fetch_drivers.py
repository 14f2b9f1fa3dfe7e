"""Fetch the public drivers casualty series into data/drivers.csv.

The series is the monthly count of car drivers killed or seriously
injured in Great Britain, January 1969 through December 1984 (192
months), distributed with R as ``UKDriverDeaths``.  The script tries a
few sources in order and writes a one-column ``count`` CSV that
``priorscan rw1 --data data/drivers.csv`` can ingest directly.

Offline environments will see every source fail; in that case export
the series from R yourself::

    write.csv(data.frame(count = as.integer(UKDriverDeaths)),
              "data/drivers.csv", row.names = FALSE)
"""

from __future__ import annotations

import csv
import io
import sys
import urllib.error
import urllib.request
from pathlib import Path

EXPECTED_MONTHS = 192
MIRRORS = (
    "https://raw.githubusercontent.com/vincentarelbundock/Rdatasets/master/csv/datasets/UKDriverDeaths.csv",
    "https://vincentarelbundock.github.io/Rdatasets/csv/datasets/UKDriverDeaths.csv",
)


def from_pydataset() -> list[int] | None:
    try:
        from pydataset import data
    except ImportError:
        return None
    frame = data("UKDriverDeaths")
    col = "UKDriverDeaths" if "UKDriverDeaths" in frame.columns else frame.columns[-1]
    return [int(v) for v in frame[col]]


def from_url(url: str) -> list[int] | None:
    try:
        with urllib.request.urlopen(url, timeout=30) as resp:
            text = resp.read().decode("utf-8")
    except (urllib.error.URLError, OSError, TimeoutError):
        return None
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or "value" not in reader.fieldnames:
        return None
    return [int(float(row["value"])) for row in reader]


def main() -> int:
    out = Path(__file__).resolve().parent.parent / "data" / "drivers.csv"
    counts = from_pydataset()
    source = "pydataset"
    if counts is None:
        for url in MIRRORS:
            counts = from_url(url)
            if counts is not None:
                source = url
                break
    if counts is None:
        print("could not reach any source for the drivers series.", file=sys.stderr)
        print("export it from R manually; see this script's docstring.", file=sys.stderr)
        return 1
    if len(counts) != EXPECTED_MONTHS:
        print(f"source returned {len(counts)} rows, expected {EXPECTED_MONTHS}; "
              "refusing to write a mangled file.", file=sys.stderr)
        return 1
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w") as fh:
        fh.write("count\n")
        for c in counts:
            fh.write(f"{c}\n")
    print(f"wrote {len(counts)} months from {source} to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

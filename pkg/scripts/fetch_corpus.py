"""Download the full PabuLib corpus (optional; needs open network access).

The library itself never touches the network; this helper fills a local
directory with .pb files for large-scale benchmarking:

    python scripts/fetch_corpus.py /path/to/corpus
    propselect bench /path/to/corpus --rules all

The zip holds the complete published collection (1,300+ instances); the
bundled sample corpus under src/propselect/data/pabulib/ is enough for the
test suite.
"""

from __future__ import annotations

import io
import sys
import urllib.request
import zipfile
from pathlib import Path

ARCHIVE_URL = "http://pabulib.org/static/all.zip"


def main():
    if len(sys.argv) != 2:
        print(__doc__)
        sys.exit(1)
    outdir = Path(sys.argv[1])
    outdir.mkdir(parents=True, exist_ok=True)
    print(f"fetching {ARCHIVE_URL} ...")
    with urllib.request.urlopen(ARCHIVE_URL) as resp:
        payload = resp.read()
    count = 0
    with zipfile.ZipFile(io.BytesIO(payload)) as zf:
        for name in zf.namelist():
            if not name.endswith(".pb"):
                continue
            target = outdir / Path(name).name
            target.write_bytes(zf.read(name))
            count += 1
    print(f"extracted {count} instances into {outdir}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Download the ORL (AT&T) face database and lay it out for the entroface CLI.

The script produces, under the destination directory (default: data/orl/):

    s01_01.pgm ... s40_10.pgm   one 8-bit grayscale PGM per image
    manifest.csv                path,subject_id,index rows pointing at them

Two sources are attempted, in order:

 1. The original 92x112 archive (orl_faces.zip / att_faces.zip), if one of
    the known mirror URLs is reachable.
 2. scikit-learn's Olivetti copy (64x64, same 40 subjects x 10 images),
    via sklearn.datasets.fetch_olivetti_faces.

Either layout satisfies the acceptance suite: point ORL_DIR at the
destination directory (or use the default data/orl/ next to the workspace
root) and the tests pick up the real corpus instead of the synthetic
stand-in.

usage: python scripts/fetch_orl.py [dest_dir]
"""

import csv
import io
import re
import sys
import urllib.request
import zipfile
from pathlib import Path

ARCHIVE_URLS = [
    "https://www.cl.cam.ac.uk/research/dtg/attarchive/pub/data/att_faces.zip",
    "http://www.cl.cam.ac.uk/Research/DTG/attarchive/pub/data/att_faces.zip",
]


def write_pgm(path: Path, width: int, height: int, pixels: bytes) -> None:
    assert len(pixels) == width * height
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (width, height))
        f.write(pixels)


def parse_pgm(data: bytes):
    """Minimal P5/P2 reader for the archive's files (maxval <= 255)."""
    tokens = []
    pos = 0
    while len(tokens) < 4:
        m = re.match(rb"\s*(#[^\n]*\n|\S+)", data[pos:])
        if m is None:
            raise ValueError("truncated PGM header")
        tok = m.group(1)
        pos += m.end()
        if not tok.startswith(b"#"):
            tokens.append(tok)
    magic, w, h, maxval = tokens[0], int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval > 255:
        raise ValueError("16-bit PGM not supported here")
    if magic == b"P5":
        pixels = data[pos + 1 : pos + 1 + w * h]  # single whitespace after maxval
        if len(pixels) != w * h:
            raise ValueError("truncated PGM raster")
        return w, h, bytes(pixels)
    if magic == b"P2":
        values = data[pos:].split()
        if len(values) < w * h:
            raise ValueError("truncated PGM raster")
        return w, h, bytes(int(v) for v in values[: w * h])
    raise ValueError(f"not a PGM: magic {magic!r}")


def from_archive(dest: Path) -> bool:
    blob = None
    for url in ARCHIVE_URLS:
        try:
            print(f"trying {url} ...")
            with urllib.request.urlopen(url, timeout=60) as resp:
                blob = resp.read()
            break
        except Exception as e:  # noqa: BLE001 - report and try the next mirror
            print(f"  unavailable: {e}")
    if blob is None:
        return False

    rows = []
    with zipfile.ZipFile(io.BytesIO(blob)) as zf:
        for name in sorted(zf.namelist()):
            m = re.search(r"s(\d+)/(\d+)\.pgm$", name)
            if m is None:
                continue
            subject, index = int(m.group(1)), int(m.group(2))
            w, h, pixels = parse_pgm(zf.read(name))
            out = dest / f"s{subject:02}_{index:02}.pgm"
            write_pgm(out, w, h, pixels)
            rows.append((out.name, f"s{subject:02}", index))
    if len(rows) != 400:
        print(f"archive had {len(rows)} images, expected 400; not using it")
        return False
    write_manifest(dest, rows)
    return True


def from_sklearn(dest: Path) -> bool:
    try:
        from sklearn.datasets import fetch_olivetti_faces
    except ImportError:
        print("scikit-learn is not installed (pip install scikit-learn)")
        return False
    try:
        faces = fetch_olivetti_faces(shuffle=False)
    except Exception as e:  # noqa: BLE001 - typically a network failure
        print(f"fetch_olivetti_faces failed: {e}")
        return False

    rows = []
    counts = {}
    for image, target in zip(faces.images, faces.target):
        subject = int(target) + 1
        index = counts.get(subject, 0) + 1
        counts[subject] = index
        h, w = image.shape
        pixels = bytes(min(255, max(0, round(float(v) * 255.0))) for v in image.ravel())
        out = dest / f"s{subject:02}_{index:02}.pgm"
        write_pgm(out, w, h, pixels)
        rows.append((out.name, f"s{subject:02}", index))
    write_manifest(dest, rows)
    return True


def write_manifest(dest: Path, rows) -> None:
    rows.sort(key=lambda r: (r[1], r[2]))
    with open(dest / "manifest.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["path", "subject_id", "index"])
        writer.writerows(rows)
    print(f"wrote {len(rows)} images + manifest.csv to {dest}/")


def main() -> int:
    dest = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data/orl")
    dest.mkdir(parents=True, exist_ok=True)
    if from_archive(dest) or from_sklearn(dest):
        return 0
    print("could not obtain the dataset from any source", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())

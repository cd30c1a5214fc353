#!/usr/bin/env python3
"""Build the bundled MNIST subset under data/mnist/ as gzipped IDX files.

Source is the `mnist` npm package (cazala, MIT), which ships 10 000 genuine
MNIST digits as JSON float arrays (pixel byte / 255, rounded to 3 decimals —
exactly invertible by nearest-byte rounding). The first 400 examples of each
class become the training split; everything else (6 000 digits) becomes the
held-out test split. Both splits are written round-robin over classes so any
prefix stays class-mixed.

Usage:
  python3 scripts/make_mnist_subset.py --source /path/to/mnist-1.1.0.tgz
  python3 scripts/make_mnist_subset.py --source /path/to/package --out data/mnist
"""

import argparse
import gzip
import json
import struct
import sys
import tarfile
import tempfile
from pathlib import Path

TRAIN_PER_CLASS = 400
ROWS = COLS = 28
PIXELS = ROWS * COLS


def load_digits(package_dir: Path):
    """Per-class lists of 784-byte images, in package order."""
    by_class = []
    for d in range(10):
        raw = json.loads((package_dir / "src" / "digits" / f"{d}.json").read_text())
        data = raw["data"]
        if len(data) % PIXELS:
            sys.exit(f"digit {d}: length {len(data)} not a multiple of {PIXELS}")
        images = [
            bytes(round(v * 255) for v in data[i : i + PIXELS])
            for i in range(0, len(data), PIXELS)
        ]
        by_class.append(images)
    return by_class


def interleave(per_class):
    """Round-robin over classes until every list is exhausted."""
    images, labels = [], []
    queues = [list(c) for c in per_class]
    while any(queues):
        for d, q in enumerate(queues):
            if q:
                images.append(q.pop(0))
                labels.append(d)
    return images, labels


def gzip_out(path: Path):
    # mtime=0 keeps regenerated archives byte-identical.
    return gzip.GzipFile(filename=str(path), mode="wb", mtime=0)


def write_idx_images(path: Path, images):
    header = struct.pack(">IIII", 0x00000803, len(images), ROWS, COLS)
    with gzip_out(path) as f:
        f.write(header)
        for img in images:
            f.write(img)


def write_idx_labels(path: Path, labels):
    header = struct.pack(">II", 0x00000801, len(labels))
    with gzip_out(path) as f:
        f.write(header)
        f.write(bytes(labels))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--source", required=True,
                    help="mnist npm package: extracted dir or .tgz archive")
    ap.add_argument("--out", default="data/mnist", help="output directory")
    args = ap.parse_args()

    src = Path(args.source)
    if src.is_file():
        tmp = tempfile.TemporaryDirectory()
        with tarfile.open(src) as tar:
            tar.extractall(tmp.name)
        package_dir = Path(tmp.name) / "package"
    else:
        package_dir = src

    by_class = load_digits(package_dir)
    train = [c[:TRAIN_PER_CLASS] for c in by_class]
    test = [c[TRAIN_PER_CLASS:] for c in by_class]
    for d, c in enumerate(by_class):
        if len(c) < TRAIN_PER_CLASS + 1:
            sys.exit(f"digit {d}: only {len(c)} examples")

    train_images, train_labels = interleave(train)
    test_images, test_labels = interleave(test)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_idx_images(out / "train-images-idx3-ubyte.gz", train_images)
    write_idx_labels(out / "train-labels-idx1-ubyte.gz", train_labels)
    write_idx_images(out / "t10k-images-idx3-ubyte.gz", test_images)
    write_idx_labels(out / "t10k-labels-idx1-ubyte.gz", test_labels)
    print(f"train: {len(train_images)} images, test: {len(test_images)} images -> {out}")


if __name__ == "__main__":
    main()

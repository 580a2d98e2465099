"""Build the binarized MNIST test fixture from the npm `mnist` package.

Usage: npm pack mnist && tar xzf mnist-*.tgz
       python3 scripts/mnist_fixture.py package/src/digits crates/core/tests/data

Each image is binarized at its own mean intensity (pixel > mean -> set
element) and written as one sparse-binary line. Rows are shuffled with a
fixed seed so every prefix is a mixed-digit subset.
"""
import gzip
import json
import random
import sys
from pathlib import Path


def main(src: str, dst: str) -> None:
    rows = []
    for digit in range(10):
        data = json.loads(Path(src, f"{digit}.json").read_text())["data"]
        for k in range(0, len(data), 784):
            img = data[k : k + 784]
            mean = sum(img) / len(img)
            rows.append((digit, [i for i, v in enumerate(img) if v > mean]))
    random.Random(20190101).shuffle(rows)
    out = Path(dst)
    with gzip.open(out / "mnist10k.txt.gz", "wt", newline="\n") as f:
        f.write("# binarized MNIST digits, one image per line (pixel > image mean)\n")
        for _, elems in rows:
            f.write(" ".join(map(str, elems)) + "\n")
    with open(out / "mnist10k_labels.csv", "w", newline="\n") as f:
        f.write("label\n")
        for digit, _ in rows:
            f.write(f"{digit}\n")
    print(len(rows), "rows")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])

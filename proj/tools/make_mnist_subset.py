#!/usr/bin/env python3
# Copyright 2026 The pillfl Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Builds the desk-scale MNIST subset in IDX format.

The 10,000 digits bundled with the `mnist` npm package (pixels stored as
round(byte / 255, 3)) are converted back to bytes, shuffled with a fixed
seed, and split into a 6000-sample training file and a 4000-sample test file.

Usage:
  npm pack mnist && tar xzf mnist-*.tgz
  python3 tools/make_mnist_subset.py --digits package/src/digits --out data/mnist
"""
import argparse
import json
import os
import struct

import numpy as np


def write_idx_images(path, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, images.shape[0], 28, 28))
        f.write(images.astype(np.uint8).tobytes())


def write_idx_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, labels.shape[0]))
        f.write(labels.astype(np.uint8).tobytes())


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--digits", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--train", type=int, default=6000)
    parser.add_argument("--seed", type=int, default=20240501)
    args = parser.parse_args()

    images, labels = [], []
    for digit in range(10):
        with open(os.path.join(args.digits, f"{digit}.json")) as f:
            raw = np.asarray(json.load(f)["data"], dtype=np.float64)
        raw = raw.reshape(-1, 784)
        images.append(np.clip(np.rint(raw * 255.0), 0, 255))
        labels.append(np.full(raw.shape[0], digit))
    images = np.concatenate(images)
    labels = np.concatenate(labels)

    order = np.random.default_rng(args.seed).permutation(labels.shape[0])
    images, labels = images[order], labels[order]
    n = args.train

    os.makedirs(args.out, exist_ok=True)
    write_idx_images(os.path.join(args.out, "train-images-idx3-ubyte"), images[:n])
    write_idx_labels(os.path.join(args.out, "train-labels-idx1-ubyte"), labels[:n])
    write_idx_images(os.path.join(args.out, "test-images-idx3-ubyte"), images[n:])
    write_idx_labels(os.path.join(args.out, "test-labels-idx1-ubyte"), labels[n:])
    print(f"train={n} test={labels.shape[0] - n}")


if __name__ == "__main__":
    main()

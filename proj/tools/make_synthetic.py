#!/usr/bin/env python3
# Copyright 2026 The hyperens Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes a planted low-rank implicit-feedback dataset as user_id,item_id,rating rows.

Each user draws its items without replacement with probability proportional
to exp(sharpness * <p_u, q_i>), where p_u and q_i are Gaussian factors.
"""

import argparse
import csv
import math
import random
import sys


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--users", type=int, default=50)
    ap.add_argument("--items", type=int, default=100)
    ap.add_argument("--min-per-user", type=int, default=20)
    ap.add_argument("--max-per-user", type=int, default=30)
    ap.add_argument("--rank", type=int, default=2)
    ap.add_argument("--sharpness", type=float, default=3.0)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    users = [[rng.gauss(0, 1) for _ in range(args.rank)] for _ in range(args.users)]
    items = [[rng.gauss(0, 1) for _ in range(args.rank)] for _ in range(args.items)]

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["user_id", "item_id", "rating"])
    for u, p in enumerate(users):
        n = rng.randint(args.min_per_user, args.max_per_user)
        weights = [math.exp(args.sharpness * sum(a * b for a, b in zip(p, q))) for q in items]
        chosen = set()
        while len(chosen) < n:
            chosen.add(rng.choices(range(args.items), weights=weights)[0])
        for i in sorted(chosen):
            out.writerow([f"u{u:03d}", f"i{i:03d}", rng.randint(1, 5)])


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
# Copyright 2026 The slicekit Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Trivial detector speaking the slicekit-detect stdio protocol.

For every request it answers with one box covering the middle half of the
resized region. Every --oob-every'th request (by id) gets a box that runs
2 px past the right edge, to exercise clamping on the caller's side.
"""
import argparse
import json
import sys


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--empty", action="store_true", help="never report detections")
    ap.add_argument("--oob-every", type=int, default=0,
                    help="make every Nth request id return an out-of-bounds box")
    ap.add_argument("--die-after", type=int, default=-1,
                    help="exit without answering after N requests")
    ap.add_argument("--garbage-after", type=int, default=-1,
                    help="answer with a malformed line after N requests")
    ap.add_argument("--category", type=int, default=1)
    args = ap.parse_args()

    out = sys.stdout
    out.write(json.dumps({"protocol": "slicekit-detect", "version": 1}) + "\n")
    out.flush()

    served = 0
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        if served == args.die_after:
            return 0
        if served == args.garbage_after:
            out.write("this is not json\n")
            out.flush()
            served += 1
            continue
        req = json.loads(line)
        x0, y0, x1, y1 = req["region"]
        tw = req["target_width"]
        th = (y1 - y0) * tw / (x1 - x0)
        dets = []
        if not args.empty:
            box = [tw * 0.25, th * 0.25, tw * 0.75, th * 0.75]
            if args.oob_every > 0 and req["id"] % args.oob_every == 0:
                box[2] = tw + 2.0
            dets.append({"bbox": box, "score": 0.5, "category_id": args.category})
        out.write(json.dumps({"id": req["id"], "detections": dets}) + "\n")
        out.flush()
        served += 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

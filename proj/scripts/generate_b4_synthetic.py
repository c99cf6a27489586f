#!/usr/bin/env python3
"""Synthetic stand-in for the benchmark 4 outcrop network, plus a conforming mesh.

64 fractures in 13 connected clusters inside the 700 m x 600 m domain. Every fracture
of a cluster crosses an earlier one; clusters stay apart; crossings are kept away from
small angles and from fracture ends so the conforming mesh has no slivers.

Usage: scripts/generate_b4_synthetic.py [--out DIR] [--seed N]
"""

import argparse
import pathlib

import numpy as np
from shapely.geometry import LineString, Point

import generate_meshes

CLUSTER_SIZES = [12, 10, 8, 6, 5, 5, 4, 4, 3, 3, 2, 1, 1]
WIDTH, HEIGHT = 700.0, 600.0
MARGIN = 20.0
MIN_ANGLE = np.radians(25.0)
END_CLEARANCE = 3.0


def angle_between(a, b):
    da = np.subtract(a.coords[1], a.coords[0])
    db = np.subtract(b.coords[1], b.coords[0])
    c = abs(np.dot(da, db)) / (np.linalg.norm(da) * np.linalg.norm(db))
    return np.arccos(min(c, 1.0))


def acceptable(candidate, own, others):
    for other in others:
        if candidate.distance(other) < 15.0:
            return False
    crosses = False
    for seg in own:
        if not candidate.intersects(seg):
            ends = [Point(p) for p in candidate.coords] + [Point(p) for p in seg.coords]
            if min(candidate.distance(e) for e in ends[2:]) < END_CLEARANCE:
                return False
            if min(seg.distance(e) for e in ends[:2]) < END_CLEARANCE:
                return False
            continue
        crosses = True
        if angle_between(candidate, seg) < MIN_ANGLE:
            return False
        x = candidate.intersection(seg)
        if x.geom_type != "Point":
            return False
        for p in list(candidate.coords) + list(seg.coords):
            if x.distance(Point(p)) < END_CLEARANCE:
                return False
    return crosses or not own


def generate(seed):
    rng = np.random.default_rng(seed)
    clusters = []
    for size in CLUSTER_SIZES:
        for _ in range(1000):
            radius = 25.0 + 8.0 * size
            centre = rng.uniform([MARGIN + radius, MARGIN + radius],
                                 [WIDTH - MARGIN - radius, HEIGHT - MARGIN - radius])
            others = [s for c in clusters for s in c]
            own = []
            tries = 0
            while len(own) < size and tries < 2000:
                tries += 1
                if own:
                    # Cross a random existing fracture somewhere along its interior.
                    host = own[rng.integers(len(own))]
                    t = rng.uniform(0.2, 0.8)
                    mid = np.add(host.coords[0], t * np.subtract(host.coords[1], host.coords[0]))
                else:
                    mid = centre
                length = rng.uniform(0.6, 1.2) * radius
                theta = rng.uniform(0.0, np.pi)
                d = 0.5 * length * np.array([np.cos(theta), np.sin(theta)])
                shift = rng.uniform(-0.3, 0.3) * d
                a, b = mid - d + shift, mid + d + shift
                if min(a[0], b[0]) < MARGIN or max(a[0], b[0]) > WIDTH - MARGIN:
                    continue
                if min(a[1], b[1]) < MARGIN or max(a[1], b[1]) > HEIGHT - MARGIN:
                    continue
                candidate = LineString([tuple(np.round(a, 3)), tuple(np.round(b, 3))])
                if acceptable(candidate, own, others):
                    own.append(candidate)
            if len(own) == size:
                clusters.append(own)
                break
        else:
            raise RuntimeError("could not place a cluster; try another seed")
    return [s for c in clusters for s in c]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    root = pathlib.Path(__file__).resolve().parent.parent
    parser.add_argument("--out", type=pathlib.Path, default=root / "tests" / "data")
    parser.add_argument("--seed", type=int, default=20180419)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    segments = generate(args.seed)
    path = args.out / "b4_synthetic_fractures.txt"
    with open(path, "w") as f:
        f.write("# synthetic 64-fracture network, 13 clusters (xA yA xB yB)\n")
        for s in segments:
            (xa, ya), (xb, yb) = s.coords
            f.write(f"{xa!r} {ya!r} {xb!r} {yb!r}\n")
    print(f"{path}: {len(segments)} fractures")

    scenario = {
        "domain": [[0.0, 0.0], [WIDTH, 0.0], [WIDTH, HEIGHT], [0.0, HEIGHT]],
        "fractures": [{"a": list(s.coords[0]), "b": list(s.coords[1])} for s in segments],
    }
    vertices, cells = generate_meshes.triangulate(scenario, 60.0)
    generate_meshes.write_fvmesh(args.out / "b4_synthetic_tri.fvmesh", vertices, cells)
    print(f"b4_synthetic_tri: {len(cells)} triangles")


if __name__ == "__main__":
    main()

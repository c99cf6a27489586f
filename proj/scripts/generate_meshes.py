#!/usr/bin/env python3
"""Generate the benchmark meshes shipped under data/meshes.

Conforming triangulations come from the `triangle` package with fracture segments as
constrained edges (noded against each other and the boundary with shapely). The
Hydrocoin background mesh for embedded fractures triangulates the domain alone.

Usage: scripts/generate_meshes.py [--data DIR]
"""

import argparse
import json
import pathlib

import numpy as np
import shapely
import triangle
from shapely.geometry import LineString


def load(data, name):
    with open(data / "benchmarks" / f"{name}.json") as f:
        return json.load(f)


def pslg(scenario):
    domain = [tuple(p) for p in scenario["domain"]]
    lines = [LineString(domain + [domain[0]])]
    lines += [LineString([tuple(f["a"]), tuple(f["b"])]) for f in scenario["fractures"]]
    noded = shapely.node(shapely.MultiLineString(lines))
    index = {}
    vertices = []
    segments = []

    def vid(p):
        key = (round(p[0], 12), round(p[1], 12))
        if key not in index:
            index[key] = len(vertices)
            vertices.append(p)
        return index[key]

    for part in noded.geoms:
        coords = list(part.coords)
        for a, b in zip(coords[:-1], coords[1:]):
            segments.append((vid(a), vid(b)))
    return np.array(vertices, dtype=float), np.array(segments, dtype=int)


def triangulate(scenario, max_area, min_angle=28):
    vertices, segments = pslg(scenario)
    result = triangle.triangulate(
        {"vertices": vertices, "segments": segments}, f"pq{min_angle}a{max_area:.12f}"
    )
    return result["vertices"], [list(t) for t in result["triangles"]]


def write_fvmesh(path, vertices, cells):
    with open(path, "w") as f:
        f.write("fvmesh 1\n")
        f.write(f"vertices {len(vertices)}\n")
        for x, y in vertices:
            f.write(f"{float(x)!r} {float(y)!r}\n")
        f.write(f"cells {len(cells)}\n")
        for c in cells:
            f.write(f"{len(c)} " + " ".join(str(int(v)) for v in c) + "\n")


def tune_area(scenario, target, lo, hi):
    """Bisect the maximum triangle area so the cell count is close to target."""
    best = None
    for _ in range(30):
        mid = np.sqrt(lo * hi)
        _, cells = triangulate(scenario, mid)
        if best is None or abs(len(cells) - target) < abs(best[1] - target):
            best = (mid, len(cells))
        if len(cells) > target:
            lo = mid
        else:
            hi = mid
    return best[0]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    root = pathlib.Path(__file__).resolve().parent.parent
    parser.add_argument("--data", type=pathlib.Path, default=root / "data")
    args = parser.parse_args()
    out = args.data / "meshes"
    out.mkdir(parents=True, exist_ok=True)

    targets = {
        # name: (scenario, target triangles, area search range)
        "b1_tri": ("benchmark1", 1416, (1e2, 1e5)),
        "b2_tri": ("benchmark2a", 1386, (1e-5, 1e-2)),
        "b3_tri": ("benchmark3a", 1407, (1e-5, 1e-2)),
    }
    for name, (scen, target, (lo, hi)) in targets.items():
        scenario = load(args.data, scen)
        area = tune_area(scenario, target, lo, hi)
        vertices, cells = triangulate(scenario, area)
        write_fvmesh(out / f"{name}.fvmesh", vertices, cells)
        print(f"{name}: {len(cells)} triangles (max area {area:.4g})")

    # Fine conforming mesh used as the hybrid reference for benchmark 3.
    vertices, cells = triangulate(load(args.data, "benchmark3a"), 4e-5)
    write_fvmesh(out / "b3_fine.fvmesh", vertices, cells)
    print(f"b3_fine: {len(cells)} triangles")

    # Background mesh for embedded fractures: the domain alone, fractures left out.
    background = dict(load(args.data, "benchmark1"), fractures=[])
    area = tune_area(background, 1416, 1e2, 1e5)
    vertices, cells = triangulate(background, area)
    write_fvmesh(out / "b1_background.fvmesh", vertices, cells)
    print(f"b1_background: {len(cells)} triangles")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Regenerates the Delaunay test meshes in Triangle .node/.ele format.

Node markers: 1 S1, 2 T1, 3 S2, 4 T2 (counterclockwise arcs), and 12, 23,
34, 41 for the corner shared by two arcs. Interior nodes carry 0.

    python3 make_meshes.py [outdir]
"""

import sys
from pathlib import Path

import numpy as np
from scipy.spatial import Delaunay


def circumcenter(a, b, c):
    ba, ca = b - a, c - a
    d = 2.0 * (ba[0] * ca[1] - ba[1] * ca[0])
    lb, lc = ba @ ba, ca @ ca
    return a + np.array([ca[1] * lb - ba[1] * lc, ba[0] * lc - ca[0] * lb]) / d


def well_separated(points, tris, rel=1e-6):
    """Rejects meshes whose interior edges have nearly coincident circumcenters."""
    centers = [circumcenter(*points[t]) for t in tris]
    owner = {}
    for i, t in enumerate(tris):
        for k in range(3):
            owner.setdefault(tuple(sorted((t[k], t[(k + 1) % 3]))), []).append(i)
    for (u, v), ts in owner.items():
        if len(ts) == 2:
            edge = np.linalg.norm(points[u] - points[v])
            if np.linalg.norm(centers[ts[0]] - centers[ts[1]]) < rel * edge:
                return False
    return True


def boundary_cycle(tris):
    half = set()
    for t in tris:
        for k in range(3):
            half.add((t[k], t[(k + 1) % 3]))
    nxt = {}
    for u, v in half:
        if (v, u) not in half:
            assert u not in nxt, "boundary is not simple"
            nxt[u] = v
    start = next(iter(nxt))
    cycle = [start]
    while nxt[cycle[-1]] != start:
        cycle.append(nxt[cycle[-1]])
    assert len(cycle) == len(nxt), "boundary has several components"
    return cycle


def ccw(points, tris):
    out = []
    for t in tris:
        a, b, c = points[t]
        cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        out.append(t if cross > 0 else t[[0, 2, 1]])
    return np.array(out)


def polygon_mesh(corners, arc_of_side, eps, inside, rng, jitter=0.25):
    """Boundary nodes every eps along the polygon sides, jittered lattice nodes inside."""
    pts, markers = [], []
    n_sides = len(corners)
    for s in range(n_sides):
        a, b = np.array(corners[s], float), np.array(corners[(s + 1) % n_sides], float)
        steps = int(round(np.linalg.norm(b - a) / eps))
        for k in range(steps):
            pts.append(a + (b - a) * k / steps)
            arc = arc_of_side[s]
            if k == 0 and arc_of_side[s - 1] != arc:
                markers.append(int(f"{arc_of_side[s - 1]}{arc}"))
            else:
                markers.append(arc)
    xs = np.array(pts)
    lo, hi = xs.min(axis=0), xs.max(axis=0)
    for x in np.arange(lo[0] + eps, hi[0] - eps / 2, eps):
        for y in np.arange(lo[1] + eps, hi[1] - eps / 2, eps):
            p = np.array([x, y]) + rng.uniform(-jitter, jitter, 2) * eps
            if inside(p, 0.5 * eps):
                pts.append(p)
                markers.append(0)
    pts = np.array(pts)
    tri = Delaunay(pts)
    keep = [t for t in tri.simplices if inside(pts[t].mean(axis=0), 0.0)]
    tris = ccw(pts, np.array(keep))
    used = np.unique(tris)
    assert len(used) == len(pts), "a node is not covered by any triangle"
    cycle = boundary_cycle(tris)
    assert all(markers[v] != 0 for v in cycle), "triangulation boundary leaves the polygon"
    assert sum(1 for m in markers if m != 0) == len(cycle), "boundary node missing from the boundary"
    return pts, markers, tris


def write_mesh(base, pts, markers, tris, one_based):
    off = 1 if one_based else 0
    with open(f"{base}.node", "w") as f:
        f.write(f"# {Path(base).name}\n{len(pts)} 2 0 1\n")
        for i, (p, m) in enumerate(zip(pts, markers)):
            f.write(f"{i + off} {float(p[0])!r} {float(p[1])!r} {m}\n")
    with open(f"{base}.ele", "w") as f:
        f.write(f"{len(tris)} 3 0\n")
        for i, t in enumerate(tris):
            f.write(f"{i + off} {t[0] + off} {t[1] + off} {t[2] + off}\n")


def generate(name, make, seed, outdir, one_based):
    for attempt in range(100):
        rng = np.random.default_rng(seed + attempt)
        pts, markers, tris = make(rng)
        if well_separated(pts, tris):
            write_mesh(str(outdir / name), pts, markers, tris, one_based)
            print(f"{name}: {len(pts)} nodes, {len(tris)} triangles")
            return
    raise RuntimeError(f"could not build a nondegenerate mesh for {name}")


def main():
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent
    square = [(0, 1), (0, 0), (1, 0), (1, 1)]  # sides: left, bottom, right, top
    in_square = lambda p, m: m <= p[0] <= 1 - m and m <= p[1] <= 1 - m
    for k in (4, 8, 10, 16, 32):
        generate(f"square_{k}", lambda rng, k=k: polygon_mesh(square, [1, 2, 3, 4], 1.0 / k, in_square, rng),
                 1000 + k, outdir, one_based=True)

    cross = [(-1, 1), (-1, 0), (0, 0), (0, -1), (1, -1), (1, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2), (0, 1)]
    cross_arcs = [1, 2, 2, 2, 2, 2, 3, 4, 4, 4, 4, 4]

    def in_cross(p, m):
        bar = lambda x, y, x0, x1, y0, y1: x0 + m <= x <= x1 - m and y0 + m <= y <= y1 - m
        return bar(p[0], p[1], -1, 2, 0, 1) or bar(p[0], p[1], 0, 1, -1, 2)

    for k in (4, 8, 16):
        generate(f"cross_{k}", lambda rng, k=k: polygon_mesh(cross, cross_arcs, 1.0 / k, in_cross, rng),
                 2000 + k, outdir, one_based=False)


if __name__ == "__main__":
    main()

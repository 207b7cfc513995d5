"""Generate starting coordinates for the 3-7 crossing test fixtures.

Each knot is written as a closed braid laid around the z axis: braid strands
sit on concentric radial slots and each generator swaps two neighbouring
slots inside its own angular sector, one strand passing above the other.
Braid closures coil around a wide central hole and tighten into poor local
minima, so the closure is first relaxed under short-range vertex repulsion
plus curve tension, resampling to equal arc length after every step. Edges
stay shorter than the closest non-adjacent vertex pair, so no strand can
pass through another. The result is resampled and its knot type is checked
with SnapPy from a planar diagram read off the projection to the xy plane:
hyperbolic knots by their census identification, torus knots by crossing
count after simplification plus a non-hyperbolic exterior (3_1, 5_1 and
7_1 are the only such knots up to seven crossings).

    python3 tools/make_fixtures.py crates/core/tests/fixtures
"""

import math
import sys
from pathlib import Path

import numpy as np

# Braid words: generator i > 0 is sigma_i, i < 0 its inverse.
BRAIDS = {
    "3_1": [1, 1, 1],
    "4_1": [1, -2, 1, -2],
    "5_1": [1] * 5,
    "5_2": [1, 1, 1, 2, -1, 2],
    "6_1": [1, 1, 2, -1, -3, 2, -3],
    "6_2": [1, 1, 1, -2, 1, -2],
    "6_3": [1, 1, -2, 1, -2, -2],
    "7_1": [1] * 7,
    "7_2": [1, 1, 1, 2, -1, 2, 3, -2, 3],
    "7_3": [1, 1, 1, 1, 1, 2, -1, 2],
    "7_4": [1, 1, 2, -1, 2, 2, 3, -2, 3],
    "7_5": [1, 1, 1, 1, 2, -1, 2, 2],
    "7_6": [1, 1, -2, 1, 3, -2, 3],
    "7_7": [1, -2, 1, -2, 3, -2, 3],
}

SLOT_GAP = 1.0
LIFT = 0.6
SAMPLES_PER_SECTOR = 16
BEADS_PER_CROSSING = 50
RELAX_VERTICES = 200
RELAX_STEPS = 15000


def braid_closure(word):
    strands = max(abs(g) for g in word) + 1
    sectors = len(word)
    base = max(3.0, 2.6 * sectors / (2.0 * math.pi))
    dphi = 2.0 * math.pi / sectors
    # Walk the closure strand by strand until it returns to slot 0.
    points = []
    slot = 0
    while True:
        for k, g in enumerate(word):
            i = abs(g) - 1
            for s in range(SAMPLES_PER_SECTOR):
                t = s / SAMPLES_PER_SECTOR
                phi = (k + t) * dphi
                blend = 0.5 * (1.0 - math.cos(math.pi * t))
                if slot == i:
                    r = base + SLOT_GAP * (i + blend)
                    z = LIFT * math.sin(math.pi * t) * (1 if g > 0 else -1)
                elif slot == i + 1:
                    r = base + SLOT_GAP * (i + 1 - blend)
                    z = -LIFT * math.sin(math.pi * t) * (1 if g > 0 else -1)
                else:
                    r = base + SLOT_GAP * slot
                    z = 0.0
                points.append((r * math.cos(phi), r * math.sin(phi), z))
            if slot == i:
                slot = i + 1
            elif slot == i + 1:
                slot = i
        if slot == 0:
            break
    assert len(points) == strands * len(word) * SAMPLES_PER_SECTOR, "closure is not a knot"
    return np.array(points)


def resample(points, beads):
    closed = np.vstack([points, points[:1]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.linspace(0.0, arc[-1], beads, endpoint=False)
    return np.stack([np.interp(targets, arc, closed[:, d]) for d in range(3)], axis=1)


def relax(points, steps=RELAX_STEPS, tension=1.0, power=2.0):
    p = points.copy()
    n = len(p)
    idx = np.arange(n)
    sep = np.abs(idx[:, None] - idx[None])
    far = (np.minimum(sep, n - sep) > 3).astype(float)
    for _ in range(steps):
        diff = p[:, None] - p[None]
        dist = np.linalg.norm(diff, axis=2) + np.eye(n)
        force = ((far / dist ** (power + 2))[:, :, None] * diff).sum(axis=1)
        edges = np.linalg.norm(np.roll(p, -1, axis=0) - p, axis=1)
        force += tension * (np.roll(p, -1, axis=0) + np.roll(p, 1, axis=0) - 2 * p) / edges.mean() ** 2
        dmin = (dist + 1e9 * (1 - far)).min()
        if edges.max() >= 0.7 * dmin:
            raise RuntimeError("relaxation lost its no-passage margin")
        p = p + 0.02 * dmin / np.linalg.norm(force, axis=1).max() * force
        p = resample(p, n)
        p -= p.mean(axis=0)
    return p


def planar_diagram(points):
    """PD code of the projection to the xy plane, over/under from z."""
    n = len(points)
    events = []  # (segment, fraction, crossing id, is_over)
    crossings = []
    for a in range(n):
        p, r = points[a, :2], points[(a + 1) % n, :2] - points[a, :2]
        for b in range(a + 2, n):
            if a == 0 and b == n - 1:
                continue
            q, s = points[b, :2], points[(b + 1) % n, :2] - points[b, :2]
            denom = r[0] * s[1] - r[1] * s[0]
            if abs(denom) < 1e-14:
                continue
            d = q - p
            t = (d[0] * s[1] - d[1] * s[0]) / denom
            u = (d[0] * r[1] - d[1] * r[0]) / denom
            if 0.0 <= t < 1.0 and 0.0 <= u < 1.0:
                za = points[a, 2] + t * (points[(a + 1) % n, 2] - points[a, 2])
                zb = points[b, 2] + u * (points[(b + 1) % n, 2] - points[b, 2])
                cid = len(crossings)
                crossings.append((r, s, za > zb))
                events.append((a + t, cid, za > zb))
                events.append((b + u, cid, zb > za))
    events.sort()
    m = len(events)
    under_in, over_in = {}, {}
    for k, (_, cid, is_over) in enumerate(events):
        (over_in if is_over else under_in)[cid] = k
    pd = []
    for cid, (r, s, a_over) in enumerate(crossings):
        du, do = (s, r) if a_over else (r, s)
        i = under_in[cid]
        j = over_in[cid]
        cross = du[0] * do[1] - du[1] * do[0]
        a, b = i, j
        if cross > 0:
            pd.append([a, b, (a + 1) % m, (b + 1) % m])
        else:
            pd.append([a, (b + 1) % m, (a + 1) % m, b])
    return pd


TORUS = {"3_1", "5_1", "7_1"}


def matches(points, name):
    import snappy

    link = snappy.Link(planar_diagram(points))
    link.simplify("global")
    crossings = len(link.crossings)
    exterior = link.exterior()
    if name in TORUS:
        hyperbolic = exterior.solution_type() == "all tetrahedra positively oriented"
        return crossings == int(name.split("_")[0]) and not hyperbolic, crossings
    found = [str(m) for m in exterior.identify()]
    return any(f.startswith(name + "(") for f in found), crossings


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/fixtures")
    out.mkdir(parents=True, exist_ok=True)
    for name, word in BRAIDS.items():
        cmin = int(name.split("_")[0])
        beads = BEADS_PER_CROSSING * cmin + 50
        start = relax(resample(braid_closure(word), RELAX_VERTICES))
        pts = resample(start, beads)
        ok, crossings = matches(pts, name)
        if not ok:
            raise SystemExit(f"{name}: projection does not match")
        lines = [f"# name={name}", f"# cmin={cmin}", f"# braid={' '.join(map(str, word))}"]
        lines += [f"{x:.16e} {y:.16e} {z:.16e}" for x, y, z in pts]
        (out / f"{name}.txt").write_text("\n".join(lines) + "\n")
        print(name, beads, crossings)


if __name__ == "__main__":
    main()

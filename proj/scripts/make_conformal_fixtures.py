#!/usr/bin/env python3
"""Generate the conformal disk-in-square reference meshes under tests/fixtures/.

Construction: triangulate an n x n grid of the unit square, snap grid nodes
near the circle onto it, split every triangle whose edges cross the circle at
the (projected) intersection points, and tag sub-triangles by centroid:
tag 1 = matrix, tag 2 = inclusion. The interface is the inscribed polygon
through the snapped/intersection nodes, so the mesh is conformal to a
polygonal disk whose boundary error is O(h^2).

Also emits three nested meshes (uniform 4-splits of the coarse fitted mesh,
tags inherited) used by the energy-monotonicity test.
"""

import math
import os
import sys

CX, CY, R = 0.5, 0.5, 0.15
OUT = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures")


def dist(p):
    return math.hypot(p[0] - CX, p[1] - CY)


def build_fitted(n):
    h = 1.0 / n
    nodes = []
    for j in range(n + 1):
        for i in range(n + 1):
            nodes.append([i * h, j * h])

    # snap nodes near the circle radially onto it
    snap = 0.25 * h
    on_circle = [False] * len(nodes)
    for k, p in enumerate(nodes):
        d = dist(p)
        if abs(d - R) < snap and d > 1e-12:
            s = R / d
            nodes[k] = [CX + (p[0] - CX) * s, CY + (p[1] - CY) * s]
            on_circle[k] = True

    tris = []
    for j in range(n):
        for i in range(n):
            a = j * (n + 1) + i
            b = a + 1
            c = a + n + 2
            d_ = a + n + 1
            tris.append([a, b, c])
            tris.append([a, c, d_])

    sign = []
    for k, p in enumerate(nodes):
        if on_circle[k]:
            sign.append(0)
        else:
            sign.append(1 if dist(p) > R else -1)

    cut_cache = {}

    def cut(a, b):
        key = (min(a, b), max(a, b))
        if key in cut_cache:
            return cut_cache[key]
        pa, pb = nodes[a], nodes[b]
        dx, dy = pb[0] - pa[0], pb[1] - pa[1]
        fx, fy = pa[0] - CX, pa[1] - CY
        qa = dx * dx + dy * dy
        qb = 2 * (fx * dx + fy * dy)
        qc = fx * fx + fy * fy - R * R
        disc = qb * qb - 4 * qa * qc
        disc = max(disc, 0.0)
        root = math.sqrt(disc)
        cands = [(-qb - root) / (2 * qa), (-qb + root) / (2 * qa)]
        ts = [t for t in cands if 1e-9 < t < 1 - 1e-9]
        t = ts[0] if ts else max(min(cands[0], 1.0), 0.0)
        p = [pa[0] + t * dx, pa[1] + t * dy]
        dd = dist(p)
        if dd > 1e-12:  # project exactly onto the circle
            s = R / dd
            p = [CX + (p[0] - CX) * s, CY + (p[1] - CY) * s]
        nodes.append(p)
        idx = len(nodes) - 1
        cut_cache[key] = idx
        return idx

    def area(t):
        (x0, y0), (x1, y1), (x2, y2) = nodes[t[0]], nodes[t[1]], nodes[t[2]]
        return 0.5 * ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0))

    def orient(t):
        return t if area(t) > 0 else [t[0], t[2], t[1]]

    out = []
    for t in tris:
        s = [sign[v] for v in t]
        crossing = [e for e in range(3) if s[e] * s[(e + 1) % 3] < 0]
        if not crossing:
            out.append(t)
            continue
        if len(crossing) == 1:
            # one crossing edge, opposite vertex must be on the circle
            e = crossing[0]
            a, b = t[e], t[(e + 1) % 3]
            c = t[(e + 2) % 3]
            m = cut(a, b)
            out.append([a, m, c])
            out.append([m, b, c])
            continue
        # two crossing edges share the lone-sign vertex
        lone = None
        for v in range(3):
            if s[v] != 0 and s[(v + 1) % 3] != s[v] and s[(v + 2) % 3] != s[v]:
                lone = v
                break
        if lone is None:
            out.append(t)
            continue
        a = t[lone]
        b = t[(lone + 1) % 3]
        c = t[(lone + 2) % 3]
        m1 = cut(a, b)
        m2 = cut(a, c)
        out.append([a, m1, m2])
        out.append([m1, b, c])
        out.append([m1, c, m2])

    elements = []
    for t in out:
        t = orient(t)
        assert area(t) > 1e-14, "degenerate triangle in fitted mesh"
        cx = sum(nodes[v][0] for v in t) / 3
        cy = sum(nodes[v][1] for v in t) / 3
        tag = 2 if math.hypot(cx - CX, cy - CY) < R else 1
        elements.append((t, tag))
    return nodes, elements


def refine(nodes, elements):
    nodes = [list(p) for p in nodes]
    mid_cache = {}

    def midpoint(a, b):
        key = (min(a, b), max(a, b))
        if key in mid_cache:
            return mid_cache[key]
        nodes.append([(nodes[a][0] + nodes[b][0]) / 2, (nodes[a][1] + nodes[b][1]) / 2])
        mid_cache[key] = len(nodes) - 1
        return mid_cache[key]

    out = []
    for (a, b, c), tag in elements:
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        out.extend([([a, ab, ca], tag), ([ab, b, bc], tag), ([ca, bc, c], tag),
                    ([ab, bc, ca], tag)])
    return nodes, out


def write_msh(path, nodes, elements):
    with open(path, "w") as f:
        f.write("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n")
        f.write("$Nodes\n%d\n" % len(nodes))
        for i, p in enumerate(nodes):
            f.write("%d %.17g %.17g 0\n" % (i + 1, p[0], p[1]))
        f.write("$EndNodes\n$Elements\n%d\n" % len(elements))
        for i, (t, tag) in enumerate(elements):
            f.write("%d 2 2 %d %d %d %d %d\n" % (i + 1, tag, tag, t[0] + 1, t[1] + 1, t[2] + 1))
        f.write("$EndElements\n")


def main():
    os.makedirs(OUT, exist_ok=True)
    for n in (20, 30, 40, 60):
        nodes, elements = build_fitted(n)
        inc_area = sum(
            0.5 * abs((nodes[t[1]][0] - nodes[t[0]][0]) * (nodes[t[2]][1] - nodes[t[0]][1])
                      - (nodes[t[2]][0] - nodes[t[0]][0]) * (nodes[t[1]][1] - nodes[t[0]][1]))
            for t, tag in elements if tag == 2)
        path = os.path.join(OUT, "disk_d03_n%d.msh" % n)
        write_msh(path, nodes, elements)
        print("n=%2d: %d nodes, %d tris, inclusion area %.6f (exact %.6f)"
              % (n, len(nodes), len(elements), inc_area, math.pi * R * R))

    nodes, elements = build_fitted(10)
    for level in range(3):
        path = os.path.join(OUT, "disk_nested_l%d.msh" % level)
        write_msh(path, nodes, elements)
        print("nested l%d: %d nodes, %d tris" % (level, len(nodes), len(elements)))
        if level < 2:
            nodes, elements = refine(nodes, elements)


if __name__ == "__main__":
    sys.exit(main())

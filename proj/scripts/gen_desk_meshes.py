#!/usr/bin/env python3
"""Generate the desk-scale hex8 meshes shipped in data/.

  regions.mesh  Extruded O-grid between a production well (radius 1) and a
                far-field circle (radius 100). Elements with centroid x < D
                are region 1 (A), the rest region 2 (B); D is the distance
                from the well axis to the straight interface.
  leakage.mesh  Two aquifers separated by a void aquitard. An injection well
                (inlet facets on top of aquifer A) and an abandoned well column
                (the only cells in the aquitard) sit on the x axis. Regions:
                1 aquifer A, 2 aquifer B, 3 abandoned well cells.

Output uses the plain-text mesh format read by porodarcy::read_mesh.

    python3 scripts/gen_desk_meshes.py [output_dir]
"""

import math
import os
import sys

# regions problem
WELL_RADIUS = 1.0
FARFIELD_RADIUS = 100.0
INTERFACE_X = 5.0
N_RADIAL = 24
N_ANGULAR = 48
THICKNESS = 2.0

# leakage problem
HALF_WIDTH = 25.0
WELL_SPACING = 5.0
INJECTION_WELL = (0.0, 3, 0.3)          # centre x, cells across, cell size
ABANDONED_WELL = (WELL_SPACING, 5, 0.3)
GROWTH = 1.5
AQUIFER_LAYERS = [(0.0, 0.5), (0.5, 1.0)]    # aquifer A
AQUITARD_LAYERS = [(1.0, 1.5), (1.5, 2.0)]   # void except the abandoned well
AQUIFER_B_LAYERS = [(2.0, 2.5), (2.5, 3.0)]  # aquifer B

# hex8 local facets: z-, z+, y-, x+, y+, x-
HEX_FACETS = [(0, 3, 2, 1), (4, 5, 6, 7), (0, 1, 5, 4), (1, 2, 6, 5), (2, 3, 7, 6), (3, 0, 4, 7)]


def write_mesh(path, nodes, elems, facet_sets, regions):
    with open(path, "w") as out:
        out.write(f"3 {len(nodes)} {len(elems)}\n")
        for x, y, z in nodes:
            out.write(f"{x:.17g} {y:.17g} {z:.17g}\n")
        for e in elems:
            out.write("hex8 " + " ".join(str(i) for i in e) + "\n")
        for name in sorted(facet_sets):
            facets = facet_sets[name]
            out.write(f"facetset {name} {len(facets)}\n")
            for e, f in facets:
                out.write(f"{e} {f}\n")
        out.write("regions\n")
        for i in range(0, len(regions), 20):
            out.write(" ".join(str(t) for t in regions[i:i + 20]) + "\n")


def centroid(nodes, elem):
    return [sum(nodes[i][k] for i in elem) / 8.0 for k in range(3)]


def regions_mesh():
    ratio = (FARFIELD_RADIUS / WELL_RADIUS) ** (1.0 / N_RADIAL)
    radii = [WELL_RADIUS * ratio ** i for i in range(N_RADIAL + 1)]
    radii[-1] = FARFIELD_RADIUS
    zs = [0.0, THICKNESS]
    nodes = []
    for k, z in enumerate(zs):
        for j in range(N_ANGULAR):
            theta = 2.0 * math.pi * j / N_ANGULAR
            for r in radii:
                nodes.append((r * math.cos(theta), r * math.sin(theta), z))

    def nid(i, j, k):
        return (k * N_ANGULAR + (j % N_ANGULAR)) * (N_RADIAL + 1) + i

    elems, regions = [], []
    sets = {"well": [], "farfield_A": [], "farfield_B": [], "top": [], "bottom": []}
    for j in range(N_ANGULAR):
        for i in range(N_RADIAL):
            e = len(elems)
            elem = [nid(i, j, 0), nid(i + 1, j, 0), nid(i + 1, j + 1, 0), nid(i, j + 1, 0),
                    nid(i, j, 1), nid(i + 1, j, 1), nid(i + 1, j + 1, 1), nid(i, j + 1, 1)]
            elems.append(elem)
            tag = 1 if centroid(nodes, elem)[0] < INTERFACE_X else 2
            regions.append(tag)
            sets["bottom"].append((e, 0))
            sets["top"].append((e, 1))
            if i == 0:
                sets["well"].append((e, 5))
            if i == N_RADIAL - 1:
                sets["farfield_A" if tag == 1 else "farfield_B"].append((e, 3))
    return nodes, elems, sets, regions


def graded_gap(a, b, h0_left, h0_right):
    """Interior node coordinates strictly between a and b, growing away from
    the ends that carry a fine cell size (None = no refinement at that end)."""
    length = b - a
    if h0_left is not None and h0_right is not None:
        half = graded_gap(a, a + 0.5 * length, h0_left, None)
        other = graded_gap(a + 0.5 * length, b, None, h0_right)
        return half + [a + 0.5 * length] + other
    h0 = h0_left if h0_left is not None else h0_right
    sizes, total = [], 0.0
    h = h0
    while total + h < length - 1e-12:
        sizes.append(h)
        total += h
        h *= GROWTH
    # stretch so the cells fill the gap exactly
    scale = length / total if sizes else 1.0
    sizes = [s * scale for s in sizes] if sizes else [length]
    if h0_left is None:
        sizes.reverse()
    coords, x = [], a
    for s in sizes[:-1]:
        x += s
        coords.append(x)
    return coords


def graded_axis(lo, hi, wells):
    """Axis through well footprints of uniform cells, (centre, cells, size)."""
    coords = [lo]
    prev_end, prev_fine = lo, None
    for c, cells, size in sorted(wells):
        start = c - 0.5 * cells * size
        coords += graded_gap(prev_end, start, prev_fine, size)
        coords += [start + size * i for i in range(cells + 1)]
        prev_end, prev_fine = c + 0.5 * cells * size, size
    coords += graded_gap(prev_end, hi, prev_fine, None) + [hi]
    return coords


def leakage_mesh():
    xs = graded_axis(-HALF_WIDTH, HALF_WIDTH, [INJECTION_WELL, ABANDONED_WELL])
    # both wells sit on y = 0; the wider footprint also resolves the narrower one
    ys = graded_axis(-HALF_WIDTH, HALF_WIDTH, [(0.0,) + ABANDONED_WELL[1:]])
    layers = AQUIFER_LAYERS + AQUITARD_LAYERS + AQUIFER_B_LAYERS
    zs = [layers[0][0]] + [top for _, top in layers]
    def in_well(cx, cy, well):
        half = 0.5 * well[1] * well[2]
        return abs(cx - well[0]) < half and abs(cy) < half

    n_a, n_t = len(AQUIFER_LAYERS), len(AQUITARD_LAYERS)
    cells = []  # (i, j, k, region, below the injection inlet)
    for k in range(len(layers)):
        for j in range(len(ys) - 1):
            for i in range(len(xs) - 1):
                cx, cy = 0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])
                abandoned = in_well(cx, cy, ABANDONED_WELL)
                if n_a <= k < n_a + n_t and not abandoned:
                    continue
                tag = 3 if abandoned else 1 if k < n_a else 2
                cells.append((i, j, k, tag, in_well(cx, cy, INJECTION_WELL)))

    node_index = {}
    nodes = []

    def nid(i, j, k):
        key = (i, j, k)
        if key not in node_index:
            node_index[key] = len(nodes)
            nodes.append((xs[i], ys[j], zs[k]))
        return node_index[key]

    elems, regions = [], []
    for i, j, k, tag, _ in cells:
        elems.append([nid(i, j, k), nid(i + 1, j, k), nid(i + 1, j + 1, k), nid(i, j + 1, k),
                      nid(i, j, k + 1), nid(i + 1, j, k + 1), nid(i + 1, j + 1, k + 1), nid(i, j + 1, k + 1)])
        regions.append(tag)

    count = {}
    for elem in elems:
        for f in HEX_FACETS:
            key = tuple(sorted(elem[a] for a in f))
            count[key] = count.get(key, 0) + 1

    z_top_a, z_bottom_b = zs[n_a], zs[n_a + n_t]
    sets = {name: [] for name in ["farfield_A", "farfield_B", "bottom", "top", "inlet", "aquitard_A",
                                  "aquitard_B", "well_sides"]}
    for e, (elem, (i, j, k, tag, injection)) in enumerate(zip(elems, cells)):
        for f, local in enumerate(HEX_FACETS):
            key = tuple(sorted(elem[a] for a in local))
            if count[key] != 1:
                continue
            fz = sum(nodes[elem[a]][2] for a in local) / 4.0
            if f in (2, 3, 4, 5):
                if k < n_a:
                    sets["farfield_A"].append((e, f))
                elif k >= n_a + n_t:
                    sets["farfield_B"].append((e, f))
                else:
                    sets["well_sides"].append((e, f))
            elif abs(fz - zs[0]) < 1e-12:
                sets["bottom"].append((e, f))
            elif abs(fz - zs[-1]) < 1e-12:
                sets["top"].append((e, f))
            elif abs(fz - z_top_a) < 1e-12:
                sets["inlet" if injection else "aquitard_A"].append((e, f))
            elif abs(fz - z_bottom_b) < 1e-12:
                sets["aquitard_B"].append((e, f))
            else:
                raise RuntimeError(f"unclassified boundary facet {e} {f}")
    return nodes, elems, sets, regions


def main():
    out_dir = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "data")
    os.makedirs(out_dir, exist_ok=True)
    for name, build in (("regions.mesh", regions_mesh), ("leakage.mesh", leakage_mesh)):
        nodes, elems, sets, regions = build()
        write_mesh(os.path.join(out_dir, name), nodes, elems, sets, regions)
        print(f"{name}: {len(nodes)} nodes, {len(elems)} hex8 elements")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
# Copyright 2026 The facetrack Authors
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
"""Generates core/data/candide3.wfm, the wireframe bundled with facetrack.

The mesh uses the Candide-3 topology budget (113 vertices, 168 triangles) and
the Candide .wfm text layout, so the official candide3.wfm can be dropped in
instead. Coordinates follow the Candide convention: x to the subject's left
(image right), y up, z towards the viewer.

A convex outline of 56 vertices plus 57 interior vertices triangulates to
2*113 - 56 - 2 = 168 triangles.
"""

import math
import sys

import numpy as np
from scipy.spatial import Delaunay

N_OUTLINE = 56
UPPER_B = 1.15
LOWER_B = 1.35
HALF_WIDTH = 1.0


def outline():
    pts = []
    for k in range(N_OUTLINE):
        t = 2.0 * math.pi * k / N_OUTLINE
        b = UPPER_B if math.sin(t) >= 0 else LOWER_B
        pts.append((HALF_WIDTH * math.cos(t), b * math.sin(t)))
    return pts


# Landmark ordinals 0..25, image-left first.
LANDMARKS = [
    ("brow_left_outer", (-0.62, 0.50)),
    ("brow_left_inner", (-0.16, 0.46)),
    ("brow_right_inner", (0.16, 0.46)),
    ("brow_right_outer", (0.62, 0.50)),
    ("eye_left_outer", (-0.56, 0.24)),
    ("eye_left_inner", (-0.20, 0.24)),
    ("eye_left_upper", (-0.38, 0.31)),
    ("eye_left_lower", (-0.38, 0.18)),
    ("eye_right_inner", (0.20, 0.24)),
    ("eye_right_outer", (0.56, 0.24)),
    ("eye_right_upper", (0.38, 0.31)),
    ("eye_right_lower", (0.38, 0.18)),
    ("nose_bridge", (0.0, 0.10)),
    ("nose_tip", (0.0, -0.18)),
    ("nose_left_ala", (-0.16, -0.27)),
    ("nose_right_ala", (0.16, -0.27)),
    ("mouth_left_corner", (-0.33, -0.62)),
    ("mouth_right_corner", (0.33, -0.62)),
    ("lip_upper_outer", (0.0, -0.51)),
    ("lip_lower_outer", (0.0, -0.78)),
    ("lip_upper_inner", (0.0, -0.59)),
    ("lip_lower_inner", (0.0, -0.655)),
    ("lip_upper_left", (-0.17, -0.535)),
    ("lip_upper_right", (0.17, -0.535)),
]
# The two contour landmarks are outline vertices on the cheeks.
CONTOUR_T = [math.radians(180 + 14), math.radians(-14)]

FILLER = [
    # forehead
    (-0.55, 0.95), (0.0, 1.0), (0.55, 0.95),
    (-0.75, 0.72), (-0.30, 0.75), (0.30, 0.75), (0.75, 0.72),
    # brow middles, glabella
    (-0.39, 0.53), (0.39, 0.53), (0.0, 0.40),
    # temples and outer eye region
    (-0.80, 0.30), (0.80, 0.30),
    # under the eyes
    (-0.44, 0.06), (0.44, 0.06), (-0.22, 0.08), (0.22, 0.08),
    # nose sides
    (-0.09, -0.06), (0.09, -0.06), (0.0, -0.34),
    # cheeks
    (-0.70, 0.02), (0.70, 0.02), (-0.55, -0.22), (0.55, -0.22),
    (-0.78, -0.45), (0.78, -0.45),
    # nasolabial
    (-0.32, -0.40), (0.32, -0.40),
    # lower lip sides, chin
    (-0.17, -0.73), (0.17, -0.73),
    (-0.50, -0.82), (0.50, -0.82), (0.0, -0.98),
    (-0.28, -1.02),
]


def depth(x, y):
    a, b, y0, d = 1.02, 1.42, -0.05, 1.4
    r = 1.0 - (x / a) ** 2 - ((y - y0) / b) ** 2
    z = d * math.sqrt(max(r, 0.0))
    z += 0.30 * math.exp(-((x / 0.12) ** 2) - ((y + 0.16) / 0.30) ** 2)
    z += 0.06 * math.exp(-((x / 0.20) ** 2) - ((y - 0.05) / 0.25) ** 2)
    for ex in (-0.38, 0.38):
        z -= 0.07 * math.exp(-(((x - ex) / 0.18) ** 2) - ((y - 0.24) / 0.10) ** 2)
    z += 0.05 * math.exp(-((x / 0.30) ** 2) - ((y + 0.64) / 0.12) ** 2)
    z += 0.04 * math.exp(-((x / 0.25) ** 2) - ((y + 0.98) / 0.12) ** 2)
    return z


def main(out_path):
    pts = outline()
    contour_idx = []
    for t in CONTOUR_T:
        k = round(t / (2 * math.pi) * N_OUTLINE) % N_OUTLINE
        contour_idx.append(k)
    landmark_idx = []
    for _, p in LANDMARKS:
        landmark_idx.append(len(pts))
        pts.append(p)
    landmark_idx += contour_idx
    fill = list(FILLER)
    assert len(pts) + len(fill) == 113, len(pts) + len(fill)
    pts += fill
    xy = np.array(pts)
    tri = Delaunay(xy)
    hull = set(tri.convex_hull.flatten().tolist())
    assert hull == set(range(N_OUTLINE)), sorted(hull ^ set(range(N_OUTLINE)))
    faces = []
    for a, b, c in tri.simplices:
        pa, pb, pc = xy[a], xy[b], xy[c]
        cross = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0])
        # counter-clockwise seen from the viewer (+z)
        faces.append((a, b, c) if cross > 0 else (a, c, b))
    assert len(faces) == 168, len(faces)
    verts = [(x, y, depth(x, y)) for x, y in pts]

    names = {i: n for (n, _), i in zip(LANDMARKS, landmark_idx)}
    names[contour_idx[0]] = "cheek_left"
    names[contour_idx[1]] = "cheek_right"
    by_name = {v: k for k, v in names.items()}

    def near(cx, cy, rx, ry):
        sel = []
        for i, (x, y, _) in enumerate(verts):
            w = math.exp(-(((x - cx) / rx) ** 2) - ((y - cy) / ry) ** 2)
            if w > 0.05:
                sel.append((i, w))
        return sel

    def unit(entries):
        return sorted((i, d) for i, d in entries)

    def vec(i, dx, dy, dz=0.0):
        return (i, (dx, dy, dz))

    brow_l = ["brow_left_outer", "brow_left_inner"]
    brow_r = ["brow_right_inner", "brow_right_outer"]
    brow_mid = [i for i, (x, y, _) in enumerate(verts) if abs(abs(x) - 0.39) < 1e-9 and abs(y - 0.53) < 1e-9]
    brows = [by_name[n] for n in brow_l + brow_r] + brow_mid

    anim = []
    # 0 upper lip raiser
    anim.append(("Upper lip raiser", unit([
        vec(by_name["lip_upper_outer"], 0, 0.08, 0.02),
        vec(by_name["lip_upper_inner"], 0, 0.08, 0.01),
        vec(by_name["lip_upper_left"], 0, 0.07, 0.02),
        vec(by_name["lip_upper_right"], 0, 0.07, 0.02),
    ])))
    # 1 jaw drop
    jaw = [by_name[n] for n in ("lip_lower_outer", "lip_lower_inner")]
    jaw += [i for i, (x, y, _) in enumerate(verts) if y < -0.70 and i >= N_OUTLINE]
    jaw += [i for i in range(N_OUTLINE) if verts[i][1] < -1.0]
    jaw_entries = []
    for i in sorted(set(jaw)):
        w = 1.0 if verts[i][1] < -0.6 else 0.5
        jaw_entries.append(vec(i, 0, -0.16 * w, -0.02 * w))
    anim.append(("Jaw drop", unit(jaw_entries)))
    # 2 lip stretcher
    anim.append(("Lip stretcher", unit([
        vec(by_name["mouth_left_corner"], -0.09, 0, -0.01),
        vec(by_name["mouth_right_corner"], 0.09, 0, -0.01),
        vec(by_name["lip_upper_left"], -0.04, 0, 0),
        vec(by_name["lip_upper_right"], 0.04, 0, 0),
    ])))
    # 3 brow lowerer
    entries = []
    for i in brows:
        x = verts[i][0]
        entries.append(vec(i, -0.02 * math.copysign(1, x) if abs(x) < 0.3 else 0.0, -0.09, 0))
    anim.append(("Brow lowerer", unit(entries)))
    # 4 lip corner depressor
    anim.append(("Lip corner depressor", unit([
        vec(by_name["mouth_left_corner"], 0, -0.08, 0),
        vec(by_name["mouth_right_corner"], 0, -0.08, 0),
    ])))
    # 5 outer brow raiser
    anim.append(("Outer brow raiser", unit([
        vec(by_name["brow_left_outer"], 0, 0.10, 0),
        vec(by_name["brow_right_outer"], 0, 0.10, 0),
        vec(brow_mid[0], 0, 0.05, 0),
        vec(brow_mid[1], 0, 0.05, 0),
    ])))
    # 6 eyes closed
    anim.append(("Eyes closed", unit([
        vec(by_name["eye_left_upper"], 0, -0.12, 0),
        vec(by_name["eye_right_upper"], 0, -0.12, 0),
    ])))
    # 7 lid tightener
    anim.append(("Lid tightener", unit([
        vec(by_name["eye_left_lower"], 0, 0.05, 0),
        vec(by_name["eye_right_lower"], 0, 0.05, 0),
    ])))
    # 8 nose wrinkler
    anim.append(("Nose wrinkler", unit([
        vec(by_name["nose_left_ala"], 0, 0.04, 0),
        vec(by_name["nose_right_ala"], 0, 0.04, 0),
        vec(by_name["nose_tip"], 0, 0.02, 0),
        vec(by_name["lip_upper_outer"], 0, 0.03, 0),
    ])))
    # 9 lip presser
    anim.append(("Lip presser", unit([
        vec(by_name["lip_upper_inner"], 0, -0.02, 0),
        vec(by_name["lip_lower_inner"], 0, 0.02, 0),
        vec(by_name["lip_upper_outer"], 0, -0.02, -0.01),
        vec(by_name["lip_lower_outer"], 0, 0.03, -0.01),
    ])))

    def region(cx, cy, rx, ry, dx, dy, dz, mirror=False):
        out = []
        for i, w in near(cx, cy, rx, ry):
            out.append(vec(i, dx * w, dy * w, dz * w))
        if mirror:
            for i, w in near(-cx, cy, rx, ry):
                out.append(vec(i, -dx * w, dy * w, dz * w))
        return merge(out)

    def merge(entries):
        acc = {}
        for i, d in entries:
            p = acc.get(i, (0.0, 0.0, 0.0))
            acc[i] = (p[0] + d[0], p[1] + d[1], p[2] + d[2])
        return sorted(acc.items())

    shape = []
    shape.append(("Head height", merge(
        [vec(i, 0, 0.10 * max(0.0, y) / UPPER_B, 0) for i, (x, y, z) in enumerate(verts) if y > 0.6])))
    shape.append(("Eyebrows vertical pos", region(-0.39, 0.50, 0.30, 0.08, 0, 0.06, 0, mirror=True)))
    shape.append(("Eyes vertical pos", region(-0.38, 0.24, 0.22, 0.09, 0, 0.05, 0, mirror=True)))
    shape.append(("Eyes width", merge([
        vec(by_name["eye_left_outer"], -0.05, 0, 0), vec(by_name["eye_right_outer"], 0.05, 0, 0)])))
    shape.append(("Eyes height", merge([
        vec(by_name["eye_left_upper"], 0, 0.03, 0), vec(by_name["eye_right_upper"], 0, 0.03, 0),
        vec(by_name["eye_left_lower"], 0, -0.02, 0), vec(by_name["eye_right_lower"], 0, -0.02, 0)])))
    shape.append(("Eye separation distance", region(-0.38, 0.24, 0.22, 0.09, -0.05, 0, 0, mirror=True)))
    shape.append(("Cheeks z", region(-0.62, -0.20, 0.25, 0.25, 0, 0, 0.08, mirror=True)))
    shape.append(("Nose z extension", region(0.0, -0.16, 0.14, 0.30, 0, 0, 0.10)))
    shape.append(("Nose vertical position", region(0.0, -0.22, 0.22, 0.16, 0, 0.05, 0)))
    shape.append(("Mouth vertical position", region(0.0, -0.64, 0.38, 0.16, 0, 0.06, 0)))
    shape.append(("Mouth width", merge([
        vec(by_name["mouth_left_corner"], -0.06, 0, 0), vec(by_name["mouth_right_corner"], 0.06, 0, 0),
        vec(by_name["lip_upper_left"], -0.03, 0, 0), vec(by_name["lip_upper_right"], 0.03, 0, 0)])))
    shape.append(("Chin width", merge(
        [vec(i, 0.08 * x, 0, 0) for i, (x, y, z) in enumerate(verts) if y < -0.75])))

    with open(out_path, "w") as f:
        f.write("# facetrack bundled face wireframe, Candide-3 .wfm layout\n")
        f.write("# 113 vertices, 168 triangles, 10 animation units, 12 shape units\n")
        f.write("# generated by tools/wireframe/generate_wireframe.py\n")
        f.write("#\n# Landmark vertices (ordinal: vertex name):\n")
        for o, i in enumerate(landmark_idx):
            f.write(f"#   {o}: {i} {names[i]}\n")
        f.write("#\n# VERTEX LIST:\n")
        f.write(f"{len(verts)}\n")
        for x, y, z in verts:
            f.write(f"{x:.6f} {y:.6f} {z:.6f}\n")
        f.write("# FACE LIST:\n")
        f.write(f"{len(faces)}\n")
        for a, b, c in faces:
            f.write(f"{a} {b} {c}\n")
        for title, units, prefix in (("ANIMATION UNITS LIST", anim, "AUV"), ("SHAPE UNITS LIST", shape, "SU")):
            f.write(f"# {title}:\n{len(units)}\n")
            for k, (name, entries) in enumerate(units):
                f.write(f"\n# {prefix}{k} {name}\n{len(entries)}\n")
                for i, (dx, dy, dz) in entries:
                    f.write(f"{i} {dx:.6f} {dy:.6f} {dz:.6f}\n")
        f.write("# END OF FILE\n")
    print("landmarks:", landmark_idx)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "core/data/candide3.wfm")

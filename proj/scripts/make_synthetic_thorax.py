#!/usr/bin/env python3
"""Generate the synthetic thorax fixture (OBJ meshes + manifest).

Coordinates in mm: x lateral (+x is the operated side), y anterior, z cranial.
Output is deterministic.
"""
import argparse
import json
import math
from pathlib import Path

SKIN_A, SKIN_B = 175.0, 125.0      # elliptic cross-section half axes
SKIN_Z = (-250.0, 250.0)
SKIN_SEGMENTS = 36                 # 10 degree columns
SKIN_ROW_MM = 20.0

RIB_INSET = 18.0
RIB_RADIUS = 6.0
RIB_PITCH = 55.0
RIB_Z0 = -230.0

CONVERGENT = (-40.0, 10.0, 20.0)


def ellipse(a, b, t):
    return a * math.cos(t), b * math.sin(t)


def write_obj(path, verts, tris, comment):
    with open(path, "w") as f:
        f.write(f"# {comment}\n")
        for v in verts:
            f.write("v {:.6f} {:.6f} {:.6f}\n".format(*v))
        for t in tris:
            f.write("f {} {} {}\n".format(t[0] + 1, t[1] + 1, t[2] + 1))


def skin():
    """Capped elliptic cylinder. Lateral triangles come first, ordered by
    row (z ascending) then column (angle ascending), two per quad."""
    rows = int(round((SKIN_Z[1] - SKIN_Z[0]) / SKIN_ROW_MM))
    n = SKIN_SEGMENTS
    verts = []
    for r in range(rows + 1):
        z = SKIN_Z[0] + r * SKIN_ROW_MM
        for c in range(n):
            x, y = ellipse(SKIN_A, SKIN_B, 2 * math.pi * c / n)
            verts.append((x, y, z))
    tris = []
    for r in range(rows):
        for c in range(n):
            a = r * n + c
            b = r * n + (c + 1) % n
            d = (r + 1) * n + c
            e = (r + 1) * n + (c + 1) % n
            tris.append((a, b, e))
            tris.append((a, e, d))
    bottom = len(verts)
    verts.append((0.0, 0.0, SKIN_Z[0]))
    top = len(verts)
    verts.append((0.0, 0.0, SKIN_Z[1]))
    for c in range(n):
        tris.append((bottom, (c + 1) % n, c))
        tris.append((top, rows * n + c, rows * n + (c + 1) % n))
    return verts, tris


def lateral_triangle_centroid(verts, tris, i):
    p = [verts[k] for k in tris[i]]
    return tuple(sum(q[j] for q in p) / 3.0 for j in range(3))


def region(verts, tris, theta_deg, z_range):
    out = []
    lateral = 2 * SKIN_SEGMENTS * int(round((SKIN_Z[1] - SKIN_Z[0]) / SKIN_ROW_MM))
    for i in range(lateral):
        x, y, z = lateral_triangle_centroid(verts, tris, i)
        th = math.degrees(math.atan2(y / SKIN_B, x / SKIN_A))
        if theta_deg[0] <= th <= theta_deg[1] and z_range[0] <= z <= z_range[1]:
            out.append(i)
    return out


def tube_ring(a, b, z, radius, ring_segments=72, tube_segments=8):
    """Closed torus following an elliptic ring at height z."""
    verts, tris = [], []
    for i in range(ring_segments):
        t = 2 * math.pi * i / ring_segments
        cx, cy = ellipse(a, b, t)
        tx, ty = -a * math.sin(t), b * math.cos(t)
        tl = math.hypot(tx, ty)
        nx, ny = ty / tl, -tx / tl   # outward in-plane normal
        for j in range(tube_segments):
            s = 2 * math.pi * j / tube_segments
            verts.append((cx + radius * math.cos(s) * nx, cy + radius * math.cos(s) * ny,
                          z + radius * math.sin(s)))
    for i in range(ring_segments):
        for j in range(tube_segments):
            a0 = i * tube_segments + j
            a1 = i * tube_segments + (j + 1) % tube_segments
            b0 = ((i + 1) % ring_segments) * tube_segments + j
            b1 = ((i + 1) % ring_segments) * tube_segments + (j + 1) % tube_segments
            tris.append((a0, b0, b1))
            tris.append((a0, b1, a1))
    return verts, tris


def merge(parts):
    verts, tris = [], []
    for v, t in parts:
        off = len(verts)
        verts.extend(v)
        tris.extend(tuple(k + off for k in tri) for tri in t)
    return verts, tris


def box(lo, hi):
    x0, y0, z0 = lo
    x1, y1, z1 = hi
    verts = [(x0, y0, z0), (x1, y0, z0), (x1, y1, z0), (x0, y1, z0),
             (x0, y0, z1), (x1, y0, z1), (x1, y1, z1), (x0, y1, z1)]
    tris = [(0, 2, 1), (0, 3, 2), (4, 5, 6), (4, 6, 7), (0, 1, 5), (0, 5, 4),
            (2, 3, 7), (2, 7, 6), (1, 2, 6), (1, 6, 5), (3, 0, 4), (3, 4, 7)]
    return verts, tris


def cylinder(p0, p1, radius, segments=16):
    """Closed cylinder between two points."""
    ax = [p1[i] - p0[i] for i in range(3)]
    length = math.sqrt(sum(c * c for c in ax))
    ax = [c / length for c in ax]
    ref = (1.0, 0.0, 0.0) if abs(ax[0]) < 0.9 else (0.0, 1.0, 0.0)
    u = [ax[1] * ref[2] - ax[2] * ref[1], ax[2] * ref[0] - ax[0] * ref[2], ax[0] * ref[1] - ax[1] * ref[0]]
    ul = math.sqrt(sum(c * c for c in u))
    u = [c / ul for c in u]
    w = [ax[1] * u[2] - ax[2] * u[1], ax[2] * u[0] - ax[0] * u[2], ax[0] * u[1] - ax[1] * u[0]]
    verts = []
    for end in (p0, p1):
        for s in range(segments):
            t = 2 * math.pi * s / segments
            verts.append(tuple(end[i] + radius * (math.cos(t) * u[i] + math.sin(t) * w[i]) for i in range(3)))
    verts.append(tuple(p0))
    verts.append(tuple(p1))
    c0, c1 = 2 * segments, 2 * segments + 1
    tris = []
    for s in range(segments):
        a, b = s, (s + 1) % segments
        tris.append((a, b, segments + b))
        tris.append((a, segments + b, segments + a))
        tris.append((c0, b, a))
        tris.append((c1, segments + a, segments + b))
    return verts, tris


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", type=Path, nargs="?", default=Path(__file__).resolve().parent.parent
                    / "fixtures" / "synthetic_thorax")
    args = ap.parse_args()
    out = args.out
    out.mkdir(parents=True, exist_ok=True)

    sv, st = skin()
    write_obj(out / "skin.obj", sv, st, "synthetic thorax skin")

    ribs = []
    z = RIB_Z0
    while z <= SKIN_Z[1] - 20.0:
        ribs.append(tube_ring(SKIN_A - RIB_INSET, SKIN_B - RIB_INSET, z, RIB_RADIUS))
        z += RIB_PITCH
    write_obj(out / "ribs.obj", *merge(ribs), "rib rings")

    write_obj(out / "vertebra.obj", *box((-20.0, -110.0, -240.0), (20.0, -70.0, 240.0)),
              "vertebral column")
    write_obj(out / "scapula.obj", *box((60.0, -112.0, 60.0), (140.0, -100.0, 200.0)),
              "scapula plate")
    write_obj(out / "trachea.obj", *cylinder((0.0, 30.0, 100.0), (0.0, 30.0, 245.0), 10.0),
              "trachea")
    vessels = [cylinder((-30.0, 0.0, 40.0), (-30.0, 0.0, 180.0), 8.0),
               cylinder((-30.0, 0.0, 60.0), (-90.0, 10.0, 20.0), 5.0)]
    write_obj(out / "vasculature.obj", *merge(vessels), "pulmonary vessels")

    manifest = {
        "meshes": [
            {"path": "skin.obj", "role": "skin", "name": "skin"},
            {"path": "ribs.obj", "role": "rib", "name": "ribs"},
            {"path": "vertebra.obj", "role": "vertebra", "name": "vertebra"},
            {"path": "scapula.obj", "role": "scapula", "name": "scapula"},
            {"path": "trachea.obj", "role": "trachea", "name": "trachea"},
            {"path": "vasculature.obj", "role": "vasculature", "name": "vasculature"},
        ],
        "convergent_point_mm": list(CONVERGENT),
        "tool_entry_region": region(sv, st, TOOL_THETA, TOOL_Z),
        "camera_entry_region": region(sv, st, CAMERA_THETA, CAMERA_Z),
        "defaults": {"spacing_mm": 15.0, "reach_mm": 280.0, "half_angle_deg": 20.0, "fov_deg": 60.0,
                     "tilt_deg": 30.0, "aim_tol_mm": 5.0, "capsule_radius_mm": 5.0},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


TOOL_THETA = (-30.0, 70.0)
TOOL_Z = (-170.0, -90.0)
CAMERA_THETA = (-80.0, -40.0)
CAMERA_Z = (-70.0, 10.0)

if __name__ == "__main__":
    main()

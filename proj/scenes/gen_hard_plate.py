"""Writes hard_plate_depth.pfm / hard_plate_mask.pgm: five wedge-shaped
portions filling about 80% of the plate face (128 x 128 px, 0.24 m square,
centred on the plate)."""
import math
import struct

N, EXTENT = 128, 0.24
PITCH = EXTENT / N
R_OUT, GAP, EDGE = 0.097, 0.003, 0.004
# (label, peak height m, dome exponent); wedges start at +x and go counter-clockwise.
ITEMS = [(1, 0.020, 0.0), (2, 0.025, 1.0), (3, 0.010, 0.0), (4, 0.015, 0.0), (5, 0.018, 0.5)]


def sample(x, z):
    r = math.hypot(x, z)
    if r >= R_OUT:
        return 0, 0.0
    ang = math.atan2(z, x) % (2 * math.pi)
    span = 2 * math.pi / len(ITEMS)
    k = int(ang // span)
    # Distance to the two radial cuts and to the outer arc.
    off = min(ang - k * span, (k + 1) * span - ang)
    d = min(r * math.sin(off) if off < math.pi / 2 else r, R_OUT - r) - 0.5 * GAP
    if d <= 0:
        return 0, 0.0
    label, peak, dome = ITEMS[k]
    h = peak * math.sqrt(min(1.0, d / EDGE)) * (1.0 - dome * 0.5 * (r / R_OUT) ** 2)
    return label, h


depth, mask = [], []
for v in range(N):
    for u in range(N):
        x = (u + 0.5) * PITCH - 0.5 * EXTENT
        z = (v + 0.5) * PITCH - 0.5 * EXTENT
        label, h = sample(x, z)
        mask.append(label)
        depth.append(h)

with open("hard_plate_depth.pfm", "wb") as f:
    f.write(b"Pf\n%d %d\n-1.0\n" % (N, N))
    for v in reversed(range(N)):
        f.write(struct.pack("<%df" % N, *depth[v * N:(v + 1) * N]))
with open("hard_plate_mask.pgm", "wb") as f:
    f.write(b"P5\n%d %d\n255\n" % (N, N))
    f.write(bytes(mask))

covered = sum(1 for m in mask if m) * PITCH * PITCH
print("coverage of plate face: %.3f" % (covered / (math.pi * 0.105 ** 2)))

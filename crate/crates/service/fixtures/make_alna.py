"""Regenerates the synthetic Alna (Oslo) fixture set.

Everything is deterministic; run from any directory:
    python3 crates/service/fixtures/make_alna.py
"""

import json
import math
import struct
import zlib
from pathlib import Path

OUT = Path(__file__).resolve().parent / "alna"

# DEM footprint: 1 arc-second cells, a little larger than the place polygon.
CELL = 1.0 / 3600.0
WEST, NORTH = 10.83, 59.945
COLS, ROWS = 216, 116
NODATA = -9999.0

# Place polygon extremes (its envelope is the query bbox).
PLACE = [
    (10.835, 59.921), (10.852, 59.918), (10.874, 59.919), (10.885, 59.927),
    (10.881, 59.937), (10.860, 59.940), (10.842, 59.936),
]


def elevation(row, col):
    lon = WEST + (col + 0.5) * CELL
    lat = NORTH - (row + 0.5) * CELL
    u, v = (lon - 10.83) * 120.0, (lat - 59.913) * 200.0
    return 95.0 + 45.0 * math.sin(u) * math.cos(v) + 18.0 * math.cos(1.7 * u + 0.4) + 12.0 * v


def dem_values():
    vals = []
    for r in range(ROWS):
        for c in range(COLS):
            # a small gap in the north-west corner, outside the place polygon
            if 2 <= r <= 4 and 2 <= c <= 5:
                vals.append(NODATA)
            else:
                vals.append(round(elevation(r, c), 2))
    return vals


def write_geotiff(path, vals):
    rows_per_strip = 16
    strips = []
    for start in range(0, ROWS, rows_per_strip):
        chunk = vals[start * COLS:min(ROWS, start + rows_per_strip) * COLS]
        strips.append(zlib.compress(struct.pack("<%df" % len(chunk), *chunk), 6))

    data = bytearray(b"II*\x00\x00\x00\x00\x00")
    offsets = []
    for s in strips:
        offsets.append(len(data))
        data += s
    if len(data) % 2:
        data += b"\x00"

    geokeys = [1, 1, 0, 3, 1024, 0, 1, 2, 1025, 0, 1, 1, 2048, 0, 1, 4326]
    tags = [
        (256, 4, [COLS]), (257, 4, [ROWS]), (258, 3, [32]), (259, 3, [8]), (262, 3, [1]),
        (273, 4, offsets), (277, 3, [1]), (278, 4, [rows_per_strip]),
        (279, 4, [len(s) for s in strips]), (284, 3, [1]), (339, 3, [3]),
        (33550, 12, [CELL, CELL, 0.0]), (33922, 12, [0.0, 0.0, 0.0, WEST, NORTH, 0.0]),
        (34735, 3, geokeys), (42113, 2, b"-9999\x00"),
    ]
    fmt = {3: "H", 4: "I", 12: "d"}
    ifd_at = len(data)
    struct.pack_into("<I", data, 4, ifd_at)
    extra_at = ifd_at + 2 + 12 * len(tags) + 4
    ifd, extra = bytearray(struct.pack("<H", len(tags))), bytearray()
    for tag, typ, values in tags:
        raw = bytes(values) if typ == 2 else struct.pack("<%d%s" % (len(values), fmt[typ]), *values)
        ifd += struct.pack("<HHI", tag, typ, len(values))
        if len(raw) <= 4:
            ifd += raw.ljust(4, b"\x00")
        else:
            ifd += struct.pack("<I", extra_at + len(extra))
            extra += raw
            if len(extra) % 2:
                extra += b"\x00"
    data += ifd + b"\x00\x00\x00\x00" + extra
    path.write_bytes(bytes(data))


def write_ascii(path, vals):
    lines = [
        "ncols %d" % COLS,
        "nrows %d" % ROWS,
        "xllcorner %r" % WEST,
        "yllcorner %r" % (NORTH - ROWS * CELL),
        "cellsize %r" % CELL,
        "NODATA_value -9999",
    ]
    for r in range(ROWS):
        lines.append(" ".join("%g" % v for v in vals[r * COLS:(r + 1) * COLS]))
    path.write_text("\n".join(lines) + "\n")


class Osm:
    def __init__(self):
        self.nodes = {}
        self.by_pos = {}
        self.ways = []

    def node(self, lon, lat):
        key = (round(lon, 7), round(lat, 7))
        if key not in self.by_pos:
            nid = 1000 + len(self.nodes)
            self.by_pos[key] = nid
            self.nodes[nid] = key
        return self.by_pos[key]

    def way(self, wid, pts, tags, extra_refs=()):
        refs = [self.node(lon, lat) for lon, lat in pts] + list(extra_refs)
        self.ways.append({"type": "way", "id": wid, "nodes": refs, "tags": tags})

    def dump(self, path):
        used = sorted({n for w in self.ways for n in w["nodes"] if n in self.nodes})
        elements = list(self.ways) + [
            {"type": "node", "id": n, "lat": self.nodes[n][1], "lon": self.nodes[n][0]} for n in used
        ]
        path.write_text(json.dumps({"version": 0.6, "generator": "fixture", "elements": elements}, indent=1) + "\n")


def frange(a, b, step):
    n = int(round((b - a) / step))
    return [round(a + i * step, 6) for i in range(n + 1)]


def write_roads(path):
    osm = Osm()
    classes = ["residential", "secondary", "tertiary", "primary_link", "service"]
    wid = 500
    for i, lat in enumerate(frange(59.920, 59.935, 0.005)):
        osm.way(wid, [(lon, lat) for lon in frange(10.838, 10.882, 0.004)], {"highway": classes[i % 5], "name": "Gate %d" % i})
        wid += 1
    for i, lon in enumerate(frange(10.840, 10.880, 0.010)):
        osm.way(wid, [(lon, lat) for lat in frange(59.920, 59.935, 0.0025)], {"highway": classes[(i + 2) % 5]})
        wid += 1
    # references a node the response never lists: dropped by the parser
    osm.way(wid, [(10.86, 59.921)], {"highway": "residential"}, extra_refs=[999999])
    osm.dump(path)


def write_power(path):
    osm = Osm()
    osm.way(700, [(10.836, 59.938), (10.850, 59.931), (10.866, 59.926), (10.884, 59.919)], {"power": "line", "voltage": "132000"})
    osm.way(701, [(10.845, 59.921), (10.847, 59.930), (10.849, 59.939)], {"power": "minor_line"})
    osm.dump(path)


def building_rings():
    rings = []
    for lat in frange(59.9205, 59.9305, 0.005):
        for lon in frange(10.8405, 10.8705, 0.010):
            for dx, dy, w, h in [(0.0012, 0.0012, 0.0004, 0.00018), (0.0055, 0.0025, 0.0003, 0.00025)]:
                x0, y0 = lon + dx, lat + dy
                rings.append([(x0, y0), (x0 + w, y0), (x0 + w, y0 + h), (x0, y0 + h)])
    # an L-shaped block
    x, y = 10.8765, 59.9325
    rings.append([(x, y), (x + 0.0006, y), (x + 0.0006, y + 0.0001), (x + 0.0002, y + 0.0001),
                  (x + 0.0002, y + 0.0003), (x, y + 0.0003)])
    return [[(round(a, 7), round(b, 7)) for a, b in r] for r in rings]


def write_buildings(path):
    osm = Osm()
    rings = building_rings()
    for i, ring in enumerate(rings):
        osm.way(800 + i, ring + [ring[0]], {"building": "yes"})
    # self-intersecting footprint: dropped during normalization
    x, y = 10.8605, 59.9385
    bow = [(x, y), (x + 0.0003, y + 0.0002), (x + 0.0003, y), (x, y + 0.0002)]
    osm.way(800 + len(rings), bow + [bow[0]], {"building": "yes"})
    osm.dump(path)


def write_heights(path):
    feats = []
    for i, ring in enumerate(building_rings()):
        if i % 3 == 2:
            continue
        xs, ys = [p[0] for p in ring], [p[1] for p in ring]
        pad = 0.00002
        w, s, e, n = min(xs) - pad, min(ys) - pad, max(xs) + pad, max(ys) + pad
        feats.append({
            "type": "Feature",
            "properties": {"height": round(6.0 + (i * 7.3) % 34.0, 1)},
            "geometry": {"type": "Polygon", "coordinates": [[[w, s], [e, s], [e, n], [w, n], [w, s]]]},
        })
    path.write_text(json.dumps({"type": "FeatureCollection", "features": feats}, indent=1) + "\n")


def write_geocode(path):
    ring = [[lon, lat] for lon, lat in PLACE] + [list(PLACE[0])]
    doc = {
        "type": "FeatureCollection",
        "licence": "Data (c) OpenStreetMap contributors, ODbL 1.0",
        "features": [{
            "type": "Feature",
            "properties": {"place_id": 1, "osm_type": "relation", "osm_id": 1, "display_name": "Alna, Oslo, Norway",
                           "category": "boundary", "type": "administrative"},
            "bbox": [10.835, 59.918, 10.885, 59.940],
            "geometry": {"type": "Polygon", "coordinates": [ring]},
        }],
    }
    path.write_text(json.dumps(doc, indent=1) + "\n")


def main():
    OUT.mkdir(exist_ok=True)
    vals = dem_values()
    write_geotiff(OUT / "dem.tif", vals)
    write_ascii(OUT / "dem.asc", vals)
    write_roads(OUT / "roads.json")
    write_power(OUT / "power.json")
    write_buildings(OUT / "buildings.json")
    write_heights(OUT / "heights.geojson")
    write_geocode(OUT / "geocode.json")


if __name__ == "__main__":
    main()

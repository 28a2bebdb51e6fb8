#!/usr/bin/env python3
"""Turn the raw GAP dump from dump_maximals.g into canonical .grp files.

    gap -q dump_maximals.g > raw.txt
    python3 make_corpus.py raw.txt ../../data

Class names follow ATLAS conventions. Classes sharing order, index and orbit
signature on the natural points are told apart by a letter suffix only.
"""

import sys
import zlib
from pathlib import Path

PROVENANCE = ("maximal subgroup class representatives from GAP 4 "
              "MaximalSubgroupClassReps (passagemath-gap 10.6); generators "
              "from SmallGeneratingSet; completeness per ATLAS class counts")

# (order, index, orbit signature or None, (core prime slot, abelian?) or None, name, tags)
# core prime slot 0 = O_3, 1 = O_2
NAMES = {
    "A5": [(12, 5, None, None, "A4", "intransitive"),
           (10, 6, None, None, "D10", "transitive"),
           (6, 10, None, None, "S3", "intransitive")],
    "A6": [(60, 6, "1,5", None, "A5", "intransitive"),
           (60, 6, "6", None, "L2(5)", "transitive"),
           (36, 10, None, None, "3^2:4", "transitive"),
           (24, 15, "2,4", None, "S4", "intransitive"),
           (24, 15, "6", None, "S4'", "transitive")],
    "A7": [(360, 7, None, None, "A6", "intransitive"),
           (168, 15, None, None, "L2(7)", "transitive"),
           (120, 21, None, None, "S5", "intransitive"),
           (72, 35, None, None, "(A4x3):2", "intransitive")],
    "A8": [(2520, 8, None, None, "A7", "intransitive"),
           (1344, 15, None, None, "2^3:L3(2)", "transitive"),
           (720, 28, None, None, "S6", "intransitive"),
           (576, 35, None, None, "2^4:(S3xS3)", "transitive"),
           (360, 56, None, None, "(A5x3):2", "intransitive")],
    "A9": [(20160, 9, None, None, "A8", "intransitive"),
           (5040, 36, None, None, "S7", "intransitive"),
           (2160, 84, None, None, "(A6x3):2", "intransitive"),
           (1512, 120, None, None, "L2(8):3", "transitive"),
           (1440, 126, None, None, "(A5xA4):2", "intransitive"),
           (648, 280, None, None, "3^3:S4", "transitive"),
           (216, 840, None, None, "3^2:2A4", "transitive")],
    "S5": [(60, 2, None, None, "A5", "normal"),
           (24, 5, None, None, "S4", "intransitive"),
           (20, 6, None, None, "5:4", "transitive"),
           (12, 10, None, None, "S3x2", "intransitive")],
    "L2(7)": [(24, 7, None, None, "S4", "type=GL1(7)wrS2"),
              (21, 8, None, None, "7:3", "type=P1")],
    "L2(8)": [(56, 9, None, None, "2^3:7", "type=P1"),
              (18, 28, None, None, "D18", "type=GL1(64)"),
              (14, 36, None, None, "D14", "type=GL1(8)wrS2")],
    "L2(11)": [(60, 11, None, None, "A5", "class=S"),
               (55, 12, None, None, "11:5", "type=P1"),
               (12, 55, None, None, "D12", "type=GL1(11)wrS2")],
    "L2(13)": [(78, 14, None, None, "13:6", "type=P1"),
               (14, 78, None, None, "D14", "type=GL1(169)"),
               (12, 91, "4,4,6", None, "A4", "class=S"),
               (12, 91, "2,6,6", None, "D12", "type=GL1(13)wrS2")],
    "M11": [(720, 11, None, None, "M10", ""),
            (660, 12, None, None, "L2(11)", ""),
            (144, 55, None, None, "M9:2", ""),
            (120, 66, None, None, "S5", ""),
            (48, 165, None, None, "M8:S3", "")],
    "M12": [(7920, 12, "1,11", None, "M11", "intransitive"),
            (7920, 12, "12", None, "M11'", "transitive"),
            (1440, 66, "2,10", None, "M10:2", "intransitive"),
            (1440, 66, "12", None, "M10:2'", "transitive"),
            (660, 144, None, None, "L2(11)", ""),
            (432, 220, "3,9", None, "M9:S3", "intransitive"),
            (432, 220, "12", None, "M9:S3'", "transitive"),
            (240, 396, None, None, "2xS5", ""),
            (192, 495, "4,8", None, "M8.S4", ""),
            (192, 495, "12", None, "4^2:D12", ""),
            (72, 1320, None, None, "A4xS3", "")],
    "M22": [(20160, 22, None, None, "L3(4)", ""),
            (5760, 77, None, None, "2^4:A6", ""),
            (2520, 176, None, None, "A7", ""),
            (1920, 231, None, None, "2^4:S5", ""),
            (1344, 330, None, None, "2^3:L3(2)", ""),
            (720, 616, None, None, "M10", ""),
            (660, 672, None, None, "L2(11)", "")],
    "U3(3)": [(216, 28, None, None, "3^(1+2):8", "type=P1"),
              (168, 36, None, None, "L2(7)", "class=S"),
              (96, 63, None, (1, False), "4.S4", "type=GU2(3)xGU1(3)"),
              (96, 63, None, (1, True), "4^2:S3", "type=GU1(3)wrS3")],
    "U4(2)": [(960, 27, None, None, "2^4:A5", "type=P1"),
              (720, 36, None, None, "S6", "type=Sp4(2)"),
              (648, 40, None, (0, False), "3^(1+2):2A4", "type=GU3(2)xGU1(2)"),
              (648, 40, None, (0, True), "3^3:S4", "type=GU1(2)wrS4"),
              (576, 45, None, None, "2.(A4xA4).2", "type=P2")],
    "Sp6(2)": [(51840, 28, None, None, "U4(2):2", "type=O6-(2)"),
               (40320, 36, None, None, "S8", "type=O6+(2)"),
               (23040, 63, None, None, "2^5:S6", "type=P1"),
               (12096, 120, None, None, "U3(3):2", "type=Sp2(8)"),
               (10752, 135, None, None, "2^6:L3(2)", "type=P3"),
               (4608, 315, None, None, "2.[2^6]:(S3xS3)", "type=P2"),
               (4320, 336, None, None, "S3xS6", "type=Sp2(2)xSp4(2)"),
               (1512, 960, None, None, "L2(8):3", "type=Sp2(8)")],
    "O8+(2)": [(1451520, 120, None, None, "Sp6(2)", ""),
               (1290240, 135, None, None, "2^6:A8", ""),
               (181440, 960, None, None, "A9", ""),
               (155520, 1120, None, None, "(3xU4(2)):2", ""),
               (110592, 1575, None, None, "2^(1+8):(S3xS3xS3)", ""),
               (15552, 11200, None, None, "3^4:2^3.S4", ""),
               (14400, 12096, None, None, "(A5xA5):2^2", "")],
}

FILE_NAMES = {"A5": "a5", "A6": "a6", "A7": "a7", "A8": "a8", "A9": "a9",
              "S5": "s5", "L2(7)": "l2_7", "L2(8)": "l2_8", "L2(11)": "l2_11",
              "L2(13)": "l2_13", "M11": "m11", "M12": "m12", "M22": "m22",
              "U3(3)": "u3_3", "U4(2)": "u4_2", "Sp6(2)": "sp6_2", "O8+(2)": "o8p_2"}


def parse(path):
    groups = []
    cur = None
    cls = None
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "GROUP":
            cur = {"name": parts[1], "degree": int(parts[2]), "order": int(parts[3]),
                   "stretch": parts[4] == "true", "gens": [], "classes": []}
            cls = None
        elif parts[0] == "CLASS":
            cls = {"order": int(parts[1]), "index": int(parts[2]), "orbits": parts[3],
                   "abelian3": parts[4] == "true",
                   "abelian2": parts[5] == "true", "gens": []}
            cur["classes"].append(cls)
        elif parts[0] == "GEN":
            (cls["gens"] if cls else cur["gens"]).append(parts[1:])
        elif parts[0] == "END":
            groups.append(cur)
            cur = None
    return groups


def name_class(group, c, used):
    for order, index, orbits, ab3, name, tags in NAMES.get(group, []):
        if order != c["order"] or index != c["index"]:
            continue
        if orbits is not None and orbits != c["orbits"]:
            continue
        if ab3 is not None and ab3[1] != (c["abelian3"], c["abelian2"])[ab3[0]]:
            continue
        base = name
        if base in used:
            # further class with identical invariants
            used[base] += 1
            return base + "abcdefgh"[used[base] - 1], tags
        used[base] = 1
        return base, tags
    return "M%d_%d" % (c["order"], c["index"]), ""


def render(g):
    out = ["mindim-group 1",
           "name " + g["name"],
           "degree %d" % g["degree"],
           "order %d" % g["order"],
           "complete true",
           "stretch " + ("true" if g["stretch"] else "false"),
           "provenance " + PROVENANCE,
           "generators %d" % len(g["gens"])]
    out += [" ".join(p) for p in g["gens"]]
    used = {}
    classes = []
    for c in g["classes"]:
        name, tags = name_class(g["name"], c, used)
        classes.append((c["index"], c["order"], name, tags, c["gens"]))
    # rename a duplicated first occurrence to the 'a' variant
    for base, count in used.items():
        if count > 1:
            classes = [(i, o, base + "a" if n == base else n, t, gs)
                       for (i, o, n, t, gs) in classes]
    classes.sort(key=lambda c: (c[0], c[1], c[2]))
    out.append("classes %d" % len(classes))
    for index, order, name, tags, gens in classes:
        out.append("class " + name)
        out.append("order %d" % order)
        out.append("index %d" % index)
        if tags:
            out.append("tags " + tags)
        out.append("generators %d" % len(gens))
        out += [" ".join(p) for p in gens]
    out.append("end")
    return "\n".join(out) + "\n"


def main():
    raw, outdir = sys.argv[1], Path(sys.argv[2])
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = []
    for g in parse(raw):
        text = render(g)
        fname = FILE_NAMES[g["name"]] + ".grp"
        (outdir / fname).write_text(text)
        manifest.append((fname, zlib.crc32(text.encode()) & 0xFFFFFFFF, g["stretch"]))
    manifest_path = outdir / "MANIFEST"
    existing = {}
    if manifest_path.exists():
        for line in manifest_path.read_text().splitlines():
            parts = line.split()
            if len(parts) == 3 and not line.startswith("#"):
                existing[parts[0]] = line
    for fname, crc, stretch in manifest:
        existing[fname] = "%s %08x %s" % (fname, crc, "stretch" if stretch else "default")
    lines = ["# file crc32 role"] + [existing[k] for k in sorted(existing)]
    manifest_path.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Writes the small PDB/pose fixtures used by the CLI tests into tests/data/."""
import json
import os
import sys

import numpy as np


def place(a, b, c, bond, angle, tors):
    bc = c - b
    bc /= np.linalg.norm(bc)
    n = np.cross(b - a, bc)
    n /= np.linalg.norm(n)
    m = np.cross(n, bc)
    ang, t = np.radians(angle), np.radians(tors)
    d = np.array([-bond * np.cos(ang), bond * np.sin(ang) * np.cos(t), bond * np.sin(ang) * np.sin(t)])
    return c + d[0] * bc + d[1] * m + d[2] * n


def line(rec, serial, name, res, chain, seq, x, b, el):
    nm = name if len(name) >= 4 else " " + name
    return (f"{rec:<6}{serial:5d} {nm:<4} {res:>3} {chain}{seq:4d}    "
            f"{x[0]:8.3f}{x[1]:8.3f}{x[2]:8.3f}{1.0:6.2f}{b:6.2f}          {el:>2}\n")


def rot(axis, deg):
    a = np.radians(deg)
    axis = np.array(axis, float)
    axis /= np.linalg.norm(axis)
    k = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + np.sin(a) * k + (1 - np.cos(a)) * k @ k


def main(out):
    # Receptor: five residues of N-CA-C backbone.
    pos = [np.array([0.0, 0.0, 0.0]), np.array([1.46, 0.0, 0.0]), np.array([2.0, 1.42, 0.0])]
    tors = [-60, 140, 180] * 5
    bonds = [1.33, 1.46, 1.52]
    k = 0
    while len(pos) < 15:
        i = len(pos)
        pos.append(place(pos[i - 3], pos[i - 2], pos[i - 1], bonds[i % 3], 111.0, tors[k]))
        k += 1
    names = ["N", "CA", "C"]
    resn = ["GLY", "ALA", "SER", "GLY", "LEU"]
    rng = np.random.default_rng(7)
    rows = []
    serial = 1
    for i, p in enumerate(pos):
        rows.append(line("ATOM", serial, names[i % 3], resn[i // 3], "A", i // 3 + 1, p, 15 + 10 * rng.random(),
                         names[i % 3][0]))
        serial += 1

    # Ligand: a five-atom chain above the receptor centre.
    c = np.mean(pos, axis=0) + np.array([0, 0, 6.0])
    offsets = [(-2.5, 0, 0), (-1.2, 0.6, 0), (0, 0, 0), (1.3, 0.6, 0), (2.5, 0, 0)]
    lel = ["C", "C", "O", "C", "C"]
    lnames = ["C1", "C2", "O3", "C4", "C5"]
    for j, off in enumerate(offsets):
        rows.append(line("HETATM", serial, lnames[j], "LIG", "B", 1, c + np.array(off), 30 + 5 * j, lel[j]))
        serial += 1

    with open(os.path.join(out, "complex.pdb"), "w") as f:
        f.write("".join(rows) + "END\n")
    with open(os.path.join(out, "receptor.pdb"), "w") as f:
        f.write("".join(rows[:15]) + "END\n")
    with open(os.path.join(out, "ligand.pdb"), "w") as f:
        f.write("".join(line("HETATM", 100 + j, lnames[j], "LIG", "B", 1, np.array(off, float), 30.0, lel[j])
                        for j, off in enumerate(offsets)) + "END\n")

    poses = []
    specs = [((0, 0, 1), 0, c), ((0, 0, 1), 90, c + [1, 0, 0]), ((1, 0, 0), 180, c + [-2, 1, -1.5]),
             ((0, 1, 0), 30, c + [8, 0, 0])]
    for r, (ax, deg, t) in enumerate(specs):
        poses.append({"rank": r + 1, "rotation": [round(float(v), 12) for v in rot(ax, deg).flatten()],
                      "translation": [round(float(v), 6) for v in t]})
    with open(os.path.join(out, "poses.json"), "w") as f:
        json.dump(poses, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data")

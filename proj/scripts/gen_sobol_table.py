#!/usr/bin/env python3
"""Regenerates core/src/sobol_directions.cpp from the Joe-Kuo (new-joe-kuo-6.21201)
direction numbers shipped with scipy."""
import os
import sys

import numpy as np
import scipy

src = os.path.join(os.path.dirname(scipy.__file__), "stats", "_sobol_direction_numbers.npz")
data = np.load(src)
poly = data["poly"]
vinit = data["vinit"]
dims = len(poly)

offsets = [0]
flat = []
for i in range(dims):
    degree = max(int(poly[i]).bit_length() - 1, 1)
    flat.extend(int(v) for v in vinit[i, :degree])
    offsets.append(len(flat))

out = sys.argv[1] if len(sys.argv) > 1 else "core/src/sobol_directions.cpp"
with open(out, "w") as f:
    f.write("// Generated by scripts/gen_sobol_table.py. Do not edit.\n")
    f.write("// Joe & Kuo direction numbers (new-joe-kuo-6.21201), dimension 0 is van der Corput.\n\n")
    f.write('#include "sobol_directions.hpp"\n\nnamespace molcert::detail {\n\n')
    f.write(f"const std::size_t kSobolDimensions = {dims};\n\n")
    def emit(name, ctype, values):
        f.write(f"const {ctype} {name}[] = {{\n")
        for k in range(0, len(values), 16):
            f.write("    " + ", ".join(str(v) for v in values[k:k + 16]) + ",\n")
        f.write("};\n\n")
    emit("kSobolPoly", "std::uint32_t", [int(p) for p in poly])
    emit("kSobolInitOffset", "std::uint32_t", offsets)
    emit("kSobolInit", "std::uint32_t", flat)
    f.write("}  // namespace molcert::detail\n")
print(dims, len(flat))

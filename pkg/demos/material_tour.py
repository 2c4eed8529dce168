"""Sample a few library materials, bake them and print their diversity figures.

    python demos/material_tour.py out_dir
"""

import sys
from pathlib import Path

from procgraph.analytics import diversity
from procgraph.evaluate import bake_texture
from procgraph.io import write_png
from procgraph.materials.samplers import LIBRARY
from procgraph.sampler import sample
from procgraph.tracer import trace_distribution

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(parents=True, exist_ok=True)

for f in LIBRARY:
    if f.interface != "material" or f.id.endswith("_wide"):
        continue
    report = diversity(trace_distribution(f))
    print(f"{f.id:14s} M={report.cyclomatic:5d} H={report.entropy_bits:7.1f} bits")
    for seed in range(3):
        graph = sample(f, seed)
        write_png(out / f"{f.id}_{seed}.png", bake_texture(graph, "surface", 128))

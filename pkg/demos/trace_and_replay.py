"""Trace one sampler run, change a single parameter and rebuild the asset."""

from procgraph.evaluate import bake_texture
from procgraph.materials.samplers import LIBRARY
from procgraph.tracer import list_params, replay, trace_instance

wood = next(f for f in LIBRARY if f.id == "wood")
trace = trace_instance(wood, 11)
for entry in list_params(trace):
    print(f"{entry.name:40s} {entry.value!r}")

name = next(e.name for e in list_params(trace) if e.name.endswith("ring_frequency"))
before = bake_texture(replay(trace, {}, wood), "displacement", 64)
after = bake_texture(replay(trace, {name: 20.0}, wood), "displacement", 64)
print(f"{name} -> 20.0: max displacement change {abs(after - before).max():.5f}")

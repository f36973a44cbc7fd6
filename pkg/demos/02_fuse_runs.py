"""Merge the output of three retrieval systems with the untrained algorithms.

Run with: python3 demos/02_fuse_runs.py
"""

from fuseval import FusionSpec, fuse_run, parse_run, write_run

SYSTEM_A = """\
1 Q0 d1 1 0.90 sysA
1 Q0 d2 2 0.80 sysA
1 Q0 d3 3 0.10 sysA
"""

SYSTEM_B = """\
1 Q0 d3 1 14.0 sysB
1 Q0 d1 2 12.0 sysB
1 Q0 d4 3 3.00 sysB
"""

SYSTEM_C = """\
1 Q0 d2 1 0.52 sysC
1 Q0 d5 2 0.51 sysC
"""

runs = [parse_run(t) for t in (SYSTEM_A, SYSTEM_B, SYSTEM_C)]

# Scores live on wildly different scales, so every algorithm first applies
# per-topic min-max normalization. CombMNZ additionally rewards documents
# retrieved by several systems; linear takes manual per-system weights.
for spec in (
    FusionSpec("interleave"),
    FusionSpec("combsum"),
    FusionSpec("combmnz"),
    FusionSpec("linear", {"weights": {"sysA": 2.0, "sysB": 1.0, "sysC": 0.5}}),
):
    fused = fuse_run(spec, runs, ["1"], run_tag=spec.label())
    print(f"--- {spec.label()} ---")
    print(write_run(fused))

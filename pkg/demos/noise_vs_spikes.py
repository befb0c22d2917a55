"""How the error distribution changes which method wins in the long run.

Two systems with identical Gaussian matrices but different corruption:
dense Gaussian noise on every equation, versus 50 equations knocked far off
by a spike of 15. Greedy selection accelerates both early on, but on the
spiky system it keeps chasing the corrupted equations and stalls at a much
worse error floor. The hybrid rule (greedy until the residual sup norm
reaches 4 * ||e||_inf, then randomized) keeps the early acceleration without
inheriting the bad floor.

Run:  python demos/noise_vs_spikes.py [output_dir]
"""

import sys
from pathlib import Path

import numpy as np

from rowaction import solvers, systems

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(parents=True, exist_ok=True)

cases = {
    "gaussian": systems.GeneratorSpec("gaussian-noise", m=2000, n=50,
                                      noise_std=0.01, seed=42),
    "spiky": systems.GeneratorSpec("spiky-noise", m=2000, n=50, noise_std=0.0,
                                   spike_count=50, spike_magnitude=15.0, seed=42),
}

iterations = 600
for label, spec in cases.items():
    system = systems.generate(spec)
    e_inf = system.error_inf()
    rules = {
        "motzkin": solvers.SelectionRule("motzkin"),
        "rk": solvers.SelectionRule("rk-uniform"),
        "hybrid": solvers.SelectionRule("hybrid", hybrid_threshold=4 * e_inf),
    }
    print(f"\n{label} system: ||e||_inf = {e_inf:.4f}")
    tails = {}
    for name, rule in rules.items():
        result = solvers.run(system, rule, solvers.StopRule(iterations), seed=3)
        solvers.write_telemetry_csv(out / f"{label}_{name}.csv", result.records)
        tail = float(np.mean([rec.error_sq for rec in result.records[-100:]]))
        tails[name] = tail
        switch = ""
        if result.switch_iteration is not None:
            switch = f" (switched to randomized at k={result.switch_iteration})"
        print(f"  {name:8s} trailing-100 mean error^2 = {tail:10.4g}{switch}")
    ratio = tails["motzkin"] / tails["rk"]
    print(f"  -> greedy floor / randomized floor = {ratio:.2f}"
          + ("  (greedy stalls much higher: it keeps selecting the corrupted rows)"
             if ratio > 2 else "  (comparable floors under dense noise)"))

print(f"\nwrote per-method traces under {out}/")

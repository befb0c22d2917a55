"""Pure-noise system: observed greedy rate against the Gaussian-rate curves.

With b pure noise (no signal at all) the least-squares solution is whatever
the noise projects to, and the run shows the cleanest view of per-iteration
rates. The proved Gaussian rate carries a 1/n factor that looks like an
artifact; the conjectured variant drops it and replaces log(m') by log(m).
Both curves are qualitative (their absolute constants are fixed to 1), so
this demo is about shapes: the observed decay should hug the conjectured
curve and leave the proved one far behind.

Run:  python demos/gaussian_conjectured_rate.py [output_dir]
"""

import sys
from pathlib import Path

from rowaction import bounds, solvers, systems

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(parents=True, exist_ok=True)

spec = systems.GeneratorSpec("pure-noise", m=2000, n=50, noise_std=1.0, seed=11)
system = systems.generate(spec)
print(f"pure-noise system: ||e||_inf = {system.error_inf():.4f}")

iterations = 200
result = solvers.run(system, solvers.SelectionRule("motzkin"),
                     solvers.StopRule(iterations))
solvers.write_telemetry_csv(out / "pure_noise_motzkin.csv", result.records)

inputs = bounds.bound_inputs_from_system(system)
curves = [
    bounds.rk_bound(inputs, iterations),
    bounds.gaussian_rate_bound(inputs, iterations, conjectured=False),
    bounds.gaussian_rate_bound(inputs, iterations, conjectured=True),
]
bounds.write_curves_csv(out / "pure_noise_rate_curves.csv", curves)

observed = result.records[-1].error_sq
print(f"after {iterations} greedy iterations: observed error^2 {observed:.4g}")
for curve in curves:
    print(f"  {curve.name:26s} final value {float(curve.values[-1]):.4g}")
print(f"wrote trace and rate curves under {out}/")

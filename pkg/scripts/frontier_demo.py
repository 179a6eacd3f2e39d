"""Error/disturbance frontier and bias blow-up for A=sx, B=sy on |+z>.

    python3 scripts/frontier_demo.py [--budget N] [--seed S]
"""
import argparse
import math

from uncertainty_lab.frontier import ModelParameterization, SearchMonitor, bias_blowup_probe, trace_frontier
from uncertainty_lab.model import build_projective_spin
from uncertainty_lab.operators import KET, SX, SY

parser = argparse.ArgumentParser()
parser.add_argument("--budget", type=int, default=3000)
parser.add_argument("--seed", type=int, default=0)
args = parser.parse_args()

psi = KET["+z"]
p0 = ModelParameterization.from_model(build_projective_spin(math.pi / 4))
monitor = SearchMonitor()
points = trace_frontier(SX, SY, psi, p0, args.budget, args.seed, monitor)

print(f"{len(points)} nondominated points from {monitor.evaluations} evaluations")
step = max(1, len(points) // 12)
for p in points[::step]:
    print(f"  eps={p.eps:.4f}  eta={p.eta:.4f}  eps*eta={p.eps * p.eta:.4f}")
print(f"points below the naive bound eps*eta >= 1: {sum(p.eps * p.eta < 1 for p in points)}")

records = bias_blowup_probe(SX, SY, psi, [0.5, 0.2, 0.05, 0.01], args.budget, args.seed, p0=p0, monitor=monitor)
print("eps cap -> smallest disturbance bias of sy")
for r in records:
    print(f"  {r.eps_cap:<6g} eps={r.achieved_eps:.4f}  bias={r.min_bias_B:.4f}")
print(f"forbidden-region hits: {monitor.forbidden_hits}, universal violations: {monitor.universal_violations}")

"""Run every property campaign and print one summary line each.

    python3 scripts/run_campaigns.py [instances] [seed]
"""
import sys

from uncertainty_lab.experiments import CAMPAIGN_SUITES, run_property_campaign

instances = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 42
failed = False
for suite in CAMPAIGN_SUITES:
    s = run_property_campaign(suite, instances, seed)
    failed |= not s.ok
    print(f"{suite:22s} {s.passes}/{s.instances} passed  worst margin {s.worst_margin:.3e}")
sys.exit(1 if failed else 0)

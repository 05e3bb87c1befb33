"""
A quick run of the heuristic-optimality experiment
==================================================

The full protocol uses 3000 elections; 200 already shows the pattern.
Heuristics tuned for Borda reach the optimum far less often under the
elimination rules.
"""

import sys
import tempfile

from elimvote import ExperimentConfig, run_small_optimal
from elimvote.experiments import emit_outputs, summary_text

model = sys.argv[1] if len(sys.argv) > 1 else "uniform"
config = ExperimentConfig(protocol="small", elections=200, model=model, seed=1)
records, summary = run_small_optimal(config)
print(summary_text(summary, config.heuristics))

for row in summary["rows"]:
    print(f"{row['rule']}: {row['discarded']} of {row['elections']} elections already won, "
          f"{row['flagged']} flagged")

out = tempfile.mkdtemp(prefix="elimvote-")
emit_outputs(records, summary, config, out)
print("tables and raw records written to", out)

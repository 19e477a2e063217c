"""End-to-end run through the command line surface.

Generates a dataset on disk, aligns it, scores the predictions, and turns
the refinement trace into plot-ready JSON, all through subprocess calls,
exactly as a shell user would.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

work = Path(tempfile.mkdtemp(prefix="kgalign_demo_"))
print("working under", work)


def cli(*args):
    proc = subprocess.run([sys.executable, "-m", "kgalign.cli", *args],
                          capture_output=True, text=True)
    if proc.returncode != 0:
        raise SystemExit(f"command failed ({proc.returncode}): {proc.stderr}")
    return proc.stdout


data = work / "data"
cli("synth", "--n", "80", "--density", "0.08", "--rewire", "0.05",
    "--noise", "0.3", "--seed", "42", "--out-dir", str(data))
print("\nwrote dataset:", sorted(p.name for p in data.iterdir()))

pred = work / "predictions.tsv"
trace = work / "trace.csv"
coupling = work / "coupling.npz"
metrics = cli("align",
              "--kg1-triples", str(data / "rel_triples_1"),
              "--kg2-triples", str(data / "rel_triples_2"),
              "--emb1", str(data / "emb_1.bin"),
              "--emb2", str(data / "emb_2.bin"),
              "--gold", str(data / "ent_links"),
              "--epsilon", "0.0025",
              "--out", str(pred),
              "--out-trace", str(trace),
              "--out-coupling", str(coupling))
print("\nalign metrics:", json.loads(metrics))
print("first predictions:")
for line in pred.read_text().splitlines()[:3]:
    print("  ", line.replace("\t", "  <->  "))

scored = cli("eval", "--pred", str(pred), "--gold", str(data / "ent_links"),
             "--coupling", str(coupling))
print("\neval (with ranking from the coupling):", json.loads(scored))

plot_data = json.loads(cli("trace-plot-data", "--trace", str(trace)))
print("\ntrace summary: iterations", plot_data["iter"],
      "| objective", [round(v, 5) for v in plot_data["f_fgw"]],
      "| best iteration", plot_data["min_fgw_iter"])

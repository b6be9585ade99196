"""A periodic unitary pair: every operator is periodic, yet nothing here is chaotic."""

import tempfile

from hyperlab import scenario as sc

cfg = sc.load_config("unitary-counterexample")
with tempfile.TemporaryDirectory() as out:
    status, results = sc.run_scenario(cfg, out=out)
    for r in results:
        print(f"{r.run_id:<22} {r.verdict}")
print("exit status", status)

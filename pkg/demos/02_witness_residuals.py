"""Residual curves of the transitive and periodic witness operators."""

import sys

from hyperlab import dynamics as dyn
from hyperlab import finite_rank as fr
from hyperlab import operators as ops
from hyperlab import witnesses as wt
from hyperlab.scalars import section

system = dyn.ElementarySystem(ops.build_aperiodic_shift(), ops.build_example_W())
P2 = fr.projection_operator(section(2))

run = wt.transitive_witness(system, P2, P2, 2, [k + 3 for k in range(1, 26)])
print(run.to_table())
print("first k with both residuals below 1e-6:", run.first_k_below(1e-6))

periodic = wt.periodic_witness(system, P2, 8, tol=2.0 ** -40)
rec = periodic.records[0]
print("truncation L =", rec.exact["L"])
print("period residual, exact:", rec.exact["period residual (exact)"])
print("predicted from orbit weights:", rec.exact["predicted boundary value"])
print("distance to P_2:", rec.residuals["||G - F||"])

# csv of the transitive residuals, e.g. for plotting elsewhere
if "--csv" in sys.argv:
    sys.stdout.write(run.to_csv())

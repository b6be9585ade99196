"""Parity split for the cosine family, and its left-compressed twin on the adjoint side."""

from hyperlab import criteria as cr
from hyperlab import dynamics as dyn
from hyperlab import finite_rank as fr
from hyperlab import operators as ops
from hyperlab import witnesses as wt
from hyperlab.scalars import section

W = ops.build_example_W()
Ws = ops.adjoint(W)
U = ops.build_aperiodic_shift()
schedule = [k + 3 for k in range(1, 21)]

split = cr.find_cosine_split(W, 4, schedule)
e = split.at(1)
print("E =", e.E, " R =", e.R, " verdict:", split.verdict)

P4 = fr.projection_operator(section(4))
run = wt.cosine_witness(dyn.ElementarySystem(U, W), P4, P4, split)
for rec in run.records[:6]:
    print(rec.k, rec.n, {name: f"{v:.3g}" for name, v in rec.residuals.items()})

# W_ex expands L_2 from the left, its adjoint contracts it
print("adjoint checks on W_ex :", cr.check_adjoint_conditions(W, 2, schedule, "power").verdict)
print("adjoint checks on W_ex*:", cr.check_adjoint_conditions(Ws, 2, schedule, "power").verdict)

left = cr.find_cosine_split(Ws, 2, schedule, side="left")
P2 = fr.projection_operator(section(2))
adj = wt.adjoint_cosine_witness(dyn.ElementarySystem(U, Ws), P2, P2, left)
print(adj.to_table())

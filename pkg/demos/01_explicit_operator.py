"""Compression norms of the explicit weighted shift W_ex and the criteria they feed."""

from hyperlab import criteria as cr
from hyperlab import operators as ops
from hyperlab.scalars import section

W = ops.build_example_W()
U = ops.build_aperiodic_shift()
print(W.describe()["weights"])
print("m(W) =", ops.min_modulus(W), "  ||W|| =", ops.sup_norm(W))

# forward and backward right compressions on L_2 and L_3, exact dyadics
print(f"{'n':>3} {'|W^n P_2|':>12} {'|W^-n P_3|':>12}")
for n in range(1, 11):
    print(f"{n:>3} {str(ops.norm_power_proj(W, n, section(2))):>12} "
          f"{str(ops.norm_power_proj(W, -n, section(3))):>12}")

schedule = [k + 3 for k in range(1, 31)]
for report in (cr.check_orthogonality(U, range(1, 9), 64),
               cr.check_hypercyclicity_condition(W, 2, schedule),
               cr.check_necessary_m_condition(W),
               cr.check_series_condition(W, 3, schedule)):
    print(f"{report.criterion:<24} {report.verdict}")

"""Walk through one channel draw: relay-only baseline, then the joint design.

Run:  python3 demos/single_instance.py [seed]
"""

import sys

from secrelay import (
    SystemParams,
    draw_channels,
    optimize_joint,
    optimize_relay_only,
    satisfies_constraints,
)
from secrelay.system import total_power


def describe(label, trace, ch, params):
    if not trace.feasible:
        print(f"{label}: infeasible")
        return
    d, r = trace.final, trace.final_report
    print(f"{label}:")
    print(f"  rho={d.rho:.4f}  P_A={d.P_A:.4f}  P_B={d.P_B:.4f}  P_R={r.P_R:.4f}")
    print(f"  SINR A/B/E = {r.Gamma_A:.4f} / {r.Gamma_B:.4f} / {r.Gamma_E:.5f}")
    print(f"  harvested U = {r.U:.4f}   secrecy sum-rate = {r.R_sec:.4f} bits")
    print(f"  total power = {total_power(d, r):.4f}   ZF residual = {r.zf_residual:.2e}")
    print(f"  constraints hold: {satisfies_constraints(r, params)}")


def main(seed=7):
    params = SystemParams()
    ch = draw_channels(params, seed)
    print(f"seed {seed}, P_max={params.P_max}, U_bar={params.U_bar}\n")

    describe("relay-only (rho=0.5, sources at P_max)", optimize_relay_only(ch, params), ch, params)
    print()
    trace = optimize_joint(ch, params)
    describe("joint", trace, ch, params)
    print("\nobjective after each stage:")
    for rec in trace.iterations:
        print(f"  {rec.stage:<6} {rec.objective:.6f}")
    print(f"converged={trace.converged} after {trace.outer_iterations} outer iterations")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 7)

"""Mean secrecy sum-rate versus source power budget for two harvesting targets.

Run:  python3 demos/pmax_sweep.py [trials]
Writes pmax_ubar1.csv and pmax_ubar5.csv in the working directory.
"""

import sys
from dataclasses import replace

from secrelay import ExperimentConfig, SystemParams, run_sweep


def main(trials=50):
    for ubar in (1.0, 5.0):
        cfg = ExperimentConfig(
            params=replace(SystemParams(), U_bar=ubar),
            trials=trials, master_seed=2024, sweep_variable="pmax",
            sweep_values=(0.0, 5.0, 10.0, 15.0, 20.0),
            output_path=f"pmax_ubar{ubar:g}.csv", workers=4,
        )
        print(f"U_bar = {ubar:g}")
        print(f"  {'P_max dB':>8} {'mode':>10} {'R_sec':>8} {'power':>9} {'feasible':>8}")
        for row in run_sweep(cfg):
            print(f"  {row.sweep_value:8g} {row.mode:>10} {row.mean_R_sec:8.4f} "
                  f"{row.mean_total_power:9.3f} {row.feasible_fraction:8.2f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 50)

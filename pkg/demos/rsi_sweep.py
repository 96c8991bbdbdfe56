"""Effect of residual self-interference strength on secrecy and power.

Run:  python3 demos/rsi_sweep.py [trials]
"""

import sys

from secrelay import ExperimentConfig, SystemParams, run_sweep


def main(trials=50):
    cfg = ExperimentConfig(
        params=SystemParams(), trials=trials, master_seed=2024, sweep_variable="rsi",
        sweep_values=(0.01, 0.03, 0.1, 0.3, 1.0), output_path="rsi_sweep.csv", workers=4,
    )
    rows = run_sweep(cfg)
    print(f"{'RSI var':>8} {'mode':>10} {'R_sec':>8} {'power':>9} {'feasible':>8}")
    for row in rows:
        print(f"{row.sweep_value:8g} {row.mode:>10} {row.mean_R_sec:8.4f} "
              f"{row.mean_total_power:9.3f} {row.feasible_fraction:8.2f}")
    # Zero forcing removes the relay loop, so only the source loopback terms
    # grow with the variance; watch the total power column rise.


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 50)

"""Print the design report for the 8000 ps^2 module and cross-check p1 by Monte Carlo.

    python3 scripts/reproduce_design_point.py --cycles 1000000 --shards 4
"""

import argparse
import math

from freqmux.design import design_report
from freqmux.simulator import HardwareParams, run_campaign
from freqmux.stats import SourceParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cycles", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--shards", type=int, default=1)
    args = ap.parse_args()

    src = SourceParams(lam=0.031, eta_i=0.3, eta_s=0.85, n_bins=500)
    hw = HardwareParams(G=8000.0, delta_omega=2 * math.pi, dt_d=10.0, tau=10.0, dt_e=80.0)
    r = design_report(src, hw)

    rows = [
        ("n_max_dispersive", r.n_max_dispersive),
        ("n_from_excitation", r.n_from_excitation),
        ("  without 1/sqrt(2)", r.n_from_excitation_no_sqrt2),
        ("cw_ratio", r.cw_ratio),
        ("lambda_star", r.lambda_star),
        ("p1_star", r.p1_star),
        ("p1 at lambda = 0.031", r.p1),
        ("p_trig", r.p_trig),
        ("dt_pump [ps]", r.dt_pump),
        ("dt_h [ps]", r.dt_h),
        ("visibility", r.visibility),
        ("spatial tree loss [dB]", r.spatial_tree_loss_db),
    ]
    for name, value in rows:
        print(f"{name:24s} {value:.6g}" if isinstance(value, float) else f"{name:24s} {value}")
    for flag in r.feasibility_flags:
        print(f"[{'ok' if flag.passed else '--'}] {flag.criterion}: {flag.detail}")

    stats = run_campaign(src, hw, args.cycles, args.seed, args.shards)
    z = (stats.p1_hat - r.p1) / math.sqrt(r.p1 * (1 - r.p1) / stats.n_cycles)
    print(f"\nMonte Carlo, {stats.n_cycles} cycles: p1_hat = {stats.p1_hat:.5f} "
          f"CI [{stats.p1_ci[0]:.5f}, {stats.p1_ci[1]:.5f}], z = {z:+.2f}")
    print(f"multi-photon rate {stats.multi_photon_rate:.5f}, p_trig_hat {stats.p_trig_hat:.5f}")


if __name__ == "__main__":
    main()

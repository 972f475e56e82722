#!/usr/bin/env python3
"""Monte Carlo scaling study of the fringe-inversion estimator.

For each mean excitation the displacement is set to the fringe midpoint,
R-shot binomial readouts are simulated, and the empirical spread of the
arccos estimate is compared against the binomial-propagation prediction
1/(4 sqrt(R nbar)) and the quoted 1/(8 sqrt(R nbar)).  The fitted
exponent of sigma vs nbar demonstrates the 1/sqrt(nbar) quantum gain.
"""

import argparse

import numpy as np

from subplanck.estimation import estimator_calibration, theory_sigma


def run(nbars, repetitions, trials, seed) -> int:
    print(f"R = {repetitions}, trials = {trials}, seed = {seed}")
    print(f"{'nbar':>6} {'true_s':>10} {'bias':>11} {'sigma':>11} {'1/(4 sqrt(R nbar))':>19} {'quoted':>11}")
    sigmas = []
    for i, nbar in enumerate(nbars):
        amp = np.sqrt(nbar)
        true_s = np.pi / (8 * amp)
        bias, sigma = estimator_calibration(true_s, 1j * amp, repetitions, trials, seed=seed + i)
        propagation = 1.0 / (4.0 * amp * np.sqrt(repetitions))
        print(f"{nbar:6.0f} {true_s:10.5f} {bias:11.3e} {sigma:11.3e} {propagation:19.3e} {theory_sigma(repetitions, amp):11.3e}")
        sigmas.append(sigma)
    exponent = np.polyfit(np.log(nbars), np.log(sigmas), 1)[0]
    print(f"fitted sigma ~ nbar^x exponent: x = {exponent:+.3f} (shot-noise-limited strategies give 0)")
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nbars", type=float, nargs="+", default=[4.0, 16.0, 64.0, 256.0])
    parser.add_argument("--repetitions", type=int, default=10_000)
    parser.add_argument("--trials", type=int, default=600)
    parser.add_argument("--seed", type=int, default=20240601)
    args = parser.parse_args()
    raise SystemExit(run(args.nbars, args.repetitions, args.trials, args.seed))

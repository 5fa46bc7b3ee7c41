"""Trace energy levels versus the qubit frequency and measure the anticrossings.

Each target pair |e,n,m+1> <-> |g,n+1,m| produces an avoided level crossing
whose splitting equals twice the effective coupling.  The script scans the
levels, locates the gap minima, compares them with the closed forms, and saves
a plot when matplotlib is available.
"""

import numpy as np

from mdce import Dims, TargetPair, effective_coupling, find_avoided_crossing, scan_levels
from mdce.presets import resonant_params

params = resonant_params()
pairs = (TargetPair(0, 0), TargetPair(1, 0), TargetPair(0, 1))

print("pair        omega_a*    gap         2|coupling|   half-gap err   offset")
for pair in pairs:
    res = find_avoided_crossing(params, pair)
    ge = abs(effective_coupling(pair, params))
    err = abs(res.gap / 2 - ge) / ge
    offset = (params.omega_c - params.omega_m) - res.omega_a_star
    print(f"({pair.n},{pair.m})       {res.omega_a_star:.6f}   {res.gap:.3e}   "
          f"{res.predicted_gap:.3e}    {err:6.2%}        {offset:+.3e}")

scan = scan_levels(params, (0.66, 0.74), 161, pairs, Dims(6, 6))

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("\nmatplotlib not installed; skipping the plot")
else:
    fig, axes = plt.subplots(1, len(pairs), figsize=(12, 4), sharex=True)
    for ax, pair, l0 in zip(axes, pairs, range(0, 2 * len(pairs), 2)):
        tracked = {}
        for l, style in ((l0, "C0"), (l0 + 1, "C1")):
            energies = [scan.levels[p, scan.tracked_index[p, l]]
                        for p in range(len(scan.omega_a_grid))]
            ax.plot(scan.omega_a_grid, energies, style,
                    label=str(scan.labels[l]))
        ax.set_title(f"pair ({pair.n},{pair.m})")
        ax.set_xlabel("omega_a / omega_c")
        ax.legend(fontsize=8)
    axes[0].set_ylabel("energy / omega_c")
    fig.tight_layout()
    fig.savefig("avoided_crossings.png", dpi=150)
    print("\nsaved avoided_crossings.png")

"""Disorder-averaged retrieval after a 2pi rotation versus drive strength.

For written 3-polariton registers the flip-flop interaction dephases the
spin wave while the microwave drive dresses it away; sweeping the drive
relative to the interaction scale shows the weak-to-strong crossover.  The
interaction scale of a disordered register is ambiguous, so the sweep is
reported against three conventions: the contact value at the blockade
radius, the ensemble-mean pairwise coupling, and the mean nearest-neighbour
coupling.  Writes crossover.csv.
"""

import numpy as np

from rydpol import ExperimentConfig, RB60_PAIR
from rydpol.config import dipole_interaction, optical_blockade_radius
from rydpol.montecarlo import _register_return_probability, _scan_geometries

SAMPLES = 1000
SEED = 77
RATIOS = np.array([0.2, 1.0 / 3.0, 0.5, 1.0, 2.0, 3.0, 5.0])

config = ExperimentConfig()
r_o = optical_blockade_radius(RB60_PAIR.c6, config.eit_width)
registers = _scan_geometries(config, RB60_PAIR, SAMPLES, seed=SEED,
                             n_polaritons=3)

# pairwise coupling statistics of the written ensemble
pair_v, nn_v = [], []
for reg in registers:
    pos = np.asarray(reg.polariton_positions)
    d = np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)
    iu = np.triu_indices(len(pos), k=1)
    pair_v.extend(abs(dipole_interaction(RB60_PAIR.c3, r)) for r in d[iu])
    full = np.where(np.eye(len(pos), dtype=bool), np.inf, d)
    nn_v.extend(abs(dipole_interaction(RB60_PAIR.c3, r))
                for r in full.min(axis=1))

conventions = {
    "contact": abs(dipole_interaction(RB60_PAIR.c3, r_o)),
    "mean_pairwise": float(np.mean(pair_v)),
    "mean_nearest": float(np.mean(nn_v)),
}
print(f"{SAMPLES} written registers, seed {SEED}")
print(f"pairwise coupling: mean {np.mean(pair_v):.3f} MHz, "
      f"median {np.median(pair_v):.3f} MHz")
print(f"nearest-neighbour: mean {np.mean(nn_v):.3f} MHz, "
      f"median {np.median(nn_v):.3f} MHz")

table = {}
for name, v_bar in conventions.items():
    curve = []
    for ratio in RATIOS:
        omega = ratio * v_bar
        vals = [_register_return_probability(r.polariton_positions, omega,
                                             RB60_PAIR.c3, 1.0 / omega)
                for r in registers]
        curve.append(float(np.mean(vals)))
    table[name] = curve
    monotone = all(a < b for a, b in zip(curve, curve[1:]))
    print(f"{name:14s} (V = {v_bar:6.2f} MHz): "
          + " ".join(f"{c:.3f}" for c in curve)
          + ("  [monotone]" if monotone else "  [non-monotone]"))

header = "omega_over_v," + ",".join(table)
rows = np.column_stack([RATIOS] + [table[name] for name in table])
np.savetxt("crossover.csv", rows, delimiter=",", header=header, comments="",
           fmt="%.6g")
print("wrote crossover.csv")
print("note: only the contact convention sweeps monotonically; even there "
      "the weak-drive floor sits near 0.5 because the median pair in a "
      "blockade-separated register is far weaker than the contact value.")

"""Seeded synthetic survey grids standing in for real field data.

The generated pair mimics a UAV and a crewed fixed-wing survey over the same
500 m x 700 m block: a smooth regional field with dipole-like anomalies, a
terrain surface, and a UAV-minus-fixed-wing difference that shrinks over high
ground.
"""
import numpy as np

from .grids import MagGrid


def synthetic_survey(seed=0, n_rows=28, n_cols=20, cell_size_m=25.0, origin=(650000.0, 4980000.0),
                     terrain_coupling_nT_per_m=0.5, noise_nT=1.0, base_nT=54000.0):
    """Return ``(uav, fixed_wing, terrain)`` grids.

    ``uav - fixed_wing = terrain_coupling * (max(terrain) - terrain) + noise``.
    """
    rng = np.random.default_rng(seed)
    shell = MagGrid(np.zeros((n_rows, n_cols)), origin[0], origin[1], cell_size_m,
                    crs_label="synthetic")
    e, n = shell.cell_centers()
    u = (e - e.min()) / max(np.ptp(e), 1.0)
    v = (n - n.min()) / max(np.ptp(n), 1.0)

    terrain = 300.0 + 40.0 * np.sin(2.2 * np.pi * u) * np.cos(1.3 * np.pi * v) + 25.0 * v
    field = base_nT + 60.0 * u - 35.0 * v
    for _ in range(4):
        cu, cv = rng.uniform(0.15, 0.85, size=2)
        amp = rng.uniform(-400.0, 900.0)
        width = rng.uniform(0.06, 0.18)
        field = field + amp * np.exp(-((u - cu) ** 2 + (v - cv) ** 2) / (2 * width ** 2))

    fixed_wing = field
    uav = (field + terrain_coupling_nT_per_m * (terrain.max() - terrain)
           + rng.normal(0.0, noise_nT, size=field.shape))
    return (shell.with_values(uav), shell.with_values(fixed_wing),
            shell.with_values(terrain, units="m"))

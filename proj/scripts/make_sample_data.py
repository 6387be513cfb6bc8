#!/usr/bin/env python3
"""Writes the small bundled sample inputs: data/sample_traces.csv and data/geo_pool.csv.

The traces are synthetic household profiles at 15-minute cadence. Consumption
has a morning and an evening peak around a ~1.2 kW mean; generation mixes a
solar bell with a wind-like baseline so some microgrids stay positive all day.
"""

import argparse
from pathlib import Path

import numpy as np

CADENCE_S = 900
PER_DAY = 86400 // CADENCE_S

# (lon, lat, weight) of a few British towns; points scatter around them.
TOWNS = [
    (-0.13, 51.51, 8), (-2.24, 53.48, 4), (-1.90, 52.49, 4), (-1.55, 53.80, 3),
    (-4.25, 55.86, 3), (-2.59, 51.45, 2), (-3.19, 55.95, 2), (-2.99, 53.41, 2),
    (-1.47, 53.38, 2), (-3.18, 51.48, 2), (-1.62, 54.97, 2), (-1.15, 52.95, 1),
    (-1.40, 50.90, 1), (1.30, 52.63, 1), (-4.14, 50.37, 1), (-2.09, 57.15, 1),
]


def consumption(rng, days):
    t = np.arange(days * PER_DAY) / PER_DAY * 24.0
    hour = t % 24.0
    base = rng.uniform(350, 600)
    morning = rng.uniform(500, 1200) * np.exp(-0.5 * ((hour - rng.uniform(7, 8.5)) / 1.2) ** 2)
    evening = rng.uniform(1200, 2200) * np.exp(-0.5 * ((hour - rng.uniform(18, 20)) / 2.0) ** 2)
    noise = rng.gamma(2.0, 60.0, t.size)
    return base + morning + evening + noise


def generation(rng, days):
    t = np.arange(days * PER_DAY) / PER_DAY * 24.0
    hour = t % 24.0
    peak = rng.uniform(1500, 4000)
    cloud = np.repeat(rng.uniform(0.4, 1.0, days), PER_DAY)
    solar = peak * cloud * np.clip(np.sin(np.pi * (hour - 6.0) / 12.0), 0.0, None)
    wind = rng.uniform(600, 2200) * (1.0 + 0.3 * np.sin(2 * np.pi * t / rng.uniform(30, 60)))
    return solar + np.clip(wind + rng.normal(0, 80, t.size), 0.0, None)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--dwellings", type=int, default=22)
    ap.add_argument("--generators", type=int, default=8)
    ap.add_argument("--days", type=int, default=7)
    ap.add_argument("--points", type=int, default=400)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    args.out.mkdir(parents=True, exist_ok=True)

    lines = [f"# cadence_seconds={CADENCE_S}", "profile_id,kind,index,watts"]
    for d in range(args.dwellings):
        for i, w in enumerate(consumption(rng, args.days)):
            lines.append(f"home{d:02d},consumption,{i},{w:.1f}")
    for g in range(args.generators):
        for i, w in enumerate(generation(rng, args.days)):
            lines.append(f"gen{g:02d},generation,{i},{w:.1f}")
    (args.out / "sample_traces.csv").write_text("\n".join(lines) + "\n")

    weights = np.array([w for _, _, w in TOWNS], dtype=float)
    towns = rng.choice(len(TOWNS), size=args.points, p=weights / weights.sum())
    pts = ["lon,lat"]
    for k in towns:
        lon, lat, _ = TOWNS[k]
        pts.append(f"{lon + rng.normal(0, 0.25):.4f},{lat + rng.normal(0, 0.15):.4f}")
    (args.out / "geo_pool.csv").write_text("\n".join(pts) + "\n")


if __name__ == "__main__":
    main()

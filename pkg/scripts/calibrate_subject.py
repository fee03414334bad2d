#!/usr/bin/env python3
"""Sweep the virtual subject's decision noise and speed jitter against the
target proportion bands, and report the best-margin configuration.

The frozen constants in vibrotex.subject (CALIBRATED_SIGMA and
CALIBRATED_SPEED_CV) come from this sweep: the binding constraints are the
16-vs-32 px accuracy from above (pushes jitter down) and the near-chance
band for pairs among {1, 2, 4} px from below (pushes jitter up).

Usage: python scripts/calibrate_subject.py [--seeds N]
"""

from __future__ import annotations

import argparse

from vibrotex.harness import SessionConfig
from vibrotex.scaling import tally_matrix
from vibrotex.subject import SubjectParams, simulate_cohort

BANDS_32 = 0.78   # every pair containing 32 px judged correctly at least this often
BANDS_16 = 0.58   # every pair containing 16 px
FINE_LO, FINE_HI = 0.35, 0.65  # pairs among {1, 2, 4} px stay near chance
CAL_LO, CAL_HI = 0.78, 0.88    # 16-vs-32 calibration window


def band_margins(records, labels):
    m = tally_matrix(records, labels)
    idx = {lab: k for k, lab in enumerate(labels)}

    def judged_finer(a, b):
        return m.wins[idx[b], idx[a]] / m.totals[idx[b], idx[a]]

    margins = []
    for w in (1, 2, 4, 8, 16):
        margins.append(judged_finer(w, 32) - BANDS_32)
    for w in (1, 2, 4, 8):
        margins.append(judged_finer(w, 16) - BANDS_16)
    for a, b in ((1, 2), (1, 4), (2, 4)):
        v = judged_finer(a, b)
        margins.extend([v - FINE_LO, FINE_HI - v])
    p1632 = judged_finer(16, 32)
    margins.extend([p1632 - CAL_LO, CAL_HI - p1632])
    return min(margins), p1632


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--seeds", type=int, default=10, help="cohorts pooled per config")
    args = parser.parse_args()

    cfg = SessionConfig()
    results = []
    for cv in (0.15, 0.3, 0.45, 0.55, 0.6, 0.65, 0.7):
        for sigma in (0.1, 0.15, 0.2, 0.3, 0.45, 0.6):
            pooled = []
            for seed in range(1, args.seeds + 1):
                params = SubjectParams(sigma=sigma, speed_jitter_cv=cv, seed=seed)
                pooled.extend(simulate_cohort(cfg, params))
            margin, p1632 = band_margins(pooled, cfg.textures)
            results.append((margin, sigma, cv, p1632))
            print(f"sigma={sigma:<5} cv={cv:<5} min-margin={margin:+.3f} 16v32={p1632:.3f}")
    results.sort(reverse=True)
    best = results[0]
    print(f"\nbest: sigma={best[1]} cv={best[2]} (margin {best[0]:+.3f}, 16v32 {best[3]:.3f})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

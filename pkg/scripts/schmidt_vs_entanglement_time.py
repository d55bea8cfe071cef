"""Number of significant JSA singular values versus entanglement time and pump width.

    python scripts/schmidt_vs_entanglement_time.py [--threshold 1e-2] [--points 128]
"""

import argparse

import numpy as np

from dqc_sim.photonics import JsaGrid, SpdcSource, jsa_singular_values


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--threshold", type=float, default=1e-2)
    ap.add_argument("--points", type=int, default=128)
    args = ap.parse_args()
    t_ents = [5.0, 10.0, 20.0, 30.0, 45.0, 60.0, 90.0]
    widths = [20.0, 50.0, 100.0]
    print("T_ent/fs " + " ".join(f"tau_p={w:5.0f}fs" for w in widths) + "   (count above threshold; K)")
    for t in t_ents:
        cells = []
        for w in widths:
            src = SpdcSource(pump_center=30600.0, pump_width=w, t1=0.0, t2=t, center1=15200.0, center2=15400.0)
            s = jsa_singular_values(src, JsaGrid(points=args.points, n_values=None))
            cells.append(f"{int(np.sum(s > args.threshold)):4d};{1 / np.sum(s ** 4):6.2f}")
        print(f"{t:8.1f} " + " ".join(f"{c:>14s}" for c in cells))


if __name__ == "__main__":
    main()

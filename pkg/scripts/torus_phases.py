"""Spin phases on the d-torus, d = 1..3, from the cellular AHSS.

    python scripts/torus_phases.py [--max-dim 3]
"""

import argparse

from invphase import ahss, coeffsys, gcw


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-dim", type=int, default=3)
    args = ap.parse_args()
    spin = coeffsys.load_builtin("spin")
    for d in range(1, args.max_dim + 1):
        rep = ahss.run(gcw.preset("torus", d), spin)
        pieces = ", ".join(f"{g} (p={p})" for p, _, g in rep.graded) or "0"
        tail = "extension open" if rep.extension_ambiguous else f"group {rep.group}"
        print(f"T^{d}: {pieces}; {tail}")


if __name__ == "__main__":
    main()

"""Spin phases on R^d as Borel-Moore homology of (S^d, pt), next to the coefficient table."""

from invphase import ahss, coeffsys, gcw


def main():
    spin = coeffsys.load_builtin("spin")
    lo, hi = spin.window
    ok = True
    for d in range(lo, hi + 1):
        rep = ahss.run(gcw.preset("euclidean_sphere", d), spin)
        expected = spin.group_at("e", d)
        ok &= rep.group == expected
        print(f"R^{d}: {rep.group}  (table: {expected})")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())

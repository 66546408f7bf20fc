"""Pinching verdicts and integral-formula checks on every catalog model."""

import argparse

from curvpinch import models as M
from curvpinch.tensor_core import PreconditionError


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--models", nargs="+", default=list(M.CATALOG_NAMES) + ["sn:8"])
    args = p.parse_args()

    for name in args.models:
        m = M.catalog(name)
        print(f"{name}: n={m.dim} R={m.scalar:.6g} |W|^2={m.weyl_sq:.6g} |Ric0|^2={m.ric0_sq:.3g} V={m.volume:.6g}")
        for tid in M.THEOREM_IDS:
            try:
                v = M.evaluate(m, tid)
            except PreconditionError as exc:
                print(f"  {tid:13s} n/a ({exc})")
                continue
            flag = " degenerate" if v.degenerate else ""
            print(f"  {tid:13s} ratio={v.ratio:.12g} holds={v.holds}{flag}")
        if m.dim == 4:
            for check in (M.gauss_bonnet_4d, M.sigma2_gursky, M.gauss_bonnet_rewrite):
                rep = check(m)
                print(f"  {rep.inequality_id:13s} lhs={rep.lhs:.10g} rhs={rep.rhs:.10g} pass={rep.passed}")


if __name__ == "__main__":
    main()

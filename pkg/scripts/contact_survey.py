"""Contact orders at the zeros of sigma and alpha, with the predicted types of
the ruled surfaces and pedals next to the detected ones.

    python3 scripts/contact_survey.py [names ...]
"""
import argparse

from lightlike import catalog, frame_for
from lightlike.frame import refine_zeros
from lightlike.pedal import contact_report, correspondence_table
from lightlike.ruled import _frame_at

DEFAULT_NAMES = ["tube-gamma1", "tube-gamma4", "ribbon-cubic", "ribbon-quartic", "ribbon-parabola"]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("names", nargs="*", default=DEFAULT_NAMES)
    args = ap.parse_args()
    for name in args.names:
        fr = frame_for(catalog(name))[2]
        print(f"== {name}")
        for inv in ("sigma_L", "sigma_N", "alpha_L", "alpha_N"):
            for r in refine_zeros(fr, inv):
                f1 = _frame_at(fr, r, r.index)
                rep = contact_report(f1, 0)
                orders = " ".join(f"{k}={'-' if v is None else v.label()}" for k, v in rep.orders.items())
                rows = correspondence_table(f1, 0)["rows"]
                bad = [f"{p}:{row['target']}" for p, rs in rows.items() for row in rs if row["match"] is False]
                print(f"  {inv} = 0 at u = {r.param:.9f}: {orders}; mismatches: {bad or 'none'}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Solve an exported LP model with HiGHS and write a variable assignment file.

Usage: solve_lp_highs.py MODEL.lp ASSIGNMENT.txt [--time-limit SECONDS]

The assignment file holds one "name value" pair per line, preceded by an
"Objective <value>" line. Exit status is 0 on an optimal solve, 3 when
highspy is unavailable and 4 when the solve does not reach optimality.
"""

import argparse
import sys


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("model")
    parser.add_argument("assignment")
    parser.add_argument("--time-limit", type=float, default=300.0)
    args = parser.parse_args()

    try:
        import highspy
    except ImportError:
        print("highspy is not installed", file=sys.stderr)
        return 3

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("time_limit", args.time_limit)
    h.setOptionValue("mip_rel_gap", 0.0)
    if h.readModel(args.model) != highspy.HighsStatus.kOk:
        print(f"cannot read {args.model}", file=sys.stderr)
        return 4
    h.run()
    if h.getModelStatus() != highspy.HighsModelStatus.kOptimal:
        print(f"solve ended with {h.modelStatusToString(h.getModelStatus())}", file=sys.stderr)
        return 4

    lp = h.getLp()
    values = h.getSolution().col_value
    with open(args.assignment, "w", encoding="ascii") as out:
        out.write(f"Objective {h.getInfo().objective_function_value!r}\n")
        for name, value in zip(lp.col_names_, values):
            out.write(f"{name} {value!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Quick looks at quatsync output. Needs matplotlib.

    plot.py trajectory out/trajectory.csv     # real parts against t
    plot.py orbit out/orbit*.csv              # (w, v) rings
    plot.py field out/field.csv               # quiver of the reduced flow
    plot.py sweep out/sweep.csv               # equilibrium counts against lambda
"""
import csv
import sys

import matplotlib.pyplot as plt


def read(path):
    with open(path) as f:
        rows = list(csv.reader(f))
    head, body = rows[0], [[float(x) for x in r] for r in rows[1:]]
    return head, list(zip(*body))


def main():
    kind, paths = sys.argv[1], sys.argv[2:]
    fig, ax = plt.subplots()
    if kind == "trajectory":
        head, cols = read(paths[0])
        for name, col in zip(head[1:], cols[1:]):
            if name.startswith("w"):
                ax.plot(cols[0], col, label=name)
        ax.set_xlabel("t")
        ax.legend()
    elif kind == "orbit":
        for p in paths:
            _, (t, w, v) = read(p)
            ax.plot(w, v, lw=0.8)
        ax.set_xlabel("w")
        ax.set_ylabel("v")
    elif kind == "field":
        _, (w, v, dw, dv) = read(paths[0])
        ax.quiver(w, v, dw, dv, angles="xy")
        ax.set_xlabel("w")
        ax.set_ylabel("v")
    elif kind == "sweep":
        head, cols = read(paths[0])
        for name, col in zip(head[1:], cols[1:]):
            ax.step(cols[0], col, where="mid", label=name)
        ax.set_xlabel("lambda")
        ax.legend()
    else:
        sys.exit(f"unknown plot kind {kind}")
    plt.show()


if __name__ == "__main__":
    main()

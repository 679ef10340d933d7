"""Shared helpers for the demo scripts: output folder and optional plotting."""
import os

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "output")
os.makedirs(OUT, exist_ok=True)

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:  # plots are optional; CSV files are always written
    plt = None


def out(name):
    return os.path.join(OUT, name)


def save(fig, name):
    fig.tight_layout()
    fig.savefig(out(name), dpi=120)
    plt.close(fig)
    print(f"saved {out(name)}")

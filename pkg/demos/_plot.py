"""Optional plotting helper shared by the demos.

Figures are written next to the scripts when matplotlib is installed;
otherwise the demos only print their tables.
"""

import os


def save(name, draw):
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return None
    fig, ax = plt.subplots(figsize=(6, 4))
    draw(ax)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = os.path.join(os.path.dirname(os.path.abspath(__file__)), name)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    print(f"figure written to {path}")
    return path

"""
Static SVG rendering of dispersion curves
"""
from pathlib import Path
import logging

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt

from .exceptions import NoDataError

logger = logging.getLogger('polariton_core')

AXIS_LABELS = {
    'omega_k': r'$\omega_k/\omega_0$',
    'eta': r'$\eta$',
    'eta_prime': r"$\eta'$",
}

SVG_PARAMS = {
    'svg.fonttype': 'none',
    'svg.hashsalt': 'polariton',
    'path.simplify': False,
}


def emit_plot(curve, path):
    """
    Write one line per branch with a legend, x on the scan axis and y in
    omega/omega0. Line elements carry the id `branch-<name>`.
    """
    if curve.is_empty:
        raise NoDataError('The curve has no samples to plot')
    target = Path(path)
    if not target.parent.exists():
        raise NoDataError(f"Plot directory does not exist: {target.parent}")

    frame = curve.to_frame()
    with plt.rc_context(SVG_PARAMS):
        fig, ax = plt.subplots(figsize=(6, 4.5))
        for branch in curve.branches:
            rows = frame[frame['branch'] == branch]
            line, = ax.plot(rows['param'], rows['omega_over_omega0'], label=branch, linewidth=1.5)
            line.set_gid(f"branch-{branch}")
        ax.set_xlabel(AXIS_LABELS.get(curve.axis, curve.axis))
        ax.set_ylabel(r'$\Omega/\omega_0$')
        ax.set_title(curve.model)
        ax.legend(loc='best', frameon=False)
        fig.tight_layout()
        fig.savefig(target, format='svg', metadata={'Date': None})
        plt.close(fig)

    logger.info(f"SVG written: {target} | branches={len(curve.branches)}")
    return target

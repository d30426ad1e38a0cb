# plotting.py - SVG sweep plots from result CSV rows

from typing import Dict, List, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

CurveKey = Tuple[str, str, str, str]  # encoding, mitigation, model, p


def _float(value: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        return float("nan")


def point_values(row: Dict[str, str]) -> Tuple[float, float, float, float]:
    """(depth, worst observable error rate, lower error, upper error) of one row.

    VQED rows plot the flip probability equivalent to their quotient estimate.
    """
    depth = _float(row["depth"])
    if row.get("vqed_est") not in (None, "", "nan"):
        rate = (1.0 - _float(row["vqed_est"])) / 2.0
        return depth, rate, 0.0, 0.0
    rate = _float(row["R_obs_worst"])
    low, high = _float(row["ci_low"]), _float(row["ci_high"])
    return depth, rate, max(rate - low, 0.0), max(high - rate, 0.0)


def group_curves(rows: Sequence[Dict[str, str]]) -> Dict[CurveKey, List[Dict[str, str]]]:
    """Included rows grouped per curve and sorted by depth"""
    curves: Dict[CurveKey, List[Dict[str, str]]] = {}
    for row in rows:
        if row.get("excluded", "false") == "true":
            continue
        key = (row["encoding"], row["mitigation"], row["model"], row["p"])
        curves.setdefault(key, []).append(row)
    for points in curves.values():
        points.sort(key=lambda r: _float(r["depth"]))
    return curves


def x_label(rows: Sequence[Dict[str, str]]) -> str:
    if rows and all(row["circuit"].startswith("trotter") for row in rows):
        return "Trotter steps"
    return "fraction of Hamiltonian terms"


def plot_sweep(rows: Sequence[Dict[str, str]], path: str, title: str = "") -> int:
    """Write a two-panel SVG (worst observable error rate above, detection rate below).

    Returns the number of curves drawn.
    """
    curves = group_curves(rows)
    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(7, 7))
    for (encoding, mitigation, model, p), points in curves.items():
        label = f"{encoding} {mitigation} {model} p={p}"
        values = [point_values(row) for row in points]
        xs = [v[0] for v in values]
        top.errorbar(xs, [v[1] for v in values], yerr=[[v[2] for v in values], [v[3] for v in values]],
                     marker="o", capsize=3, label=label)
        bottom.plot(xs, [_float(row["R_det"]) for row in points], marker="s", label=label)
    top.set_ylabel("R_obs,worst")
    bottom.set_ylabel("R_det")
    bottom.set_xlabel(x_label(rows))
    bottom.set_ylim(0.0, 1.0)
    if curves:
        top.legend(fontsize="small")
    if title:
        top.set_title(title)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return len(curves)

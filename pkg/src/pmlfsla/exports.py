"""
CSV and JSON writers for everything the commands emit. CSVs always use "\n" line
endings so repeated runs are byte-identical
"""
import json
from pathlib import Path

import pandas as pd

from .data import PmlDataset
from .evaluation import MetricsReport
from .factorization import FactorState
from .optics import ReachabilityPlot
from .ranking import FeatureRanking

RANKING_FILES = {"QR": "ranking_qr.csv", "Q_ONLY": "ranking_q_only.csv"}


def _write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def write_json(payload: dict, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_reachability(plot: ReachabilityPlot, path: Path) -> Path:
    frame = pd.DataFrame(list(plot.in_order()), columns=["position", "point_index", "reachability", "core_distance"])
    return _write_csv(frame, path)


def write_ranking(ranking: FeatureRanking, ds: PmlDataset, path: Path) -> Path:
    frame = pd.DataFrame(
        {
            "rank": range(1, ranking.d + 1),
            "feature_index": ranking.order,
            "feature_name": [ds.feature_names[i] for i in ranking.order],
            "score": ranking.scores[ranking.order],
            "method": ranking.method.value,
        }
    )
    return _write_csv(frame, path)


def write_trace(state: FactorState, path: Path) -> Path:
    return _write_csv(pd.DataFrame(state.history), path)


def write_disambiguated(state: FactorState, ds: PmlDataset, path: Path) -> Path:
    return _write_csv(pd.DataFrame(state.t_mat, columns=ds.label_names), path)


def write_report(report: MetricsReport, out_dir: Path) -> dict:
    out_dir = Path(out_dir)
    return {
        "report": _write_csv(report.records, out_dir / "report.csv"),
        "summary": write_json(report.to_summary(), out_dir / "summary.json"),
    }


def write_comparison(report: MetricsReport, path: Path) -> Path:
    return _write_csv(report.comparison(), path)


def write_grid(grid: pd.DataFrame, path: Path) -> Path:
    return _write_csv(grid, path)

"""Committed sample CSVs and the default figure set built from them.

The samples were produced by the simulator CLI at reduced repetition counts;
the plotting package itself never imports the simulator.
"""

from __future__ import annotations

from pathlib import Path

from .figures import FigureSpec

SAMPLES_DIR = Path(__file__).parent / "samples"


def sample_path(name: str) -> Path:
    p = SAMPLES_DIR / name
    if not p.exists():
        raise FileNotFoundError(f"no committed sample {name!r} in {SAMPLES_DIR}")
    return p


def default_specs(out_dir) -> list:
    """One spec per figure kind, reading only committed sample CSVs."""
    out = Path(out_dir)
    chan = sample_path("channel.csv")
    return [
        FigureSpec((chan,), "rssi_curve", str(out / "rssi_curve.png")),
        FigureSpec((chan,), "sigma_d_curve", str(out / "sigma_d_curve.png")),
        FigureSpec((sample_path("geometry.csv"),), "geometry_bars",
                   str(out / "geometry_bars.png")),
        FigureSpec((sample_path("stepsize.csv"),), "stepsize_lines",
                   str(out / "stepsize_lines.png")),
        FigureSpec((sample_path("attack_coordinated.csv"),
                    sample_path("attack_random.csv")), "attack_lines",
                   str(out / "attack_lines.png")),
        FigureSpec((sample_path("stalking_no_defense.csv"),
                    sample_path("stalking_tad.csv"),
                    sample_path("stalking_tad_rp.csv")), "stalking_timeseries",
                   str(out / "stalking_timeseries.png")),
    ]

from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
RESULTS = ROOT / "results"


def out_path(name: str) -> Path:
    RESULTS.mkdir(exist_ok=True)
    return RESULTS / name

"""Bundled contract fixtures: small textbook examples and a scan corpus."""
from pathlib import Path

FIXTURE_DIR = Path(__file__).parent
CORPUS_DIR = FIXTURE_DIR / "corpus"

CORPUS = ["DeFi", "Globalcryptox", "FairDare", "Moneybox", "AIRToken", "QuizBLZ"]


def path(name: str) -> Path:
    if not name.endswith(".sol"):
        name += ".sol"
    for candidate in (FIXTURE_DIR / name, CORPUS_DIR / name, FIXTURE_DIR / "unsupported" / name):
        if candidate.exists():
            return candidate
    raise FileNotFoundError(name)


def read(name: str) -> str:
    return path(name).read_text()


def corpus_paths() -> list[Path]:
    return [CORPUS_DIR / f"{name}.sol" for name in CORPUS]

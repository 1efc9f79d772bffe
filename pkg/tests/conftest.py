import os
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def find_conll2002():
    """Locate the CoNLL-2002 Spanish data if present: $CONLL2002_DIR or
    ./data containing esp.train and esp.testb. Returns None when absent."""
    candidates = []
    env = os.environ.get("CONLL2002_DIR")
    if env:
        candidates.append(Path(env))
    candidates.append(ROOT / "data")
    for base in candidates:
        train = base / "esp.train"
        test = base / "esp.testb"
        if train.is_file() and test.is_file():
            return {"train": train, "test": test,
                    "dev": base / "esp.testa"}
    return None

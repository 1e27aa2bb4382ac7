"""Shared helpers for the experiment scripts."""
from __future__ import annotations

import argparse
import logging
from pathlib import Path

from cdpersistence.plot import diagram_svg
from cdpersistence.pipeline import write_diagram


def parser(description: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--out", default="results", help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def setup(args) -> Path:
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def save(dgm, out: Path, stem: str, title: str) -> None:
    write_diagram(dgm, str(out / f"{stem}.json"))
    (out / f"{stem}.svg").write_text(diagram_svg(dgm, title))

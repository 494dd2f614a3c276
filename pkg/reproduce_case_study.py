#!/usr/bin/env python3
"""One-off script running the DemoCar allocation experiments over a seed range.

Usage:
  python reproduce_case_study.py --seeds 1-20 --out case_study.csv
  python reproduce_case_study.py --seeds 1-5 --frequency-hz 1000000 --workers 4

Runs the GA on a 2x2 mesh with 4, 3 and 2 active cores (the 2-core run uses
4 islands of 100 individuals) and writes one summary row per (cores, seed).
"""
import argparse
import csv
import logging
import os
import sys
from typing import List

# Ensure project root is importable when running from a different cwd
ROOT = os.path.abspath(os.path.dirname(__file__))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

import config
from services.democar import build_democar
from services.genetic import AllocationProblem, GaConfig, GeneticAllocator
from services.noc import platform_for_model
from utils.helpers import format_us

logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")
logger = logging.getLogger("reproduce_case_study")

SUMMARY_COLUMNS = ["active_cores", "seed", "best_missed", "best_makespan_us", "schedulable_generation"]

# (активных ядер, островов, особей на острове)
EXPERIMENTS = [
    (4, 1, 20),
    (3, 1, 20),
    (2, 4, 100),
]


def parse_seeds(value: str) -> List[int]:
    if "-" in value:
        first, last = value.split("-", 1)
        return list(range(int(first), int(last) + 1))
    return [int(part) for part in value.split(",")]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", default="1-20")
    parser.add_argument("--generations", type=int, default=config.GA_GENERATIONS)
    parser.add_argument("--frequency-hz", type=int, default=config.DEMOCAR_FREQUENCY_HZ)
    parser.add_argument("--workers", type=int, default=config.EVAL_WORKERS)
    parser.add_argument("--out", default="case_study.csv")
    args = parser.parse_args()

    seeds = parse_seeds(args.seeds)
    model = build_democar(frequency_hz=args.frequency_hz)
    rows = []

    for active, islands, size in EXPERIMENTS:
        reshaped, platform = platform_for_model(model, 2, 2, active)
        problem = AllocationProblem(reshaped, platform)
        schedulable = 0
        for seed in seeds:
            ga_config = GaConfig(
                generations=args.generations,
                population=size,
                islands=islands,
                island_population=size,
                seed=seed,
                workers=args.workers,
            )
            history = GeneticAllocator(problem, ga_config).run()
            best = history.best.best
            found = history.first_schedulable_generation()
            schedulable += best.missed == 0
            rows.append([active, seed, best.missed, format_us(best.makespan_ns), found if found is not None else ""])
            logger.info(f"{active} ядер, seed {seed}: пропущено {best.missed}, поколение {found}")
        logger.info(f"✅ {active} активных ядер: планируемо для {schedulable} из {len(seeds)} seed")

    with open(args.out, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(SUMMARY_COLUMNS)
        writer.writerows(rows)
    logger.info(f"Сводка записана в {args.out}")
    return 0


if __name__ == "__main__":
    try:
        sys.exit(main())
    except Exception:
        logger.exception("Эксперимент прерван")
        sys.exit(1)

"""
Runtime configuration for drht.

Defaults are read from the environment (optionally from a `.env` file next
to the package) so that budgets, seeds and worker counts can be pinned per
machine without touching the command line.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

env_path = Path(__file__).parent / ".env"
load_dotenv(dotenv_path=env_path)

DEFAULT_BUDGET = int(os.getenv("DRHT_BUDGET", "1000000"))
DEFAULT_PRODUCT_METRIC = os.getenv("DRHT_PRODUCT_METRIC", "l1")
DEFAULT_WORKERS = int(os.getenv("DRHT_WORKERS", "1"))
DEFAULT_SEED = int(os.getenv("DRHT_SEED", "0"))
DEFAULT_TRIALS = int(os.getenv("DRHT_TRIALS", "200"))
# A law counts as exercised after this many passing trials, and a law that
# compares distances must see this many with 0 < D_r < infinity.
DEFAULT_MIN_PASSES = int(os.getenv("DRHT_MIN_PASSES", "20"))
DEFAULT_MIN_NONTRIVIAL = int(os.getenv("DRHT_MIN_NONTRIVIAL", "5"))
# Domains up to this size get every good subset enumerated; larger ones use
# seeded maximal sets plus a conflict-clique lower bound.
DEFAULT_EXHAUSTIVE_LIMIT = int(os.getenv("DRHT_EXHAUSTIVE_LIMIT", "10"))
LOG_LEVEL = os.getenv("DRHT_LOG_LEVEL", "WARNING")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"

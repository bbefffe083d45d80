"""Scenario II grid (Models II-1..II-4, sliced Wasserstein, L = 50).

    python scripts/run_table2.py --reps 20 --out results/table2
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from run_table1 import SETTINGS, parser, run_grid, write_table  # noqa: E402

MODELS = ("II-1", "II-2", "II-3", "II-4")

if __name__ == "__main__":
    p = parser("results/table2")
    p.add_argument("--L", type=int, default=50)
    args = p.parse_args()
    table = run_grid(MODELS, SETTINGS, args, metric="SW2", L=args.L)
    write_table(Path(args.out) / "table2.csv", table)

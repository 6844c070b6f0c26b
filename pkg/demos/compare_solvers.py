"""
Comparing both solvers over several seeds
=========================================

Runs COEBA and MFEA for five seeds, stores one JSON record per run and
prints the verdict table with Wilcoxon rank-sum results. The command line
equivalent is

    coeba run --scenario Test_Case_4_1 --solver both --seeds 1-5 --budget 30000 --out demo_results
    coeba compare --scenario Test_Case_4_1 --in demo_results
"""

import tempfile

from coeba import harness

out = tempfile.mkdtemp(prefix="coeba_demo_")
seeds = [1, 2, 3, 4, 5]
for solver in ("coeba", "mfea"):
    harness.run_experiment("Test_Case_4_1", solver, seeds, 30_000, out_dir=out)

first = harness.load_records(out, "Test_Case_4_1", "coeba")
second = harness.load_records(out, "Test_Case_4_1", "mfea")
report = harness.compare(first, second)
print(report.to_text())
print("verdicts:", "-".join(report.verdicts))

# report_all writes report.txt/json/csv for every scenario in the folder
harness.report_all(out)
print("records and reports in", out)

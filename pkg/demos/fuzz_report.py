"""Randomized cross-check of every construction, then replay of the worst case.

Each trial draws a pencil from small rational data, four members and all
auxiliary objects, and compares every method with the parameter cross
ratio. The trial's scene is stored as JSON, so any record can be re-run.

Run from the repository root:  python demos/fuzz_report.py [trials] [seed]
"""
import sys

from conicpencil.fuzz import check_scene, fuzz, run_trial
from conicpencil.scene import dumps

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 50
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 42

report = fuzz(trials, seed)
print(f"{report.trials} trials, seed {report.seed}: {report.checks} checks, {len(report.failures)} failures")
print(f"worst deviation {report.worst_deviation:.2e} ({report.worst['method']} in trial {report.worst['trial']})")
print(f"allowed skips: {report.skipped}")

trial = run_trial(seed, report.worst["trial"])
devs, _ = check_scene(trial.scene)
print(f"\nreplaying trial {trial.trial} from its scene gives {devs[report.worst['method']]:.2e} again")
print("scene:")
print(dumps(trial.scene))

# A threshold nobody can meet: every check now fails, and each failure replays exactly.
strict = fuzz(2, seed, threshold=1e-300)
exact = all(check_scene(f["scene"])[0][f["method"]] == f["deviation"] for f in strict.failures if "reason" not in f)
print(f"\nwith threshold 1e-300: {len(strict.failures)} failures, all replay bit-for-bit: {exact}")

#!/usr/bin/env python3
"""Grensemble demo.

This script generates a synthetic gold corpus and five noisy prediction
corpora, ensembles the predictions and compares the scores of the individual
predictions with the score of the ensemble.
"""

import grensemble
import pathlib
import subprocess

out_dir = pathlib.Path("grensemble-demo")

config = grensemble.Config.from_dict({"seed": 1, "jobs": 2})
gr = grensemble.Grensemble(config)

print(f"generating synthetic corpora in {out_dir}")
gold_path, *pred_paths = gr.synth(out_dir, n_sentences=50, m=5, n_nodes=15)

print("ensembling predictions")
ensemble_path = out_dir / "ensemble.txt"
_, report = gr.ensemble_files(pred_paths, ensemble_path, out_dir / "report.json")
print(report["pivot_index"].value_counts().sort_index().to_string())

print("scoring")
for path in [*pred_paths, ensemble_path]:
    score, _ = gr.score_files(path, gold_path)
    print(f"{path.name:>14}: F1 {score.f1:.4f}")

print("done")
print(f"\ne.g. grensemble stats {out_dir}/pred_*.txt --gold {gold_path}:")
subprocess.run(["grensemble", "stats", *map(str, pred_paths), "--gold", str(gold_path)])

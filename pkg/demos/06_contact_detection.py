"""Instrumented-knife contact detection on a synthetic corpus.

Generates replicates for the three cut types, trains 500-tree forests under
the three split protocols, and prints a results table; then repeats for the
approaching-contact task (10-100 ms before onset).
"""

from cutsim.contact import (
    ConfusionStats,
    SplitScheme,
    build_split,
    evaluate,
    label_approaching,
    make_corpus,
    preprocess,
    train_forest,
)

N_TREES = 150  # enough for a demo; the acceptance suite runs 500

corpus = make_corpus(replicates_per_type=6, n_samples=800, drift=0.6, seed=12)
replicates, removed = preprocess(corpus)
print(f"{len(replicates)} replicates, {sum(len(r) for r in replicates)} samples "
      f"({sum(removed.values())} outliers removed)")

by_type = {}
for r in replicates:
    by_type.setdefault(r.cut_type, []).append(r)


def row(label, action, stats: ConfusionStats):
    print(f"{label:<28} {action:<10} {stats.false_positives:>6} {stats.false_negatives:>6} "
          f"{stats.total:>8} {stats.error_rate * 100:7.2f}%")


print(f"\n{'data':<28} {'action':<10} {'FP':>6} {'FN':>6} {'total':>8} {'error':>8}")
for kind, label in (("swt", "superficial, within type"),
                    ("rwt", "by replicate, within type")):
    for cut_type, group in sorted(by_type.items()):
        train, test = build_split(group, SplitScheme(kind, seed=0))
        model = train_forest(train, n_trees=N_TREES, mtry=4, seed=0, keep_bootstrap=False)
        row(label, cut_type, evaluate(model, test))
train, test = build_split(replicates, SplitScheme("sat", seed=0))
model = train_forest(train, n_trees=N_TREES, mtry=4, seed=0, keep_bootstrap=False)
row("superficial, across types", "all cuts", evaluate(model, test))

print("\napproaching contact (classify 10-100 ms before onset):")
for cut_type, group in sorted(by_type.items()):
    relabeled = [label_approaching(r) for r in group]
    train, test = build_split(relabeled, SplitScheme("swt", seed=0))
    model = train_forest(train, n_trees=N_TREES, mtry=4, seed=0, keep_bootstrap=False)
    row("swt approaching", cut_type, evaluate(model, test))

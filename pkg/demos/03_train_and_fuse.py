"""Train the probabilistic fusion algorithms and inspect what they learn.

ProbFuse divides each result list into x equal segments, SegFuse uses
exponentially growing segments (5, 15, 35, ...), and SlideFuse smooths a
per-position relevance estimate with a sliding window. All three learn,
per input system, how likely a document at a given place in the list is
to be relevant, using judged training topics only.

Run with: python3 demos/03_train_and_fuse.py
"""

import random

from fuseval import FusionSpec, fuse_run, parse_qrels
from fuseval.fusion import train_probfuse, train_segfuse, train_slidefuse
from fuseval.trec_io import Run, canonical_sort

rng = random.Random(7)
TOPICS = [str(t) for t in range(1, 9)]
POOL = [f"d{i:02d}" for i in range(30)]


def synthetic_run(tag):
    lists = {}
    for topic in TOPICS:
        docs = rng.sample(POOL, 12)
        lists[topic] = canonical_sort([(d, round(rng.uniform(0, 10), 3)) for d in docs])
    return Run(run_tag=tag, lists=lists)


runs = [synthetic_run(f"sys{i}") for i in range(2)]
qrels = parse_qrels("".join(
    f"{t} 0 {d} {rng.randint(0, 1)}\n" for t in TOPICS for d in rng.sample(POOL, 15)
))

train_topics = TOPICS[:6]
test_topics = TOPICS[6:]

model = train_probfuse(runs, qrels, train_topics, x=4, variant="all")
print("probfuse segment probabilities (4 segments per list):")
for tag, probs in model.probabilities.items():
    print(f"  {tag}: " + " ".join(f"{p:.3f}" for p in probs))

model = train_segfuse(runs, qrels, train_topics)
print("segfuse segment probabilities (sizes 5, 15, ...):")
for tag, probs in model.probabilities.items():
    print(f"  {tag}: " + " ".join(f"{p:.3f}" for p in probs))

model = train_slidefuse(runs, qrels, train_topics, a=2)
print("slidefuse windowed positional probabilities (first 6 ranks):")
for tag, probs in model.probabilities.items():
    print(f"  {tag}: " + " ".join(f"{p:.3f}" for p in probs[:6]))

# Fusing hands the spec, the runs and the trained model to fuse_run; only
# the held-out topics are merged, never the training topics.
spec = FusionSpec("slidefuse", {"a": 2})
fused = fuse_run(spec, runs, test_topics, model=model)
print(f"\nfused held-out topics {test_topics}:")
for topic in test_topics:
    top = [d for d, _ in fused.topic_list(topic)[:5]]
    print(f"  topic {topic}: {top}")

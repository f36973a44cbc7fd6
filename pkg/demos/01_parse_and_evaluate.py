"""Parse a TREC run and qrels, then walk through the evaluation metrics.

Run with: python3 demos/01_parse_and_evaluate.py
"""

from fuseval import evaluate, parse_qrels, parse_run

RUN_TEXT = """\
301 Q0 doc-a 1 9.2 demo
301 Q0 doc-b 2 8.7 demo
301 Q0 doc-c 3 8.1 demo
301 Q0 doc-d 4 5.5 demo
301 Q0 doc-e 5 2.0 demo
302 Q0 doc-f 1 7.7 demo
302 Q0 doc-a 2 6.3 demo
302 Q0 doc-g 3 1.1 demo
"""

QRELS_TEXT = """\
301 0 doc-a 1
301 0 doc-b 0
301 0 doc-d 2
301 0 doc-x 1
302 0 doc-f 1
302 0 doc-g 0
"""

run = parse_run(RUN_TEXT)
qrels = parse_qrels(QRELS_TEXT)

print(f"run tag: {run.run_tag}")
print(f"topics in run: {run.topics()}")
print(f"judged relevant on 301: {sorted(qrels.relevant_docs('301'))}")
print()

# Ranking is always recomputed from scores; the rank column is ignored.
# Evaluation averages over every qrels topic that has at least one
# relevant document, scoring topics missing from the run as zero.
report = evaluate(run, qrels, ["map", "P_5", "recall", "Rprec", "bpref", "ndcg"])

print("per-topic values:")
for topic_id, topic_eval in sorted(report.topics.items()):
    for metric_id, value in topic_eval.values.items():
        print(f"  {metric_id:>8}  topic {topic_id}  {value:.4f}")

print("aggregates over", report.eligible_topics, "eligible topics:")
for metric_id, value in report.aggregates.items():
    print(f"  {metric_id:>8}  {value:.4f}")

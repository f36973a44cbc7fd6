"""Exception hierarchy shared across the platform."""


class FusevalError(Exception):
    """Base class for all errors raised by this package."""


# --- parsing ---

class MalformedLine(FusevalError):
    def __init__(self, line_no, reason=""):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"malformed line {line_no}" + (f": {reason}" if reason else ""))


class DuplicateDocument(FusevalError):
    def __init__(self, topic_id, doc_id):
        self.topic_id = topic_id
        self.doc_id = doc_id
        super().__init__(f"duplicate document {doc_id!r} in topic {topic_id!r}")


class DuplicateJudgment(FusevalError):
    def __init__(self, topic_id, doc_id):
        self.topic_id = topic_id
        self.doc_id = doc_id
        super().__init__(f"conflicting judgments for ({topic_id!r}, {doc_id!r})")


class RunTagMismatch(FusevalError):
    def __init__(self, expected, found, line_no):
        self.expected = expected
        self.found = found
        self.line_no = line_no
        super().__init__(f"run tag changed from {expected!r} to {found!r} at line {line_no}")


# --- fusion ---

class NoRuns(FusevalError):
    pass


class MissingWeight(FusevalError):
    def __init__(self, run_tag):
        self.run_tag = run_tag
        super().__init__(f"no weight supplied for run {run_tag!r}")


class AllWeightsZero(FusevalError):
    pass


class NoTrainingTopics(FusevalError):
    pass


class InvalidSegmentCount(FusevalError):
    pass


class NegativeWindow(FusevalError):
    pass


class ModelRunMismatch(FusevalError):
    def __init__(self, missing_tags):
        self.missing_tags = missing_tags
        super().__init__(f"model has no parameters for runs: {sorted(missing_tags)}")


class UnknownAlgorithm(FusevalError):
    def __init__(self, algorithm_id, valid):
        self.algorithm_id = algorithm_id
        self.valid = sorted(valid)
        super().__init__(f"unknown algorithm {algorithm_id!r}; valid: {self.valid}")


class InvalidFusionParams(FusevalError):
    pass


# --- metrics ---

class UnknownTopic(FusevalError):
    def __init__(self, topic_id):
        self.topic_id = topic_id
        super().__init__(f"topic {topic_id!r} not present in qrels")


class NoRelevant(FusevalError):
    def __init__(self, topic_id):
        self.topic_id = topic_id
        super().__init__(f"topic {topic_id!r} has no judged-relevant documents")


class EmptyTopicSubset(FusevalError):
    pass


class UnknownMetric(FusevalError):
    def __init__(self, metric_id, valid):
        self.metric_id = metric_id
        self.valid = sorted(valid)
        super().__init__(f"unknown metric {metric_id!r}; valid: {self.valid}")


# --- significance ---

class TooFewPairs(FusevalError):
    pass


class MisalignedTopics(FusevalError):
    pass


# --- experiments ---

class OverlappingSplit(FusevalError):
    pass


class UnknownTopicInSplit(FusevalError):
    def __init__(self, topic_ids):
        self.topic_ids = sorted(topic_ids)
        super().__init__(f"split references topics not in the dataset: {self.topic_ids}")


class KTooLarge(FusevalError):
    pass


class TrainingRequired(FusevalError):
    """A trained algorithm was requested under a plan with no training topics."""


class DuplicateSpec(FusevalError):
    pass


# --- storage / export ---

class NotFound(FusevalError):
    def __init__(self, what):
        super().__init__(f"not found: {what}")


class StoreCorrupt(FusevalError):
    pass


class StoreLocked(FusevalError):
    pass


class EmptyDataset(FusevalError):
    pass


class IncompleteTable(FusevalError):
    pass

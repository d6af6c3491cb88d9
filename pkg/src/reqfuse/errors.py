"""Exception types raised across the package."""


class ReqfuseError(Exception):
    """Base class for every error this package raises on purpose."""


# ---- dataset loading / fold protocol ----

class MissingColumn(ReqfuseError):
    pass


class UnknownLabel(ReqfuseError):
    pass


class DuplicatePairId(ReqfuseError):
    pass


class EmptyFile(ReqfuseError):
    pass


class InvalidDataset(ReqfuseError):
    pass


class ClassTooSmall(ReqfuseError):
    pass


# ---- text representation ----

class EmptyCorpus(ReqfuseError):
    pass


class DegenerateStats(ReqfuseError):
    pass


# ---- similarity / latent models ----

class DimMismatch(ReqfuseError):
    pass


class RankTooLarge(ReqfuseError):
    pass


class EmptyMatrix(ReqfuseError):
    pass


class WrongComponents(ReqfuseError):
    pass


# ---- LLM knowledge store / PCA / fusion ----

class MalformedRecord(ReqfuseError):
    pass


class DuplicateKey(ReqfuseError):
    pass


class DimInconsistent(ReqfuseError):
    pass


class MissingScore(ReqfuseError):
    pass


class TooFewSamples(ReqfuseError):
    pass


class BadTargetDim(ReqfuseError):
    pass


class MissingBlock(ReqfuseError):
    pass


# ---- classifiers ----

class SingleClass(ReqfuseError):
    pass


class NonFinite(ReqfuseError):
    pass


class DimZero(ReqfuseError):
    pass


class UnknownAlgo(ReqfuseError):
    pass


class EmptySpace(ReqfuseError):
    pass


# ---- evaluation / pipeline ----

class LengthMismatch(ReqfuseError):
    pass


class LeakageDetected(ReqfuseError):
    pass


class MissingStore(ReqfuseError):
    pass


class BadConfig(ReqfuseError):
    pass

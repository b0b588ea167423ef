"""Exception types shared across the toolchain.

Every error that a pipeline stage can raise derives from TrendlabError so the
CLI can map failures onto its exit-code contract (2 = usage/config, 3 = data).
"""

from __future__ import annotations


class TrendlabError(Exception):
    """Base class for all toolchain errors."""


class ConfigError(TrendlabError):
    """Invalid configuration: unknown keys, bad enum values, missing config paths."""


# -- corpus ingestion ---------------------------------------------------------

class MissingFile(TrendlabError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"file not found: {path}")


class DuplicateCompanyYear(TrendlabError):
    def __init__(self, company_id: str, year: int):
        self.company_id = company_id
        self.year = year
        super().__init__(f"duplicate report for ({company_id}, {year})")


class BadEnum(TrendlabError):
    def __init__(self, field: str, value: str, allowed: tuple[str, ...]):
        self.field = field
        self.value = value
        super().__init__(f"bad {field} value {value!r}; expected one of {allowed}")


class MalformedRow(TrendlabError):
    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        super().__init__(f"malformed manifest row at line {line_number}: {reason}")


class BadLexicon(TrendlabError):
    """Lexicon file violates its invariants (duplicate ids, empty/bad phrases)."""


# -- scoring ------------------------------------------------------------------

class EmptyYear(TrendlabError):
    def __init__(self, year: int):
        self.year = year
        super().__init__(f"no documents for year {year}")


# -- clustering ---------------------------------------------------------------

class TooFewSamples(TrendlabError):
    def __init__(self, k: int, n: int):
        self.k = k
        self.n = n
        super().__init__(f"k={k} exceeds sample count n={n}")


class DegenerateClustering(TrendlabError):
    """Fewer than 2 non-empty clusters (or too few points to score)."""


class TooFewCompanies(TrendlabError):
    def __init__(self, n: int):
        self.n = n
        super().__init__(f"need at least 3 companies, got {n}")


# -- classification -----------------------------------------------------------

class LabelMismatch(TrendlabError):
    def __init__(self, company_id: str):
        self.company_id = company_id
        super().__init__(f"no class label for company {company_id!r}")


class DimensionMismatch(TrendlabError):
    def __init__(self, expected: int, got):
        super().__init__(f"sample has shape {got}, forest was trained on {expected} features")


class DegenerateForest(Warning):
    """No split ever reduced impurity; importances degrade to all zeros.

    A warning rather than an error: the all-zero vector is still a valid,
    documented output.
    """


# -- regression ---------------------------------------------------------------

class ConstantRegressor(TrendlabError):
    """The regressor column has zero variance."""


class TooFewObservations(TrendlabError):
    def __init__(self, n: int, needed: int):
        super().__init__(f"need at least {needed} observations, got {n}")


class AllZeroResiduals(TrendlabError):
    """Durbin-Watson is undefined when every residual is zero."""


# -- strategy -----------------------------------------------------------------

class TopicSetMismatch(TrendlabError):
    def __init__(self, detail: str):
        super().__init__(f"topic sets do not line up: {detail}")


# -- pipeline orchestration ---------------------------------------------------

class MissingUpstream(TrendlabError):
    def __init__(self, stage: str, missing: str):
        self.stage = stage
        super().__init__(f"stage {stage!r} requires {missing}; run the upstream stage first")

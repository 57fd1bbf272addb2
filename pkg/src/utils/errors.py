#Error hierarchy. exit_code is what main.py hands back to the shell.


class TagDiffusionError(Exception):
    exit_code = 3


class ConfigError(TagDiffusionError, ValueError):
    #usage or configuration problem
    exit_code = 1


class DataError(TagDiffusionError):
    #the input data cannot support the requested operation
    exit_code = 2


class IngestionError(DataError, ValueError):
    pass


class ParseError(IngestionError):

    def __init__(self, line_number, message):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class PurgedDatasetError(DataError):
    pass


class UnknownLabelError(DataError, KeyError):

    def __init__(self, kind, label):
        self.kind = kind
        self.label = label
        super().__init__(f"unknown {kind} label: {label!r}")

    def __str__(self):
        return self.args[0]


class UnscorableUserError(DataError):

    def __init__(self, user):
        self.user = user
        super().__init__(f"user {user} has an empty training profile")


class EvaluationError(DataError):
    pass


class OracleSizeError(DataError):
    pass


class ReportError(TagDiffusionError):
    #destination not writable
    exit_code = 2


class ContractError(TagDiffusionError, ValueError):
    #a caller broke an operation's precondition
    exit_code = 3


class BoundsError(ContractError, IndexError):
    pass

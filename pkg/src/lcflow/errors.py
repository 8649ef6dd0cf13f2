class LCFlowError(ValueError):
    """Base error. `code` is a short machine-readable tag."""

    code = "error"

    def __init__(self, message: str = "", code: str | None = None, **details):
        if code is not None:
            self.code = code
        self.details = details
        super().__init__(f"{self.code}: {message}" if message else self.code)


class InvalidInstance(LCFlowError):
    code = "invalid-instance"


class PathFormRequired(LCFlowError):
    code = "path-form-required"


class PremiseViolated(LCFlowError):
    code = "premise-violated"


class OracleBoundExceeded(LCFlowError):
    code = "oracle-bound-exceeded"


class OracleContractViolation(LCFlowError):
    code = "oracle-contract-violation"


class ParseError(LCFlowError):
    code = "parse-error"

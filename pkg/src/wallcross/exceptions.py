"""Error types shared across the engine.

``SchemaError`` marks malformed input files or values (CLI exit code 2);
``ConventionError`` marks an internal orientation/sign invariant violation
(CLI exit code 3) and should never fire on well-formed problems.
"""


class SchemaError(ValueError):
    pass


class ConventionError(RuntimeError):
    pass

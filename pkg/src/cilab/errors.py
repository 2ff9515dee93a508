"""Exception hierarchy; CLI exit codes hang off these classes."""


class CilabError(Exception):
    exit_code = 1


class FieldError(CilabError, ValueError):
    exit_code = 2


class ParseError(CilabError, ValueError):
    exit_code = 2


class BudgetExceeded(CilabError):
    exit_code = 3


class IntegrityError(CilabError):
    exit_code = 4


class NotOnVariety(CilabError, ValueError):
    pass


class SectionError(CilabError, ValueError):
    """Hyperplane section is not a complete intersection of the same type."""

    exit_code = 2


class ReconstructionError(CilabError, ArithmeticError):
    """Counts do not determine an integral middle polynomial."""

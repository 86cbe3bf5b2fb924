class ExprError(Exception):
    pass


class ParseError(ExprError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class UnknownSymbolError(ParseError):
    def __init__(self, name: str, position: int, text: str = ""):
        self.name = name
        super().__init__(f"unknown symbol {name!r}", position, text)


class EvaluationError(ExprError, ArithmeticError):
    pass


class DivisionByZero(EvaluationError, ZeroDivisionError):
    pass


class EvenRootOfNegative(EvaluationError, ValueError):
    pass


class UnboundSymbol(EvaluationError, KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"symbol {name!r} has no binding")

    def __str__(self):
        return self.args[0]


class NotPolynomial(ExprError, ValueError):
    pass


class SamplingError(ExprError, RuntimeError):
    """Rejection sampling could not find a point inside the domain."""

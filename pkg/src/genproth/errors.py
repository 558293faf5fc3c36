"""Exception types shared across the package."""


class FormError(ValueError):
    """An invalid ``K*p^n+1`` triple.

    ``constraint`` names the violated condition (``"K"``, ``"n"``, ``"p-prime"``,
    ``"gcd"``, ``"p-size"``, ``"proth"``, ``"generalized"``, ``"syntax"``).
    """

    def __init__(self, constraint: str, message: str):
        super().__init__(message)
        self.constraint = constraint


class NotInvertible(ArithmeticError):
    """Raised when a residue shares a nontrivial factor with the modulus."""

    def __init__(self, gcd: int, modulus: int):
        super().__init__(f"gcd {gcd} with modulus {modulus}")
        self.gcd = gcd
        self.modulus = modulus


class ResourceError(RuntimeError):
    """A configured size, memory or work budget would be exceeded."""


class IncompleteFactorization(ResourceError):
    """Factoring stopped with an unfactored composite cofactor."""

    def __init__(self, factors, cofactor: int):
        super().__init__(f"unfactored cofactor {cofactor}")
        self.factors = factors
        self.cofactor = cofactor

"""Exception types raised by funclust.

The CLI reports a domain failure by printing the exception class name, so the
names below are part of the public surface.
"""


class FunclustError(Exception):
    """Base class for all domain errors."""


# metric spaces and maps
class Asymmetric(FunclustError):
    def __init__(self, i, j, a, b):
        super().__init__(f"d[{i}][{j}]={float(a):.12g} but d[{j}][{i}]={float(b):.12g}")
        self.i, self.j = i, j


class NonzeroDiagonal(FunclustError):
    def __init__(self, i, value):
        super().__init__(f"d[{i}][{i}]={float(value):.12g}")
        self.i = i


class TriangleViolation(FunclustError):
    def __init__(self, i, j, k):
        super().__init__(f"d({i},{j}) > d({i},{k}) + d({k},{j})")
        self.i, self.j, self.k = i, j, k

    @property
    def triple(self):
        return (self.i, self.j, self.k)


class ZeroOffDiagonal(FunclustError):
    def __init__(self, i, j):
        super().__init__(f"d[{i}][{j}] = 0 for distinct points (pass pseudo=True to allow)")
        self.i, self.j = i, j


class BadMatrix(FunclustError):
    """Matrix is not square, not finite, or has negative entries."""


class TooFewPoints(FunclustError):
    pass


class EmptySpace(FunclustError):
    pass


class NonpositiveScale(FunclustError):
    pass


class NegativeScale(FunclustError):
    pass


class LabelMismatch(FunclustError):
    pass


# persistent sets
class GroundSetMismatch(FunclustError):
    pass


class NotADendrogram(FunclustError):
    pass


class NotAPersistentSet(FunclustError):
    pass


# functoriality checks
class UnknownScheme(FunclustError):
    pass


class UncoveredPoint(FunclustError):
    pass


# Gromov-Hausdorff
class NotACorrespondence(FunclustError):
    pass


class TooLarge(FunclustError):
    pass


class EmptySubset(FunclustError):
    pass


# sampling experiments
class BadSpec(FunclustError):
    pass


class MissingLabels(FunclustError):
    pass


class OverlappingComponents(FunclustError):
    pass


class SampleTooSparse(FunclustError):
    pass


# zigzags
class EmptySample(FunclustError):
    pass


class ShapeMismatch(FunclustError):
    pass

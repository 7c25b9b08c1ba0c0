"""The thirteen dimension-8 representatives with s = 8, rows as vectors.

Hard data for the reproduction harness: each matrix's rows form one
well-rounded configuration of perfection rank 8; the list is pairwise
inequivalent and every class has an orientation-reversing stabilizer
element.
"""

from .forms import VectorConfiguration

RANK8_MATRICES = (
    (
        (0, 0, 0, 0, 0, -1, 0, 0),
        (0, -1, 0, 0, 0, 1, 0, 0),
        (0, -1, 0, 1, 0, 1, 1, 0),
        (0, 0, 0, 1, 0, 1, 0, 0),
        (0, -1, -1, 1, 0, 0, 0, 0),
        (1, 1, 1, 0, 0, 0, 0, 0),
        (0, 2, 0, -2, 0, -1, -1, -1),
        (0, -1, -1, 1, 1, 1, 1, 1),
    ),
    (
        (0, 0, 1, 1, 1, 0, 0, 0),
        (0, 0, -1, -2, -1, 0, 0, 0),
        (0, 0, -2, -2, -2, 0, -1, 0),
        (0, 0, -1, -1, -1, 0, 0, -1),
        (0, -1, -1, -1, -2, 0, 0, 0),
        (1, 1, 1, 1, 1, 0, 0, 0),
        (-1, 1, 3, 3, 3, 0, 1, 1),
        (0, -1, -2, -2, -2, 1, 0, 0),
    ),
    (
        (0, 1, 1, 0, 0, 0, -1, 0),
        (0, -1, -2, 0, 0, 0, 1, 0),
        (0, -1, -2, 0, 0, 0, 1, 1),
        (0, -1, -1, 0, 0, -1, 0, 0),
        (0, -1, -1, 0, 0, 1, 0, 0),
        (1, 1, 1, 0, 0, 0, 0, 0),
        (0, 1, 3, 0, -1, 0, 0, 0),
        (-1, -1, -2, 1, 1, 0, 0, 0),
    ),
    (
        (0, 0, 1, -1, 0, 0, 0, -1),
        (0, 0, -2, 1, 0, 0, 0, 1),
        (0, -1, -2, 1, 0, 1, 0, 1),
        (0, -1, -1, 0, 0, 0, 0, 1),
        (0, -1, -1, 1, 0, 0, 0, 0),
        (1, 1, 1, 0, 0, 0, 0, 0),
        (0, 2, 3, -2, 0, -1, -1, -2),
        (0, -1, -2, 1, 1, 1, 1, 1),
    ),
    (
        (-1, -2, 0, 0, 1, 1, 1, -1),
        (0, 1, 0, 0, 0, -1, -1, 0),
        (0, 1, 0, 0, -1, -1, -1, 2),
        (0, 0, 1, 0, 0, 0, 0, -1),
        (0, -1, 0, 0, 0, 0, 1, -1),
        (0, 1, 0, 0, -1, -1, -2, 1),
        (0, -1, -1, -1, 1, 1, 1, 0),
        (1, 1, 1, 1, 0, 0, 0, 0),
    ),
    (
        (0, 0, 0, -1, 0, 0, 0, 1),
        (0, -1, 0, 1, 0, 0, 1, 0),
        (0, 1, 0, 0, -1, 0, -1, 0),
        (1, -1, 0, 1, 1, 0, 0, 0),
        (0, 1, -1, 0, 0, 0, 0, 0),
        (-1, 1, 1, 0, 0, 0, 0, 0),
        (0, 2, 0, -1, -1, -1, -1, 0),
        (1, -2, 0, 1, 1, 1, 1, 0),
    ),
    (
        (0, 0, 0, 0, -1, 1, 0, 0),
        (0, 0, 1, -1, -1, 0, 0, 1),
        (0, 0, 0, 1, 1, -1, 0, -1),
        (0, 0, 0, 0, 0, 0, 1, 1),
        (0, 0, -1, 0, 0, -1, 0, 0),
        (1, 0, 1, 0, 0, 0, 0, 0),
        (0, 0, 1, -1, -1, 1, 0, 0),
        (0, 1, -1, 1, 1, 0, 0, 0),
    ),
    (
        (-1, 1, -1, -2, -1, -1, -2, 0),
        (0, 0, 1, 1, 0, 0, 1, 0),
        (-1, 0, -1, -1, -1, 0, -1, 1),
        (0, -1, 0, 1, 1, 1, 2, 0),
        (1, 0, 2, 1, 1, 0, 1, 0),
        (0, 1, 0, 0, 0, -1, -1, 0),
        (0, 1, -1, -1, -1, -1, -1, 0),
        (1, 0, 1, 1, 1, 1, 1, 0),
    ),
    (
        (1, 1, -1, -1, -1, 0, 0, 1),
        (-1, 0, 1, 1, 1, -1, -1, 0),
        (0, 0, -1, 0, 0, 1, 1, 0),
        (-1, 0, 1, 0, 0, -1, 0, 0),
        (0, -1, 1, 1, 0, 0, 0, 0),
        (0, 0, 0, 0, 1, 1, 0, 0),
        (1, 0, -1, -1, 0, 0, 0, 0),
        (1, 1, 0, 0, 0, 0, 0, 0),
    ),
    (
        (1, 1, 0, 0, -1, 0, 0, 0),
        (-1, 0, 0, -1, 1, 0, -1, 0),
        (1, -1, 0, 1, 0, 0, 0, 0),
        (-1, 0, 0, -1, 0, 0, -1, 1),
        (-1, -1, 0, 0, 0, 1, 1, 0),
        (0, -1, -1, 0, 1, 0, 0, 0),
        (1, 1, 0, 1, 0, 0, 0, 0),
        (1, 1, 1, 0, 0, 0, 0, 0),
    ),
    (
        (0, 0, 0, 0, 0, 1, 0, -1),
        (0, 0, 0, 1, 0, 1, 0, 1),
        (0, 0, 0, -1, 0, -1, 1, 0),
        (-1, 0, 1, -1, 0, -2, 0, 0),
        (0, 1, -1, 0, 1, 1, 0, 0),
        (0, -1, 1, 1, 0, 0, 0, 0),
        (0, 0, 1, -1, 0, -1, 0, 0),
        (1, 1, -1, 1, 0, 1, 0, 0),
    ),
    (
        (0, -1, 0, 0, 1, 0, -1, 0),
        (0, 1, -1, 0, 0, 0, 0, 1),
        (0, -1, 1, 0, 0, 0, 1, 0),
        (1, 1, -1, 0, -1, 1, 0, 0),
        (-1, -1, 1, 1, 0, 0, 0, 0),
        (-1, 0, 0, 0, 1, 0, 0, 0),
        (1, 2, -2, 0, 0, 0, 0, 0),
        (0, -1, 2, 0, 0, 0, 0, 0),
    ),
    (
        (0, 0, 0, 1, 0, 0, 0, -1),
        (-1, 0, 0, -1, 0, 0, 1, 0),
        (0, 0, -1, -1, 0, 0, 1, 0),
        (0, 0, -1, 0, 0, 0, 1, 1),
        (0, -1, 0, -1, 0, 0, 0, 0),
        (1, 1, 1, 1, 0, 0, 0, 0),
        (0, 0, 1, 1, 0, -1, -2, 0),
        (0, 0, -1, -1, 1, 1, 1, 0),
    ),
)


def rank8_configurations():
    """The thirteen representatives as canonical configurations."""
    return [
        VectorConfiguration.from_vectors(8, rows) for rows in RANK8_MATRICES
    ]

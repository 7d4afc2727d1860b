import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from packlab.packing import pack, prepare_disk
from packlab.subdivision import level_graph


@pytest.fixture(scope="session")
def snowball4():
    """(complex, base point) for the level-4 cube graph; ~171k vertices."""
    return level_graph("cube", 4)


@pytest.fixture(scope="session")
def pentagraph4():
    """(complex, base point) for the level-4 dodecahedron graph."""
    return level_graph("dodecahedron", 4)


@pytest.fixture(scope="session")
def packed_snowball3():
    """(triangulation, base point, packing) for the level-3 snowball."""
    c, p = level_graph("cube", 3)
    tri, removed = prepare_disk(c.graph, p)
    packing = pack(tri, removed_face=removed, boundary_radius=1.0, tol=1e-9)
    return tri, p, packing

"""Shared fixtures: solver-grade potential tables are expensive (seconds
each), so they are built once per session and shared across modules.
"""

from __future__ import annotations

import pytest

from qrmirror.optics import graphene_sheet, load_builtin
from qrmirror.potential import MirrorSpec, PotentialTable, build_solver_table


@pytest.fixture(scope="session")
def pc_table():
    return build_solver_table(MirrorSpec.perfect_conductor())


@pytest.fixture(scope="session")
def silicon_table():
    return build_solver_table(MirrorSpec.bulk(load_builtin("silicon")))


@pytest.fixture(scope="session")
def silica_table():
    return build_solver_table(MirrorSpec.bulk(load_builtin("silica")))


@pytest.fixture(scope="session")
def slab_table():
    return build_solver_table(MirrorSpec.slab_nm(load_builtin("silica"), 5.0))


@pytest.fixture(scope="session")
def graphene_table():
    return build_solver_table(MirrorSpec.conducting_sheet(graphene_sheet()))


@pytest.fixture(scope="session")
def nanodiamond_table():
    return build_solver_table(MirrorSpec.porous(load_builtin("diamond"), 0.95))


@pytest.fixture(scope="session")
def porous_silicon_table():
    return build_solver_table(MirrorSpec.porous(load_builtin("silicon"), 0.95))


@pytest.fixture(scope="session")
def aerogel_table():
    return build_solver_table(MirrorSpec.porous(load_builtin("silica"), 0.98))


@pytest.fixture(scope="session")
def pure_c4_table():
    """Synthetic -C4/z^4 with the perfect-conductor retarded coefficient."""
    return PotentialTable.from_power_law(73.6, 4.0, 1e-8, 1e7, 480)


@pytest.fixture(scope="session")
def pure_c3_table():
    """Synthetic -C3/z^3 with the perfect-conductor van der Waals coefficient."""
    return PotentialTable.from_power_law(0.25, 3.0, 1e-8, 1e7, 480)

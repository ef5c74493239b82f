import numpy as np
import pytest

from qrmirror.constants import CONSTANTS
from qrmirror.optics import load_builtin
from qrmirror.potential import (
    AsymptoticsError,
    MirrorSpec,
    PotentialTable,
    build_potential_table,
    cp_potential_point,
    extract_asymptotics,
    retarded_coefficient,
    retarded_reference,
    vdw_coefficient_integral,
)

PC = MirrorSpec.perfect_conductor()


@pytest.fixture(scope="module")
def pc_default_table():
    """Perfect conductor on the default build grid [0.1, 1e7] x 400."""
    return build_potential_table(PC, 0.1, 1e7, 400)


# -- mirror specification ----------------------------------------------------


def test_mirror_validation():
    si = load_builtin("silicon")
    with pytest.raises(ValueError):
        MirrorSpec.slab(si, -1.0)
    with pytest.raises(ValueError):
        MirrorSpec(kind="bulk")
    with pytest.raises(ValueError):
        MirrorSpec(kind="nonsense")
    with pytest.raises(ValueError):
        MirrorSpec.porous(si, 1.5)


def test_mirror_labels():
    assert MirrorSpec.perfect_conductor().label == "perfect conductor"
    assert "silicon" in MirrorSpec.bulk(load_builtin("silicon")).label


# -- potential point ---------------------------------------------------------


def test_pc_retarded_anchor():
    # z^4 V -> -73.6 Eh a0^4 at large z
    z = 1e5
    v = cp_potential_point(PC, z)
    assert v * z**4 == pytest.approx(-73.6, rel=0.01)


def test_pc_vdw_anchor():
    # z^3 V -> -0.25 Eh a0^3 at small z
    z = 1.0
    v = cp_potential_point(PC, z)
    assert v * z**3 == pytest.approx(-0.25, rel=0.01)


def test_bulk_silica_retarded_within_model_tolerance():
    silica = MirrorSpec.bulk(load_builtin("silica"))
    z = 1e6
    v = cp_potential_point(silica, z)
    assert v * z**4 == pytest.approx(-28.1, rel=0.25)


def test_potential_point_rejects_nonpositive_z():
    with pytest.raises(ValueError):
        cp_potential_point(PC, 0.0)


def test_unreachable_accuracy_target_reports_estimate():
    from qrmirror.potential import QuadratureError
    with pytest.raises(QuadratureError, match="relative error"):
        cp_potential_point(PC, 1.0, target_rel=1e-16)


def test_pc_agrees_with_huge_epsilon_bulk():
    from qrmirror.optics import DielectricModel, Oscillator
    big = DielectricModel("metalish", (Oscillator(1e12, 1e-4),))
    for z in (1.0, 1e3, 1e5):
        v_pc = cp_potential_point(PC, z)
        v_big = cp_potential_point(MirrorSpec.bulk(big), z)
        assert v_big == pytest.approx(v_pc, rel=5e-3)


def test_retarded_reference_constant():
    assert retarded_coefficient() == pytest.approx(73.6, rel=1e-3)
    assert retarded_reference(10.0) == pytest.approx(-73.6 / 1e4, rel=1e-3)


# -- closed-form C3 anchor ---------------------------------------------------


def test_vdw_integral_perfect_conductor():
    assert vdw_coefficient_integral(PC) == pytest.approx(0.25, rel=1e-9)


def test_vdw_integral_against_quadrature_small_z():
    # independent check of the full quadrature's sign and prefactor
    for mirror in (PC, MirrorSpec.bulk(load_builtin("silicon")),
                   MirrorSpec.bulk(load_builtin("silica"))):
        c3_closed = vdw_coefficient_integral(mirror)
        z = 1e-4
        c3_quad = -cp_potential_point(mirror, z) * z**3
        assert c3_quad == pytest.approx(c3_closed, rel=2e-4)


# -- tables ------------------------------------------------------------------


def test_pc_table_asymptotics(pc_default_table):
    assert pc_default_table.c3 == pytest.approx(0.25, rel=0.01)
    assert pc_default_table.c4 == pytest.approx(73.6, rel=0.01)
    assert pc_default_table.c5 is None


def test_table_anchor_identity(pc_default_table):
    # fitted C3 against the closed-form integral, 2%
    assert pc_default_table.c3 == pytest.approx(vdw_coefficient_integral(PC),
                                                rel=0.02)


def test_silicon_silica_table1_values(silicon_table, silica_table):
    assert silicon_table.c3 == pytest.approx(0.10, rel=0.25)
    assert silicon_table.c4 == pytest.approx(50.3, rel=0.25)
    assert silica_table.c3 == pytest.approx(0.05, rel=0.25)
    assert silica_table.c4 == pytest.approx(28.1, rel=0.25)


def test_interpolation_contract(pc_default_table):
    # off-grid interpolated values within 0.1% of direct quadrature
    for z in (0.37, 12.9, 431.0, 2.7e4, 3.3e6):
        vi = pc_default_table.potential(z)
        vq = cp_potential_point(PC, z)
        assert vi == pytest.approx(vq, rel=1e-3)


def test_ratio_curve_shape(pc_default_table):
    # V/V* rises from ~ C3 z / C4* to the constant C4/C4* <= 1
    t = pc_default_table
    ratio = t.ratio_to_retarded()
    assert np.all(np.diff(ratio) > 0)
    z0 = t.z[0]
    assert ratio[0] == pytest.approx(0.25 * z0 / 73.609, rel=0.01)
    assert ratio[-1] == pytest.approx(1.0, rel=0.005)
    assert np.all(ratio <= 1.0 + 1e-9)


def test_potential_ordering_pc_si_silica(pc_table, silicon_table, silica_table):
    z = np.geomspace(1e-6, 1e6, 200)
    v_pc = np.abs(pc_table.potential(z))
    v_si = np.abs(silicon_table.potential(z))
    v_sil = np.abs(silica_table.potential(z))
    assert np.all(v_pc >= v_si)
    assert np.all(v_si >= v_sil)


def test_slab_matches_bulk_well_inside(silica_table, slab_table):
    # d = 5 nm: for z = 1 nm << d the slab potential is bulk-like (5%)
    z_nm1 = 1.0 / CONSTANTS.bohr_nm
    assert slab_table.potential(z_nm1) == pytest.approx(
        silica_table.potential(z_nm1), rel=0.05)


def test_slab_far_exponent_is_five(slab_table):
    # beyond 30*max(d, lambda) the slab potential falls off one power faster
    d_au = 5.0 / CONSTANTS.bohr_nm
    lam = load_builtin("silica").wavelength_au
    z_test = 30.0 * max(d_au, lam)
    assert abs(slab_table.local_exponent(z_test) - 5.0) < 0.05
    assert slab_table.c5 is not None
    assert slab_table.c4 is None


def test_slab_bulk_crossover(silica_table, slab_table):
    d_au = 5.0 / CONSTANTS.bohr_nm
    z = np.geomspace(slab_table.z_min * 2, d_au / 3.0, 50)
    ratio = slab_table.potential(z) / silica_table.potential(z)
    assert np.all(np.abs(ratio - 1.0) < 0.05)


def test_synthetic_power_law_interpolation_exact():
    tab = PotentialTable.from_power_law(1.0, 4.0, 1e-2, 1e6, 120)
    z = np.geomspace(2e-2, 5e5, 77)   # off-node points
    assert np.allclose(tab.potential(z), -1.0 / z**4, rtol=1e-12)
    # exact at the nodes as well
    assert np.allclose(tab.potential(tab.z), tab.V, rtol=1e-13)


def test_synthetic_c5_extraction():
    tab = PotentialTable.from_power_law(7.0, 5.0, 1e-2, 1e6, 120)
    assert tab.c5 == pytest.approx(7.0, rel=1e-9)
    assert tab.c4 is None
    assert tab.c3 is None   # near exponent is 5, not 3


def test_extraction_requires_range():
    tab = PotentialTable.from_power_law(1.0, 4.0, 1.0, 30.0, 24)
    with pytest.raises(AsymptoticsError):
        extract_asymptotics(tab)


def test_build_table_validation():
    with pytest.raises(ValueError):
        build_potential_table(PC, -1.0, 10.0, 40)
    with pytest.raises(ValueError):
        build_potential_table(PC, 0.1, 1e7, 8)


def test_table_rejects_bad_samples():
    z = np.geomspace(1, 100, 16)
    with pytest.raises(ValueError):
        PotentialTable(z, np.abs(1 / z**4))     # positive potential
    with pytest.raises(ValueError):
        PotentialTable(z, -np.linspace(1, 2, 16))  # |V| increasing


def test_null_table():
    tab = PotentialTable.null()
    assert tab.is_null
    assert tab.potential(3.3) == 0.0
    v, vp, vpp = tab.derivatives(np.array([1.0, 10.0]))
    assert np.all(v == 0) and np.all(vp == 0) and np.all(vpp == 0)


def test_csv_export_columns(pc_default_table, tmp_path):
    out = tmp_path / "table.csv"
    pc_default_table.to_csv(out, include_ratio=False, timestamp=False)
    lines = out.read_text().splitlines()
    header = [ln for ln in lines if not ln.startswith("#")][0]
    assert header == "z_a0,z_nm,V_Eh,V_neV"
    assert any("C3_Eh_a03" in ln for ln in lines)
    assert any("C4_Eh_a04" in ln for ln in lines)
    first = [ln for ln in lines if not ln.startswith("#")][1].split(",")
    z_a0, z_nm, v_eh, v_nev = map(float, first)
    assert z_nm == pytest.approx(z_a0 * CONSTANTS.bohr_nm, rel=1e-9)
    assert v_nev == pytest.approx(v_eh * CONSTANTS.hartree_neV, rel=1e-9)

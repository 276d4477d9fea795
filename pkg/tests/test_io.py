import numpy as np
import pytest

from evidencerank import (
    FeatPackError,
    InvalidInputError,
    inspect_featpack,
    one_hot,
    read_csv_features,
    read_featpack,
    write_featpack,
)
from evidencerank.io import FLAG_CLASS_LABELS, FLAG_THETA, HEADER_SIZE


def test_header_size_is_frozen():
    assert HEADER_SIZE == 44


def test_minimal_pack_is_76_bytes(tmp_path):
    p = tmp_path / "tiny.featpack"
    write_featpack(p, np.array([[1.0], [2.0]]), np.array([[0.5], [1.5]]))
    assert p.stat().st_size == 76


def test_float_target_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    p = tmp_path / "a.featpack"
    F = rng.standard_normal((7, 3))
    Y = rng.standard_normal((7, 2))
    write_featpack(p, F, Y)
    F2, Y2, theta = read_featpack(p)
    assert theta is None
    assert F.tobytes() == F2.tobytes()
    assert Y.tobytes() == Y2.tobytes()


def test_label_and_theta_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    p = tmp_path / "b.featpack"
    F = rng.standard_normal((9, 4))
    labels = rng.integers(0, 3, 9)
    theta = rng.dirichlet(np.ones(5), size=9)
    write_featpack(p, F, labels, theta=theta, num_classes=3)
    F2, labels2, theta2 = read_featpack(p)
    assert labels2.dtype == np.int64
    assert np.array_equal(labels, labels2)
    assert theta.tobytes() == theta2.tobytes()


def test_write_read_write_is_byte_identical(tmp_path):
    rng = np.random.default_rng(2)
    p1 = tmp_path / "c1.featpack"
    p2 = tmp_path / "c2.featpack"
    F = rng.standard_normal((5, 6))
    Y = rng.standard_normal((5, 3))
    theta = rng.dirichlet(np.ones(4), size=5)
    write_featpack(p1, F, Y, theta=theta)
    a, b, c = read_featpack(p1)
    write_featpack(p2, a, b, theta=c)
    assert p1.read_bytes() == p2.read_bytes()


def test_inspect_reports_header_fields(tmp_path):
    rng = np.random.default_rng(5)
    p = tmp_path / "inspect.featpack"
    # class 4 absent from the sample; declared K must still say 5
    write_featpack(p, rng.standard_normal((6, 2)), np.array([0, 1, 2, 3, 0, 1]),
                   theta=rng.dirichlet(np.ones(7), size=6), num_classes=5)
    info = inspect_featpack(p)
    assert info == {"n": 6, "D": 2, "K": 5, "Z": 7,
                    "class_labels": True, "has_theta": True}


def test_theta_absent_means_zero_Z(tmp_path):
    p = tmp_path / "d.featpack"
    write_featpack(p, np.ones((2, 2)), np.ones((2, 1)))
    raw = p.read_bytes()
    flags = int.from_bytes(raw[8:12], "little")
    Z = int.from_bytes(raw[36:44], "little")
    assert not (flags & FLAG_THETA)
    assert Z == 0


def test_bad_magic_reports_offset_zero(tmp_path):
    p = tmp_path / "e.featpack"
    write_featpack(p, np.ones((2, 1)), np.ones((2, 1)))
    raw = bytearray(p.read_bytes())
    raw[0:8] = b"NOTAPACK"
    p.write_bytes(bytes(raw))
    with pytest.raises(FeatPackError) as exc:
        read_featpack(p)
    assert exc.value.offset == 0
    assert "magic" in str(exc.value)


def test_truncated_file_reports_expected_vs_actual(tmp_path):
    p = tmp_path / "f.featpack"
    write_featpack(p, np.ones((4, 2)), np.ones((4, 1)))
    raw = p.read_bytes()
    p.write_bytes(raw[:-8])
    with pytest.raises(FeatPackError) as exc:
        read_featpack(p)
    assert f"expected {len(raw)}" in str(exc.value)
    assert f"got {len(raw) - 8}" in str(exc.value)


def test_truncated_header(tmp_path):
    p = tmp_path / "g.featpack"
    p.write_bytes(b"FEATPAK1\x00\x00")
    with pytest.raises(FeatPackError) as exc:
        read_featpack(p)
    assert "header" in str(exc.value)


def test_unknown_flag_bits(tmp_path):
    p = tmp_path / "h.featpack"
    write_featpack(p, np.ones((2, 1)), np.ones((2, 1)))
    raw = bytearray(p.read_bytes())
    raw[8] |= 0x4
    p.write_bytes(bytes(raw))
    with pytest.raises(FeatPackError) as exc:
        read_featpack(p)
    assert exc.value.offset == 8


def test_label_out_of_range_detected(tmp_path):
    p = tmp_path / "i.featpack"
    write_featpack(p, np.ones((3, 1)), np.array([0, 1, 2]), num_classes=3)
    raw = bytearray(p.read_bytes())
    # first label lives right after the F block
    off = HEADER_SIZE + 3 * 1 * 8
    raw[off:off + 8] = (7).to_bytes(8, "little")
    p.write_bytes(bytes(raw))
    with pytest.raises(FeatPackError) as exc:
        read_featpack(p)
    assert exc.value.offset == off


def test_theta_row_sum_violation_detected(tmp_path):
    rng = np.random.default_rng(3)
    p = tmp_path / "j.featpack"
    theta = rng.dirichlet(np.ones(3), size=4)
    write_featpack(p, np.ones((4, 2)), np.array([0, 1, 0, 1]), theta=theta, num_classes=2)
    raw = bytearray(p.read_bytes())
    off = HEADER_SIZE + 4 * 2 * 8 + 4 * 8  # start of theta block
    raw[off:off + 8] = np.float64(5.0).tobytes()
    p.write_bytes(bytes(raw))
    with pytest.raises(FeatPackError) as exc:
        read_featpack(p)
    assert exc.value.offset == off
    assert "sum to 1" in str(exc.value)


def test_flag_Z_mismatch_detected(tmp_path):
    p = tmp_path / "k.featpack"
    write_featpack(p, np.ones((2, 1)), np.ones((2, 1)))
    raw = bytearray(p.read_bytes())
    raw[36:44] = (3).to_bytes(8, "little")  # claim Z=3 without the theta flag
    p.write_bytes(bytes(raw))
    with pytest.raises(FeatPackError) as exc:
        read_featpack(p)
    assert exc.value.offset == 36


def test_write_validation():
    with pytest.raises(InvalidInputError):
        write_featpack("/tmp/x.featpack", np.ones((2, 1)), np.ones((3, 1)))
    with pytest.raises(InvalidInputError):
        write_featpack("/tmp/x.featpack", np.ones((2, 1)), np.array([0, 3]), num_classes=2)
    with pytest.raises(InvalidInputError):
        write_featpack("/tmp/x.featpack", np.ones((2, 1)), np.ones((2, 1)),
                       theta=np.array([[0.7, 0.7], [0.5, 0.5]]))
    with pytest.raises(OSError):
        write_featpack("/no/such/dir/x.featpack", np.ones((2, 1)), np.ones((2, 1)))


# ---- one_hot ----

def test_one_hot_examples():
    assert np.array_equal(one_hot(np.array([0, 1, 2]), 3), np.eye(3))
    assert np.array_equal(one_hot(np.array([1, 1]), 2), [[0.0, 1.0], [0.0, 1.0]])


def test_one_hot_sums():
    rng = np.random.default_rng(4)
    labels = rng.integers(0, 5, 40)
    Y = one_hot(labels, 5)
    assert np.all(Y.sum(axis=1) == 1.0)
    assert np.array_equal(Y.sum(axis=0), np.bincount(labels, minlength=5).astype(float))


def test_one_hot_validation():
    with pytest.raises(InvalidInputError):
        one_hot(np.array([0, 3]), 3)
    with pytest.raises(InvalidInputError):
        one_hot(np.array([-1]), 3)
    with pytest.raises(InvalidInputError):
        one_hot(np.array([0.5]), 3)


# ---- CSV ----

def test_csv_with_header(tmp_path):
    p = tmp_path / "data.csv"
    p.write_text("x1,x2,label\n1,2,0\n3,4,1\n5,6,2\n")
    F, y = read_csv_features(p, has_header=True, label_column="label")
    assert F.shape == (3, 2)
    assert np.array_equal(F, [[1, 2], [3, 4], [5, 6]])
    assert np.array_equal(y, [0, 1, 2])


def test_csv_headerless_by_index_matches_named(tmp_path):
    p1 = tmp_path / "a.csv"
    p2 = tmp_path / "b.csv"
    p1.write_text("f,g,t\n1,2,9\n3,4,8\n")
    p2.write_text("1,2,9\n3,4,8\n")
    Fa, ya = read_csv_features(p1, has_header=True, label_column="t")
    Fb, yb = read_csv_features(p2, has_header=False, label_column=2)
    assert np.array_equal(Fa, Fb) and np.array_equal(ya, yb)


def test_csv_missing_label_name(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(InvalidInputError, match="nope"):
        read_csv_features(p, has_header=True, label_column="nope")


def test_csv_ragged_row(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("a,b,c\n1,2,3\n4,5\n")
    with pytest.raises(InvalidInputError, match="row 2"):
        read_csv_features(p, has_header=True, label_column="c")


def test_csv_non_numeric_cell_names_location(tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("a,b\n1,2\nx,4\n")
    with pytest.raises(InvalidInputError, match="row 2.*'a'"):
        read_csv_features(p, has_header=True, label_column="b")

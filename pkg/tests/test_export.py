import numpy as np
import pytest

from stiknn.export import heatmap_rgb, read_matrix_csv, read_ppm, write_matrix_csv, write_ppm


def test_matrix_csv_round_trip_exact(tmp_path):
    rng = np.random.default_rng(0)
    M = rng.normal(size=(7, 7)) * 1e-5
    M[0, 0] = 1 / 3
    path = tmp_path / "m.csv"
    write_matrix_csv(M, path)
    assert np.array_equal(read_matrix_csv(path), M)
    first = path.read_text().splitlines()[0]
    assert first.split(",")[0] == "0.33333333333333331"


def test_matrix_csv_rejects_ragged(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("1,2\n3\n")
    with pytest.raises(ValueError, match="square"):
        read_matrix_csv(path)


def test_heatmap_colours():
    M = np.array([[5.0, -2.0, 1.0], [-2.0, 0.0, 0.0], [1.0, 0.0, -7.0]])
    rgb = heatmap_rgb(M)
    # scale = max |off-diagonal| = 2
    assert rgb[0, 1].tolist() == [0, 0, 255]
    assert rgb[0, 2].tolist() == [255, 128, 128]  # m = 0.5 -> round(127.5) = 128
    assert rgb[1, 2].tolist() == [255, 255, 255]
    assert rgb[0, 0].tolist() == [255, 0, 0]  # clamped
    assert rgb[2, 2].tolist() == [0, 0, 255]


def test_heatmap_all_zero_off_diagonal():
    rgb = heatmap_rgb(np.diag([0.25, 0.0]))
    assert rgb[0, 0].tolist() == [255, 191, 191]
    assert rgb[0, 1].tolist() == [255, 255, 255]


def test_ppm_file(tmp_path):
    rng = np.random.default_rng(4)
    M = rng.normal(size=(9, 9))
    M = M + M.T
    path = tmp_path / "h.ppm"
    write_ppm(M, path)
    data = path.read_bytes()
    assert data.startswith(b"P6\n9 9\n255\n")
    assert len(data) == len(b"P6\n9 9\n255\n") + 9 * 9 * 3
    assert np.array_equal(read_ppm(path), heatmap_rgb(M))


def test_ppm_pixels_starting_with_whitespace_bytes(tmp_path):
    # off-diagonal value -0.96 -> fade round(255*0.04) = 10 ('\n') as first byte
    M = np.array([[-0.96, -1.0], [-1.0, 0.0]])
    path = tmp_path / "w.ppm"
    write_ppm(M, path)
    assert read_ppm(path)[0, 0].tolist() == [10, 10, 255]

import numpy as np
import pytest

from drivenchain.chain import ChainParams
from drivenchain.errors import DrivenChainError
from drivenchain.exact import solve_spectral
from drivenchain.export import (
    CSV_HEADER,
    export_heatmap,
    export_records,
    read_heatmap,
    read_records,
)
from drivenchain.fits import SweepRecord


def make_record(omega=1.234567890123456, method="spectral"):
    c = complex(0.1234567890123456, -9.87654321e-7)
    return SweepRecord(omega=omega, n=16, eps=0.01, mu0=1.5, method=method,
                       current_re=c.real, current_im=c.imag, current_abs=abs(c))


class TestRecordExport:
    def test_header_only_for_empty_list(self, tmp_path):
        f = export_records([], "csv", tmp_path / "empty.csv")
        assert f.read_text().strip() == ",".join(CSV_HEADER)
        assert f.read_text().count("\n") == 1
        assert read_records(f) == []

    def test_csv_round_trip_bit_identical(self, tmp_path):
        recs = [make_record(), make_record(omega=2.0, method="weak")]
        f = export_records(recs, "csv", tmp_path / "r.csv")
        assert read_records(f) == recs

    def test_json_round_trip_bit_identical(self, tmp_path):
        recs = [make_record()]
        f = export_records(recs, "json", tmp_path / "r.json")
        assert read_records(f) == recs

    def test_header_exact(self, tmp_path):
        f = export_records([make_record()], "csv", tmp_path / "r.csv")
        first = f.read_text().splitlines()[0]
        assert first == "omega,n,eps,mu0,method,current_re,current_im,current_abs"

    def test_io_error_has_path_context(self, tmp_path):
        bad = tmp_path / "no" / "such" / "dir" / "x.csv"
        with pytest.raises(DrivenChainError, match="x.csv"):
            export_records([make_record()], "csv", bad)

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            export_records([make_record()], "xml", tmp_path / "r.xml")


class TestHeatmapExport:
    def test_round_trip_both_formats(self, tmp_path):
        C = solve_spectral(ChainParams(n=9, eps=0.3, omega=2.0))
        for fmt in ("csv", "json"):
            f = export_heatmap(C, fmt, tmp_path / f"hm.{fmt}")
            back = read_heatmap(f)
            assert np.array_equal(back, np.abs(C.data))

    def test_critical_heatmap_max_at_corner_adjacent_entries(self, tmp_path):
        C = solve_spectral(ChainParams(n=257, eps=0.1, omega=8.0))
        f = export_heatmap(C, "csv", tmp_path / "hm.csv")
        data = read_heatmap(f)
        j, k = np.unravel_index(np.argmax(data), data.shape)
        # two-corner quadrupole structure: the maximum hugs a driven corner
        assert min(j, k) <= 2 or min(256 - j, 256 - k) <= 2

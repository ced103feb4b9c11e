import pytest

from wattbench.errors import SchemaError
from wattbench.report import (
    ReportTable,
    format_sig,
    format_uncertainty,
    parse_json_table,
    render,
)


def one_by_one():
    return ReportTable(title="t", columns=[("col", "unit")], rows=[["x"]])


class TestRender:
    def test_csv_one_by_one(self):
        out = render(one_by_one(), "csv").decode()
        assert out == "col (unit)\r\nx\r\n"

    def test_markdown_pipe_table(self):
        t = ReportTable(title="Example", columns=[("a", ""), ("b", "kWh")],
                        rows=[["x", "1.0"], ["y", "2.0"]], footnotes=["note"])
        out = render(t, "markdown").decode()
        assert "| a | b (kWh) |" in out
        assert out.count("| x | 1.0 |") == 1
        assert out.strip().endswith("_note_")

    def test_deterministic(self):
        t = ReportTable(title="t", columns=[("a", "")], rows=[[1.5], ["x"]])
        assert render(t, "markdown") == render(t, "markdown")
        assert render(t, "csv") == render(t, "csv")
        assert render(t, "json") == render(t, "json")

    def test_json_round_trip_is_byte_identical(self):
        t = ReportTable(title="t", columns=[("a", ""), ("b", "g")],
                        rows=[["x", 1.25], ["y", 3]], footnotes=["f1", "f2"])
        blob = render(t, "json")
        assert render(parse_json_table(blob), "json") == blob

    def test_unknown_format_rejected(self):
        with pytest.raises(SchemaError, match="unknown render format"):
            render(one_by_one(), "pdf")

    def test_row_width_enforced(self):
        with pytest.raises(SchemaError, match="cells"):
            ReportTable(title="t", columns=[("a", ""), ("b", "")], rows=[["only-one"]])

    def test_csv_quoting(self):
        t = ReportTable(title="", columns=[("a", "")], rows=[['needs,"quoting"']])
        out = render(t, "csv").decode()
        assert '"needs,""quoting"""' in out

    def test_decimal_separator_is_always_a_point(self):
        t = ReportTable(title="", columns=[("v", "")], rows=[[1.5]])
        assert b"1.5" in render(t, "csv")


class TestFormatSig:
    @pytest.mark.parametrize("x,sig,expected", [
        (0.33, 2, "0.33"),
        (2.0, 2, "2.0"),
        (86.7, 3, "86.7"),
        (890.0, 3, "890"),
        (1071.0, 1, "1000"),
        (0.4944, 2, "0.49"),
        (0.0, 3, "0.00"),
    ])
    def test_values(self, x, sig, expected):
        assert format_sig(x, sig) == expected

    def test_requires_positive_sig(self):
        with pytest.raises(SchemaError):
            format_sig(1.0, 0)


class TestFormatUncertainty:
    def test_plain_style(self):
        assert format_uncertainty(0.33, 0.01, 2) == "0.33 ± 0.01"

    def test_zero_std_prints_mean_only(self):
        assert format_uncertainty(2.0, 0.0, 2) == "2.0"

    def test_grouped_scientific_style(self):
        assert format_uncertainty(86.7e-9, 1.11e-9, 3) == "(86.7 ± 1.11) × 10⁻⁹"

    def test_scientific_with_zero_std(self):
        assert format_uncertainty(86.7e-9, 0.0, 3) == "86.7 × 10⁻⁹"

    def test_std_follows_mean_decimals_in_plain_style(self):
        assert format_uncertainty(57.0, 0.8, 3) == "57.0 ± 0.8"
        assert format_uncertainty(426.5, 1.4, 4) == "426.5 ± 1.4"

    def test_negative_std_rejected(self):
        with pytest.raises(SchemaError):
            format_uncertainty(1.0, -0.1, 2)

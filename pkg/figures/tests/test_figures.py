"""Each figure script renders its documented fixture into a nonempty image."""
import math
import os

import pytest

from figscripts import FigureSpec, SchemaError, render
from figscripts import bars, hist, line, scatter

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fx(name):
    return os.path.join(FIXTURES, name)


def assert_image(path):
    assert os.path.exists(path)
    assert os.path.getsize(path) > 1000


# ---------------------------------------------------------------- per script

def test_bars_single_series(tmp_path):
    out = tmp_path / "fractions.png"
    code = bars.main(["--in", fx("fractions_a.csv"), "--out", str(out),
                      "--title", "arm a"])
    assert code == 0
    assert_image(out)


def test_bars_grouped_from_many_files(tmp_path):
    out = tmp_path / "fractions_ac.png"
    code = bars.main(["--in", fx("fractions_a.csv"), "--in", fx("fractions_c.csv"),
                      "--out", str(out)])
    assert code == 0
    assert_image(out)


def test_bars_grouped_from_group_column(tmp_path):
    out = tmp_path / "fractions_grouped.png"
    code = bars.main(["--in", fx("rating_fractions.csv"), "--out", str(out)])
    assert code == 0
    assert_image(out)


def test_hist_binned_counts(tmp_path):
    out = tmp_path / "user_means.png"
    code = hist.main(["--in", fx("user_mean_histogram.csv"), "--out", str(out),
                      "--xlabel", "mean score"])
    assert code == 0
    assert_image(out)


def test_hist_retention_log_scale(tmp_path):
    out = tmp_path / "retention.png"
    code = hist.main(["--in", fx("user_retention.csv"), "--out", str(out),
                      "--log-y"])
    assert code == 0
    assert_image(out)


def test_scatter_personalized_vs_random(tmp_path):
    out = tmp_path / "class_means.png"
    code = scatter.main(["--in", fx("personalized_vs_random.csv"),
                         "--out", str(out)])
    assert code == 0
    assert_image(out)


def test_scatter_exposure_vs_mean(tmp_path):
    out = tmp_path / "exposure.png"
    code = scatter.main(["--in", fx("frac_personalized_vs_mean.csv"),
                         "--out", str(out)])
    assert code == 0
    assert_image(out)


def test_line_month_correlations(tmp_path):
    out = tmp_path / "months.png"
    code = line.main(["--in", fx("month_pair_correlations.csv"), "--out", str(out)])
    assert code == 0
    assert_image(out)


@pytest.fixture
def utility_csv(tmp_path):
    path = tmp_path / "utility.csv"
    rows = ["iteration,mean_utility,mean_utility_smoothed"]
    for t in range(1000):
        raw = 8.0 + 3.0 * (1.0 - math.exp(-t / 150.0)) + 0.4 * math.sin(t / 9.0)
        smooth = 8.0 + 3.0 * (1.0 - math.exp(-t / 150.0))
        rows.append(f"{t},{raw!r},{smooth!r}")
    path.write_text("\n".join(rows) + "\n")
    return str(path)


def test_line_utility_series(tmp_path, utility_csv):
    out = tmp_path / "utility.png"
    code = line.main(["--in", utility_csv, "--out", str(out)])
    assert code == 0
    assert_image(out)


# ---------------------------------------------------------------- determinism

def test_rendering_twice_is_byte_identical(tmp_path, utility_csv):
    first, second = tmp_path / "one.png", tmp_path / "two.png"
    assert line.main(["--in", utility_csv, "--out", str(first)]) == 0
    assert line.main(["--in", utility_csv, "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_svg_output_carries_no_date(tmp_path):
    first, second = tmp_path / "one.svg", tmp_path / "two.svg"
    assert bars.main(["--in", fx("fractions_a.csv"), "--out", str(first)]) == 0
    assert bars.main(["--in", fx("fractions_a.csv"), "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


# ---------------------------------------------------------------- errors

def test_wrong_table_names_missing_columns(tmp_path, capsys, utility_csv):
    code = bars.main(["--in", utility_csv, "--out", str(tmp_path / "x.png")])
    assert code == 2
    message = capsys.readouterr().err
    assert "option" in message and "fraction" in message


def test_missing_file_is_a_data_error(tmp_path, capsys):
    code = hist.main(["--in", str(tmp_path / "absent.csv"),
                      "--out", str(tmp_path / "x.png")])
    assert code == 3


def test_header_only_file_is_rejected(tmp_path, capsys):
    path = tmp_path / "empty.csv"
    path.write_text("option,fraction\n")
    code = bars.main(["--in", str(path), "--out", str(tmp_path / "x.png")])
    assert code == 2
    assert "no data rows" in capsys.readouterr().err


def test_nonnumeric_cell_is_rejected(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("option,fraction\ndislike,often\n")
    code = bars.main(["--in", str(path), "--out", str(tmp_path / "x.png")])
    assert code == 2
    assert "fraction" in capsys.readouterr().err


def test_spec_rejects_unknown_kind():
    with pytest.raises(SchemaError):
        FigureSpec(kind="pie", inputs=("x.csv",), out="x.png")
    with pytest.raises(SchemaError):
        FigureSpec(kind="bars", inputs=(), out="x.png")


def test_render_is_importable_directly(tmp_path):
    spec = FigureSpec(kind="bars", inputs=(fx("fractions_a.csv"),),
                      out=str(tmp_path / "direct.png"), title="direct")
    assert render(spec) == spec.out
    assert_image(spec.out)

import hashlib
import subprocess
import sys

import pytest

from fdxplot.cli import load_figure_spec, main, spec_path
from fdxplot.render import FigureSpec, RenderError, build_figure, read_rows, render


@pytest.fixture(scope="session")
def sweep_csvs(tmp_path_factory):
    """Real CSVs produced by the simulator CLI (the consumed interface)."""
    out = tmp_path_factory.mktemp("sweeps")
    subprocess.run(
        [sys.executable, "-m", "fdxsim.cli", "figures",
         "--out", str(out), "--runs", "2", "--quiet"],
        check=True,
    )
    return out


def render_via_cli(csv, spec, out):
    return main(["render", "--csv", str(csv), "--spec", spec, "--out", str(out)])


def test_renders_all_three_figures(sweep_csvs, tmp_path):
    for name in ("fig2", "fig3", "fig4"):
        out = tmp_path / f"{name}.png"
        code = render_via_cli(sweep_csvs / f"{name}.csv", spec_path(f"{name}.toml"), out)
        assert code == 0
        assert out.stat().st_size > 10_000


def test_rerender_is_byte_stable(sweep_csvs, tmp_path):
    spec = spec_path("fig3.toml")
    csv = sweep_csvs / "fig3.csv"
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    assert render_via_cli(csv, spec, a) == 0
    assert render_via_cli(csv, spec, b) == 0
    assert a.read_bytes() == b.read_bytes()


def test_input_csv_never_mutated(sweep_csvs, tmp_path):
    csv = sweep_csvs / "fig2.csv"
    before = hashlib.sha256(csv.read_bytes()).hexdigest()
    render_via_cli(csv, spec_path("fig2.toml"), tmp_path / "x.png")
    assert hashlib.sha256(csv.read_bytes()).hexdigest() == before


def test_fig2_has_one_line_per_scheme(sweep_csvs):
    spec = load_figure_spec(
        spec_path("fig2.toml"), str(sweep_csvs / "fig2.csv"), "unused.png"
    )
    fig = build_figure(spec)
    ax = fig.axes[0]
    labels = [t.get_text() for t in ax.get_legend().get_texts()]
    assert labels == ["fd_n4", "fd_n8", "fd_n16", "fd_ideal_n16", "hd"]
    assert ax.get_yscale() == "linear"
    assert ax.get_xlabel() == "DL transmit power (dBm)"


def test_fig3_mse_axis_is_log(sweep_csvs):
    spec = load_figure_spec(
        spec_path("fig3.toml"), str(sweep_csvs / "fig3.csv"), "unused.png"
    )
    fig = build_figure(spec)
    ax = fig.axes[0]
    assert ax.get_yscale() == "log"
    assert "MSE" in ax.get_ylabel()
    labels = {t.get_text() for t in ax.get_legend().get_texts()}
    assert labels == {"fd_n4", "fd_n8", "fd_n16", "hd"}


def test_missing_column_is_named(sweep_csvs, tmp_path, capsys):
    lines = (sweep_csvs / "fig2.csv").read_text().strip().split("\n")
    header = lines[1].split(",")
    drop = header.index("mean_mse")
    crippled = tmp_path / "crippled.csv"
    crippled.write_text(
        "\n".join(
            [lines[0]]
            + [",".join(c for i, c in enumerate(l.split(",")) if i != drop)
               for l in lines[1:]]
        )
        + "\n"
    )
    spec = FigureSpec(
        csv_path=str(crippled), out_path=str(tmp_path / "no.png"),
        x_label="x", y_label="y", y_column="mean_mse",
    )
    with pytest.raises(RenderError, match="mean_mse"):
        render(spec)
    assert not (tmp_path / "no.png").exists()


def test_header_only_csv_rejected_without_image(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text(
        "# fdxsim sweep schema v1\n"
        "variable,value,scheme,mean_rate,stderr_rate,mean_mse,stderr_mse,"
        "feasible_frac,n_runs\n"
    )
    out = tmp_path / "empty.png"
    code = render_via_cli(empty, spec_path("fig2.toml"), out)
    assert code == 1
    assert "no data rows" in capsys.readouterr().err
    assert not out.exists()


def test_schema_marker_checked(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("variable,value\nx,1\n")
    with pytest.raises(RenderError, match="schema"):
        read_rows(str(bad))


def test_unknown_spec_keys_rejected(tmp_path):
    spec_file = tmp_path / "spec.toml"
    spec_file.write_text('x_labelll = "oops"\n')
    with pytest.raises(RenderError, match="x_labelll"):
        load_figure_spec(str(spec_file), "a.csv", "b.png")


def test_unsupported_y_column_rejected():
    with pytest.raises(RenderError, match="y_column"):
        FigureSpec(
            csv_path="a.csv", out_path="b.png",
            x_label="x", y_label="y", y_column="feasible_frac",
        )


def test_cli_reports_missing_spec(tmp_path, capsys):
    code = main(["render", "--csv", "x.csv", "--spec", str(tmp_path / "no.toml"),
                 "--out", "y.png"])
    assert code == 1
    assert "no.toml" in capsys.readouterr().err

"""End-to-end command-line behavior, run in process through main()."""

import io
import os

import pytest

from permwhite.cli import main
from permwhite.entropy import CounterSource
from permwhite.permutation import IndexPermutation, MatrixPool, pool_save
from permwhite.randtests import EntReport
from permwhite.reports import report_to_csv


def run_cli(*argv):
    return main(list(argv))


def write_identity_pool(path, n_qubits=3, count=2):
    size = 1 << n_qubits
    perms = tuple(IndexPermutation.identity(size) for _ in range(count))
    with open(path, "wb") as fh:
        pool_save(MatrixPool(n_qubits, perms, "identity"), fh)


@pytest.fixture
def pool_file(tmp_path):
    path = tmp_path / "small.pool"
    rc = run_cli("gen-pool", str(path), "--n-qubits", "3", "--count", "4",
                 "--source", "det", "--key", "cli-pool")
    assert rc == 0
    return path


# --- gen-pool ---

def test_gen_pool_is_deterministic(tmp_path):
    a = tmp_path / "a.pool"
    b = tmp_path / "b.pool"
    for path in (a, b):
        rc = run_cli("gen-pool", str(path), "--n-qubits", "2", "--count", "3",
                     "--source", "det", "--key", "same-key")
        assert rc == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_pool_rejects_zero_count(tmp_path):
    rc = run_cli("gen-pool", str(tmp_path / "x.pool"), "--count", "0",
                 "--source", "det")
    assert rc == 2


def test_gen_pool_rejects_unknown_mode(tmp_path):
    rc = run_cli("gen-pool", str(tmp_path / "x.pool"), "--mode", "sideways")
    assert rc == 2


def test_gen_pool_exhausted_seed(tmp_path):
    seed = tmp_path / "seed.bin"
    seed.write_bytes(b"\x00\x01\x02")  # one permutation of 4 needs 4 draws
    rc = run_cli("gen-pool", str(tmp_path / "x.pool"), "--n-qubits", "2",
                 "--count", "1", "--source", "seed", "--seed-file", str(seed))
    assert rc == 3


# --- whiten / unwhiten ---

def test_whiten_preserves_size(tmp_path, pool_file):
    src = tmp_path / "in.bin"
    dst = tmp_path / "out.bin"
    src.write_bytes(CounterSource("cli-data").read_bytes(10_007))
    rc = run_cli("whiten", str(src), str(dst), "--pool", str(pool_file),
                 "--source", "det", "--key", "cli-sel")
    assert rc == 0
    assert dst.stat().st_size == src.stat().st_size
    assert dst.read_bytes() != src.read_bytes()


def test_whiten_identity_pool_copies_input(tmp_path):
    pool = tmp_path / "id.pool"
    write_identity_pool(pool)
    src = tmp_path / "in.bin"
    dst = tmp_path / "out.bin"
    src.write_bytes(bytes(range(256)) * 5)
    rc = run_cli("whiten", str(src), str(dst), "--pool", str(pool),
                 "--source", "det")
    assert rc == 0
    assert dst.read_bytes() == src.read_bytes()


def test_whiten_unwhiten_round_trip(tmp_path, pool_file):
    src = tmp_path / "in.bin"
    mid = tmp_path / "white.bin"
    back = tmp_path / "back.bin"
    trace = tmp_path / "run.trace"
    src.write_bytes(CounterSource("cli-rt").read_bytes(4_099))  # odd tail
    rc = run_cli("whiten", str(src), str(mid), "--pool", str(pool_file),
                 "--trace", str(trace), "--source", "det", "--key", "rt-sel")
    assert rc == 0
    rc = run_cli("unwhiten", str(mid), str(back), "--pool", str(pool_file),
                 "--trace", str(trace))
    assert rc == 0
    assert back.read_bytes() == src.read_bytes()


def test_whiten_is_deterministic_given_key(tmp_path, pool_file):
    src = tmp_path / "in.bin"
    src.write_bytes(CounterSource("cli-det").read_bytes(8_192))
    outs = []
    for name in ("o1.bin", "o2.bin"):
        dst = tmp_path / name
        rc = run_cli("whiten", str(src), str(dst), "--pool", str(pool_file),
                     "--source", "det", "--key", "fixed-sel")
        assert rc == 0
        outs.append(dst.read_bytes())
    assert outs[0] == outs[1]


def test_unwhiten_requires_trace(tmp_path, pool_file):
    src = tmp_path / "in.bin"
    src.write_bytes(b"\x00" * 16)
    rc = run_cli("unwhiten", str(src), str(tmp_path / "out.bin"),
                 "--pool", str(pool_file))
    assert rc == 2


def test_failed_run_leaves_no_output(tmp_path, pool_file):
    dst = tmp_path / "out.bin"
    rc = run_cli("whiten", str(tmp_path / "missing.bin"), str(dst),
                 "--pool", str(pool_file), "--source", "det")
    assert rc == 3
    assert not dst.exists()
    leftovers = [p for p in os.listdir(tmp_path) if p.startswith(".permwhite")]
    assert leftovers == []


# --- analyze / compare ---

def test_analyze_cyclic_file(tmp_path, capsys):
    path = tmp_path / "cyclic.bin"
    path.write_bytes(bytes(range(256)) * 64)
    rc = run_cli("analyze", str(path))
    assert rc == 0
    out = capsys.readouterr().out
    assert "8.000000" in out
    assert "0.00" in out
    assert "127.5000" in out
    assert "P-value" in out


def test_analyze_reports_undefined_scc(tmp_path, capsys):
    path = tmp_path / "zeros.bin"
    path.write_bytes(b"\x00" * 4096)
    rc = run_cli("analyze", str(path))
    assert rc == 0
    assert "undefined" in capsys.readouterr().out


def test_analyze_csv_output(tmp_path, capsys):
    path = tmp_path / "data.bin"
    path.write_bytes(CounterSource("cli-csv").read_bytes(20_000))
    report = tmp_path / "report.csv"
    rc = run_cli("analyze", str(path), "--csv", str(report))
    assert rc == 0
    text = report.read_text()
    assert text.startswith("parameter,value")
    assert "entropy_bits_per_byte" in text
    assert "p_monobit" in text


def test_compare_file_with_itself_is_unchanged(tmp_path, capsys):
    path = tmp_path / "same.bin"
    path.write_bytes(CounterSource("cli-cmp").read_bytes(30_000))
    rc = run_cli("compare", str(path), str(path))
    assert rc == 0
    out = capsys.readouterr().out
    assert "unchanged" in out
    assert "improved" not in out
    assert "worsened" not in out


def test_compare_from_reports(tmp_path, capsys):
    def report(path, mean):
        ent = EntReport(entropy_bits_per_byte=7.99, chi_square=260.0,
                        arithmetic_mean=mean, monte_carlo_pi=3.14,
                        serial_correlation=0.001,
                        serial_correlation_defined=True, byte_count=1_000_000)
        path.write_text(report_to_csv(ent))

    before = tmp_path / "before.csv"
    after = tmp_path / "after.csv"
    report(before, 127.5035)
    report(after, 127.4985)
    figure = tmp_path / "figure.csv"
    rc = run_cli("compare", str(before), str(after), "--from-reports",
                 "--figure-csv", str(figure))
    assert rc == 0
    out = capsys.readouterr().out
    assert "improved" in out
    lines = figure.read_text().strip().splitlines()
    assert lines[0] == "label,chi_square,arithmetic_mean"
    assert len(lines) == 3
    assert lines[1].startswith("before.csv,")


# --- baselines ---

def test_xor_command(tmp_path):
    a = tmp_path / "a.bin"
    b = tmp_path / "b.bin"
    out = tmp_path / "x.bin"
    a.write_bytes(b"\xff" * 64)
    b.write_bytes(b"\x55" * 64)
    assert run_cli("xor", str(a), str(b), str(out)) == 0
    assert out.read_bytes() == b"\xaa" * 64


def test_vn_command(tmp_path):
    src = tmp_path / "in.bin"
    out = tmp_path / "vn.bin"
    src.write_bytes(b"\x55" * 100)  # every pair is 01 -> emits 0
    assert run_cli("vn", str(src), str(out)) == 0
    assert out.read_bytes() == b"\x00" * 50


# --- exit codes and option resolution ---

def test_exit_code_missing_input(tmp_path):
    rc = run_cli("analyze", str(tmp_path / "nope.bin"))
    assert rc == 3


def test_exit_code_corrupt_pool(tmp_path):
    pool = tmp_path / "junk.pool"
    pool.write_bytes(b"not a pool at all, sorry")
    src = tmp_path / "in.bin"
    src.write_bytes(b"\x00" * 16)
    rc = run_cli("whiten", str(src), str(tmp_path / "out.bin"),
                 "--pool", str(pool), "--source", "det")
    assert rc == 4


def test_exit_code_input_too_short(tmp_path):
    path = tmp_path / "tiny.bin"
    path.write_bytes(b"\x01\x02\x03")
    rc = run_cli("analyze", str(path))
    assert rc == 5


def test_exit_code_bad_flag():
    assert run_cli("gen-pool", "x.pool", "--no-such-flag") == 2


def test_exit_code_no_command(capsys):
    assert run_cli() == 2
    capsys.readouterr()  # swallow the help text


def test_whiten_without_pool_is_usage_error(tmp_path, monkeypatch):
    monkeypatch.delenv("PWHITEN_POOL", raising=False)
    src = tmp_path / "in.bin"
    src.write_bytes(b"\x00" * 16)
    rc = run_cli("whiten", str(src), str(tmp_path / "out.bin"),
                 "--source", "det")
    assert rc == 2


def test_pool_env_variable(tmp_path, monkeypatch, pool_file):
    monkeypatch.setenv("PWHITEN_POOL", str(pool_file))
    src = tmp_path / "in.bin"
    dst = tmp_path / "out.bin"
    src.write_bytes(CounterSource("env-pool").read_bytes(2048))
    rc = run_cli("whiten", str(src), str(dst), "--source", "det")
    assert rc == 0
    assert dst.stat().st_size == 2048


def test_workers_env_variable_is_validated(tmp_path, monkeypatch, pool_file):
    monkeypatch.setenv("PWHITEN_WORKERS", "0")
    src = tmp_path / "in.bin"
    src.write_bytes(b"\x00" * 16)
    rc = run_cli("whiten", str(src), str(tmp_path / "out.bin"),
                 "--pool", str(pool_file), "--source", "det")
    assert rc == 2


def test_config_file_supplies_options(tmp_path):
    config = tmp_path / "run.conf"
    config.write_text(
        "# pool shape\n"
        "n-qubits = 2\n"
        "count = 3\n"
        "source = det\n"
        "key = conf-key\n"
        "unused-by-gen-pool = whatever\n"
    )
    out = tmp_path / "conf.pool"
    rc = run_cli("gen-pool", str(out), "--config", str(config))
    assert rc == 0
    direct = tmp_path / "direct.pool"
    rc = run_cli("gen-pool", str(direct), "--n-qubits", "2", "--count", "3",
                 "--source", "det", "--key", "conf-key")
    assert rc == 0
    assert out.read_bytes() == direct.read_bytes()


def test_flag_beats_config(tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("count = 3\nsource = det\nkey = conf-key\n")
    out = tmp_path / "flag.pool"
    rc = run_cli("gen-pool", str(out), "--config", str(config),
                 "--n-qubits", "2", "--count", "1")
    assert rc == 0
    direct = tmp_path / "direct.pool"
    run_cli("gen-pool", str(direct), "--n-qubits", "2", "--count", "1",
            "--source", "det", "--key", "conf-key")
    assert out.read_bytes() == direct.read_bytes()


def test_config_beats_environment(tmp_path, monkeypatch, pool_file):
    monkeypatch.setenv("PWHITEN_POOL", str(tmp_path / "does-not-exist.pool"))
    config = tmp_path / "run.conf"
    config.write_text(f"pool = {pool_file}\nsource = det\n")
    src = tmp_path / "in.bin"
    src.write_bytes(b"\x07" * 64)
    rc = run_cli("whiten", str(src), str(tmp_path / "out.bin"),
                 "--config", str(config))
    assert rc == 0


def test_malformed_config_line(tmp_path):
    config = tmp_path / "bad.conf"
    config.write_text("this line has no equals sign\n")
    rc = run_cli("gen-pool", str(tmp_path / "x.pool"), "--config", str(config))
    assert rc == 2

import os
import random
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arcode.cli import main
from arcode.container import MODES, FormatError, Header, compress, decompress, info

ALL_D = [2, 4, 16, 256]


def sample_data(n, seed=0):
    rng = random.Random(seed)
    return bytes(rng.choices(b"abcd", weights=[2, 5, 2, 1], k=n))


@pytest.mark.parametrize("mode", MODES)
@pytest.mark.parametrize("D", ALL_D)
def test_roundtrip_modes_and_radices(mode, D):
    data = sample_data(3000, seed=D) + bytes(range(256))
    blob = compress(data, mode=mode, D=D)
    assert blob[:4] == b"ACS1"
    assert decompress(blob) == data


@pytest.mark.parametrize("data", [b"", b"x", b"xy", b"\x00" * 5000, b"\xff" * 777])
@pytest.mark.parametrize("mode", MODES)
def test_edge_inputs(data, mode):
    assert decompress(compress(data, mode=mode)) == data


@settings(max_examples=60, deadline=None)
@given(st.binary(max_size=300), st.sampled_from(MODES), st.sampled_from(ALL_D))
def test_roundtrip_property(data, mode, D):
    assert decompress(compress(data, mode=mode, D=D)) == data


@pytest.mark.parametrize("search", ["sequential", "bisection", "optimal", "quantile", "lookup"])
def test_decoder_search_options(search):
    data = sample_data(2000)
    for mode in ("static", "periodic"):
        assert decompress(compress(data, mode=mode), search=search) == data
    assert decompress(compress(data, mode="static"), search="lookup", K_t=64) == data


def test_deterministic_output():
    data = sample_data(5000)
    for mode in MODES:
        assert compress(data, mode=mode) == compress(data, mode=mode)


def test_header_layout():
    blob = compress(b"hello", mode="tree", D=16)
    assert blob[4] == 1
    assert blob[5] == (2 << 6) | 8
    assert blob[6] == MODES.index("tree")
    assert int.from_bytes(blob[7:11], "little") == 256
    assert int.from_bytes(blob[11:19], "little") == 5
    h = Header.from_bytes(blob)
    assert h.size == 19 and h.config.D == 16 and h.config.P == 8
    s = compress(b"hello", mode="static")
    assert Header.from_bytes(s).size == 19 + 4 + 4 * 256
    p = compress(b"hello", mode="periodic", period=7)
    assert Header.from_bytes(p).period == 7


def test_static_model_compresses_text():
    data = sample_data(20000)
    blob = compress(data, mode="static")
    r = info(blob)
    # entropy of the weights is about 1.761 bits
    assert r["payload_bits_per_symbol"] < 1.80
    assert r["mode"] == "static" and r["N"] == 20000


def test_corruption_is_detected():
    data = sample_data(500)
    blob = compress(data, mode="tree")
    with pytest.raises(FormatError, match="magic"):
        decompress(b"XCS1" + blob[4:])
    with pytest.raises(FormatError, match="version"):
        decompress(blob[:4] + b"\x09" + blob[5:])
    with pytest.raises(FormatError, match="truncated"):
        decompress(blob[:-10])
    with pytest.raises(FormatError, match="unexpected"):
        decompress(blob + b"\x00\x00")
    with pytest.raises(FormatError):
        decompress(blob[:10])
    with pytest.raises(FormatError, match="mode"):
        decompress(blob[:6] + b"\x09" + blob[7:])
    with pytest.raises(FormatError, match="payload present"):
        decompress(compress(b"") + b"\x00")


def test_bad_options():
    with pytest.raises(ValueError):
        compress(b"abc", mode="lz")
    with pytest.raises(ValueError):
        compress(b"abc", mode="tree", period=10)
    with pytest.raises(ValueError):
        compress(b"abc", D=3)


# command line


@pytest.fixture
def files(tmp_path):
    src = tmp_path / "in.bin"
    src.write_bytes(sample_data(4000) + b"tail")
    return src, tmp_path / "c.acs", tmp_path / "out.bin"


@pytest.mark.parametrize("args", [[], ["-m", "static", "-D", "16"], ["-m", "adaptive", "--period", "64"], ["-m", "binary", "-D", "2", "-P", "16"]])
def test_cli_roundtrip(files, args):
    src, comp, out = files
    assert main(["compress", str(src), str(comp), *args]) == 0
    assert main(["decompress", str(comp), str(out)]) == 0
    assert out.read_bytes() == src.read_bytes()


def test_cli_lookup_and_info(files, capsys):
    src, comp, out = files
    assert main(["compress", "-m", "static", str(src), str(comp)]) == 0
    assert main(["decompress", "--lookup", "32", str(comp), str(out)]) == 0
    assert out.read_bytes() == src.read_bytes()
    assert main(["info", str(comp)]) == 0
    text = capsys.readouterr().out
    assert "mode\tstatic" in text and "header_bytes\t1047" in text


def test_cli_exit_codes(files, tmp_path, capsys):
    src, comp, out = files
    with pytest.raises(SystemExit) as e:
        main(["compress"])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        main(["compress", "-D", "3", str(src), str(comp)])
    assert e.value.code == 1
    assert main(["compress", "-m", "tree", "--period", "5", str(src), str(comp)]) == 1
    assert main(["compress", "-P", "9", "-D", "256", str(src), str(comp)]) == 1
    bad = tmp_path / "bad.acs"
    bad.write_bytes(b"not a container at all")
    assert main(["decompress", str(bad), str(out)]) == 2
    assert main(["info", str(bad)]) == 2
    assert main(["decompress", str(tmp_path / "missing"), str(out)]) == 3
    main(["compress", str(src), str(comp)])
    comp.write_bytes(comp.read_bytes()[:-3])
    assert main(["decompress", str(comp), str(out)]) == 2


def test_cli_module_stdin_stdout():
    data = sample_data(1000)
    env = dict(os.environ)
    c = subprocess.run([sys.executable, "-m", "arcode", "compress", "-", "-"], input=data, capture_output=True, env=env)
    assert c.returncode == 0
    d = subprocess.run([sys.executable, "-m", "arcode", "decompress", "-", "-"], input=c.stdout, capture_output=True, env=env)
    assert d.returncode == 0 and d.stdout == data

import pytest

from core.config import load_yaml_config, system_params
from pwl_bases import COMMAND_FLAGS


def _write(tmp_path, text, name="run.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_loads_flags_over_defaults(tmp_path):
    path = _write(tmp_path, "command: gram\nsystem: r1\nN: '4'\nexact: true\njson-report: r.json\n")
    args = load_yaml_config(path, COMMAND_FLAGS)
    assert args.command == "gram"
    assert args.N == 4
    assert args.exact is True
    assert args.json_report == "r.json"
    assert args.seed == 0
    assert args.family == "full"


@pytest.mark.parametrize(
    "text, message",
    [
        ("command: gram\nwidth: 3\n", "Unknown key"),
        ("command: fluff\n", "Unknown command"),
        ("system: r1\n", "Missing 'command'"),
        ("- gram\n", "mapping"),
        ("command: [gram\n", "Malformed YAML"),
        ("command: expand\nbasis: hat\n", "Missing required"),
        ("command: gram\nsystem: r7\n", "must be one of"),
        ("command: gram\nN: many\n", "cannot convert"),
    ],
)
def test_rejects_bad_files(tmp_path, text, message):
    with pytest.raises(ValueError, match=message):
        load_yaml_config(_write(tmp_path, text), COMMAND_FLAGS)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_yaml_config(str(tmp_path / "absent.yaml"), COMMAND_FLAGS)


def test_system_params():
    params = system_params(N=3)
    assert (params.N, params.n, params.bound, params.family) == (3, 2, 2, "full")

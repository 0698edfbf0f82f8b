from argparse import ArgumentParser, Namespace
from typing import Callable, Mapping

import yaml

SYSTEM_DEFAULTS = {"N": 8, "n": 2, "bound": 2, "family": "full"}


def _temporary_parser(add_args: Callable[[ArgumentParser], None]) -> tuple[ArgumentParser, list[str]]:
    """Parser holding the flags of one command, with required flags relaxed so defaults can be read."""
    parser = ArgumentParser(add_help=False)
    add_args(parser)
    required = []
    for action in parser._actions:
        if action.required:
            required.append(action.dest)
            action.required = False
    return parser, required


def _coerce(parser: ArgumentParser, key: str, value):
    for action in parser._actions:
        if action.dest != key:
            continue
        if action.type is not None and value is not None and not isinstance(value, bool):
            try:
                value = action.type(value)
            except (TypeError, ValueError) as e:
                raise ValueError(f"'{key}': cannot convert {value!r}: {e}") from e
        if action.choices is not None and value is not None and value not in action.choices:
            raise ValueError(f"'{key}' must be one of {list(action.choices)}, got {value!r}")
        return value
    raise ValueError(f"Unknown key {key!r}")


def load_yaml_config(path: str, commands: Mapping[str, Callable[[ArgumentParser], None]]) -> Namespace:
    """Read a run file: a ``command`` key plus flag names (dest form) as keys.

    ``commands`` maps each command name to the function that adds its flags.
    """
    with open(path, encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ValueError(f"Malformed YAML in {path!r}: {e}") from e

    if not isinstance(data, dict):
        raise ValueError(f"The YAML file must contain a mapping: {path!r}")

    command = data.pop("command", None)
    if not command:
        raise ValueError(f"Missing 'command' field in {path!r}")
    if command not in commands:
        raise ValueError(f"Unknown command {command!r}. Available: {sorted(commands)}")

    parser, required = _temporary_parser(commands[command])
    defaults = vars(parser.parse_args([]))
    for key, value in data.items():
        key = key.replace("-", "_")
        if key not in defaults:
            raise ValueError(f"Unknown key {key!r} for command {command!r} in {path!r}")
        defaults[key] = _coerce(parser, key, value)

    missing = [key for key in required if defaults.get(key) is None]
    if missing:
        raise ValueError(f"Missing required field(s) {missing} for command {command!r} in {path!r}")

    defaults["command"] = command
    return Namespace(**defaults)


def system_params(**overrides) -> Namespace:
    """Size parameters for a Gram system, the library-side counterpart of its CLI flags."""
    params = dict(SYSTEM_DEFAULTS)
    params.update(overrides)
    return Namespace(**params)

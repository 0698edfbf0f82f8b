import json
import math
from dataclasses import asdict, dataclass, field

from core.filesystem import write_json

REPORT_SCHEMA = "run-report/1"


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    tolerance: float
    # informational checks are reported but never change the exit code
    gating: bool = True


@dataclass
class RunReport:
    command: str
    parameters: dict
    outputs: list[str] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    seed: int = 0
    wall_time: float = 0.0

    def add_check(self, name: str, passed: bool, measured: float, tolerance: float, gating: bool = True) -> Check:
        check = Check(name, bool(passed), float(measured), float(tolerance), gating)
        self.checks.append(check)
        return check

    @property
    def failed(self) -> list[Check]:
        return [c for c in self.checks if c.gating and not c.passed]

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def to_dict(self) -> dict:
        checks = []
        for c in self.checks:
            row = asdict(c)
            # JSON has no inf/nan
            for key in ("measured", "tolerance"):
                if not math.isfinite(row[key]):
                    row[key] = str(row[key])
            checks.append(row)
        return {
            "schema": REPORT_SCHEMA,
            "command": self.command,
            "parameters": self.parameters,
            "outputs": list(self.outputs),
            "checks": checks,
            "seed": self.seed,
            "wall_time": self.wall_time,
            "exit_code": self.exit_code,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def write(self, path: str) -> str:
        return write_json(path, self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        if data.get("schema") != REPORT_SCHEMA:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        try:
            checks = [
                Check(c["name"], bool(c["passed"]), float(c["measured"]), float(c["tolerance"]), bool(c.get("gating", True)))
                for c in data["checks"]
            ]
            return cls(
                data["command"],
                dict(data["parameters"]),
                list(data["outputs"]),
                checks,
                int(data["seed"]),
                float(data["wall_time"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ValueError(f"malformed run report: {e}") from e

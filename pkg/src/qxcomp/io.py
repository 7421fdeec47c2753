"""Flat-file formats: distributions, experiment configs and versioned CSV."""

import csv
import json
import math
import os
from dataclasses import dataclass, field, fields, replace

from .coding import check_mode
from .exceptions import InputError
from .typicality import KINDS
from .validation import check_distribution, get_exact_cap

SCHEMA_LINE = "# qxcomp-schema v1"

MASS_FIELDS = ("N", "eps", "kind", "engine", "estimate", "std_error", "trials", "seed")


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def load_distribution(path):
    obj = load_json(path)
    if not isinstance(obj, dict) or "probs" not in obj:
        raise InputError(f"{path}: expected an object with a 'probs' array")
    return check_distribution(obj["probs"])


def save_distribution(p, path):
    with open(path, "w") as fh:
        json.dump({"probs": [float(x) for x in p]}, fh)
        fh.write("\n")


def format_value(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def parse_value(text):
    """Inverse of :func:`format_value` for scalar cells."""
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def write_csv(fh, header, rows):
    fh.write(SCHEMA_LINE + "\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_value(row[k]) for k in header])


def read_csv(fh):
    """Read a versioned CSV back into a list of dicts with parsed values."""
    first = fh.readline().rstrip("\n")
    if first != SCHEMA_LINE:
        raise InputError(f"missing schema line, got {first!r}")
    reader = csv.DictReader(line for line in fh if not line.startswith("#"))
    return [{k: parse_value(v) for k, v in row.items()} for row in reader]


def write_sidecar(path, rows, x="N", y="pi_mass"):
    """Two-column whitespace table for gnuplot."""
    with open(path, "w") as fh:
        fh.write(f"# {x} {y}\n")
        for row in rows:
            fh.write(f"{format_value(row[x])} {format_value(row[y])}\n")


@dataclass
class ExperimentConfig:
    rho0_path: str = None
    sigma0_path: str = None
    dist_path: str = None
    N_list: list = field(default_factory=list)
    eps: float = 0.1
    eps_list: list = None
    kinds: list = field(default_factory=lambda: ["strong"])
    mode: str = "real"
    trials: int = 100_000
    seed: int = 0
    exact_cap: int = None
    output_path: str = None
    jobs: int = 1

    @classmethod
    def from_file(cls, path):
        obj = load_json(path)
        if not isinstance(obj, dict):
            raise InputError(f"{path}: config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise InputError(f"{path}: unknown config keys {sorted(unknown)}")
        base = os.path.dirname(os.path.abspath(path))
        for key in ("rho0_path", "sigma0_path", "dist_path", "output_path"):
            if obj.get(key) and not os.path.isabs(obj[key]):
                obj[key] = os.path.join(base, obj[key])
        return cls(**obj)

    def override(self, **kwargs):
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})

    def validated(self):
        """Return a copy with defaults resolved; raises InputError on bad values."""
        if not self.N_list:
            raise InputError("N_list must be non-empty")
        n_list = [int(n) for n in self.N_list]
        if any(n < 1 for n in n_list) or any(b <= a for a, b in zip(n_list, n_list[1:])):
            raise InputError(f"N_list must be strictly ascending positive integers, got {n_list}")
        eps_list = [float(e) for e in (self.eps_list or [self.eps])]
        if not all(e > 0 for e in eps_list + [float(self.eps)]):
            raise InputError("eps values must be positive")
        if int(self.trials) < 1:
            raise InputError(f"trials must be >= 1, got {self.trials}")
        if int(self.jobs) < 1:
            raise InputError(f"jobs must be >= 1, got {self.jobs}")
        for kind in self.kinds:
            if kind not in KINDS:
                raise InputError(f"kind must be one of {KINDS}, got {kind!r}")
        check_mode(self.mode)
        return replace(
            self,
            N_list=n_list,
            eps=float(self.eps),
            eps_list=eps_list,
            trials=int(self.trials),
            seed=int(self.seed),
            exact_cap=get_exact_cap(self.exact_cap),
            jobs=int(self.jobs),
        )

"""Deterministic JSON emission and strict, path-reporting validation.

Reports must be byte-identical across runs with the same seed, so keys
are emitted sorted and every float is rendered with 17 significant
digits.  Validation walks raw parsed JSON and collects violations as
(JSON pointer, message) pairs instead of failing on the first problem.
"""

import json
import math


def format_float(x):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise TypeError("not a number: %r" % (x,))
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("non-finite numbers are not serializable")
    return format(x, ".17g")


def dump_json(obj, indent=0):
    """Serialize with sorted keys and 17-significant-digit doubles."""
    pad = " " * indent
    inner = " " * (indent + 2)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [dump_json(v, indent + 2) for v in obj]
        return "[\n" + ",\n".join(inner + it for it in items) + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            "%s%s: %s" % (inner, json.dumps(str(k)), dump_json(obj[k], indent + 2))
            for k in sorted(obj)
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise TypeError("cannot serialize %r" % type(obj))


class Validator:
    """Collects JSON-pointer violations while pulling typed fields."""

    def __init__(self):
        self.violations = []

    def fail(self, path, message):
        self.violations.append((path, message))

    def ok(self):
        return not self.violations

    def check_object(self, obj, path, known_keys):
        if not isinstance(obj, dict):
            self.fail(path or "/", "expected an object")
            return False
        for key in obj:
            if key not in known_keys:
                self.fail("%s/%s" % (path, key), "unknown field")
        return True

    def get(self, obj, path, key, required=True, default=None):
        if key not in obj:
            if required:
                self.fail("%s/%s" % (path, key), "missing required field")
            return default
        return obj[key]

    def number(self, value, path, allow_int=True):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(path, "expected a number")
            return None
        f = float(value)
        if not math.isfinite(f):
            self.fail(path, "non-finite number")
            return None
        return f

    def integer(self, value, path, minimum=None):
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(path, "expected an integer")
            return None
        if minimum is not None and value < minimum:
            self.fail(path, "must be >= %d" % minimum)
            return None
        return value

    def string(self, value, path, choices=None):
        if not isinstance(value, str):
            self.fail(path, "expected a string")
            return None
        if choices is not None and value not in choices:
            self.fail(path, "must be one of %s" % "|".join(choices))
            return None
        return value

    def quaternion(self, value, path):
        if not isinstance(value, list) or len(value) != 4:
            self.fail(path, "expected a 4-element array [x0,x1,x2,x3]")
            return None
        comps = []
        for idx, v in enumerate(value):
            f = self.number(v, "%s/%d" % (path, idx))
            if f is None:
                return None
            comps.append(f)
        return comps

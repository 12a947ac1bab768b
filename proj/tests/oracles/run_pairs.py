"""Behavioral equality of two single-argument functions named `f`.

stdin: JSON {"pairs": [[source_a, source_b], ...], "inputs": [...]}.
stdout: JSON list, per pair: true, or the first input where results differ.
"""
import json
import sys


def outcome(fn, x):
    try:
        return ("ok", repr(fn(x)))
    except Exception as e:  # noqa: BLE001
        return ("raise", type(e).__name__)


req = json.load(sys.stdin)
out = []
for a, b in req["pairs"]:
    ns_a, ns_b = {}, {}
    exec(a, ns_a)
    exec(b, ns_b)
    verdict = True
    for x in req["inputs"]:
        if outcome(ns_a["f"], x) != outcome(ns_b["f"], x):
            verdict = x
            break
    out.append(verdict)
print(json.dumps(out))

"""Executes statement orders of straight-line blocks and compares them with
the original order.

stdin: JSON list of {"block": [stmt, ...], "orders": [[i, ...], ...]}.
stdout: JSON list (per block) of lists (per order) of booleans: true when the
reordered block leaves the same state and raises the same exception as the
original on every starting environment. Blocks model function bodies outside
any try statement, so once an exception escapes only the exception type and
the shared lists L and log remain observable.
"""
import json
import sys

ENVS = [
    {"a": 1, "b": 2, "c": 0, "d": 5},
    {"a": -3, "b": 0, "c": 7, "d": 7},
    {"a": 0, "b": 0, "c": 0, "d": 0},
    {"a": 4, "b": -1, "c": 2, "d": 9},
]
OBSERVED = ["a", "b", "c", "d", "e", "L", "log"]


def run(stmts, env):
    ns = dict(env)
    ns["L"] = [0, 0, 0]
    ns["log"] = []
    err = None
    try:
        exec("\n".join(stmts), ns)
    except Exception as e:  # noqa: BLE001
        err = type(e).__name__
    observed = ["L", "log"] if err else OBSERVED
    return err, [repr(ns.get(k, "<unbound>")) for k in observed]


out = []
for item in json.load(sys.stdin):
    block = item["block"]
    want = [run(block, env) for env in ENVS]
    verdicts = []
    for order in item["orders"]:
        reordered = [block[i] for i in order]
        verdicts.append(all(run(reordered, env) == w for env, w in zip(ENVS, want)))
    out.append(verdicts)
print(json.dumps(out))

"""Brute-force pass@k / variation@k recount with exact fractions.

stdin: JSON list of runs, each {"k": int, "problems": [[[digest, verdict], ...], ...]}.
stdout: JSON list of {"pass": "n/d", "variation": "n/d", "undefined": bool}.
"""
import json
import sys
from fractions import Fraction


def ratio(f):
    return "%d/%d" % (f.numerator, f.denominator)


out = []
for run in json.load(sys.stdin):
    k = run["k"]
    fractions = []
    for samples in run["problems"]:
        assert len(samples) == k
        unique = set()
        for digest, verdict in samples:
            if verdict == "pass":
                unique.add(digest)
        fractions.append(Fraction(len(unique), k))
    solved = [f for f in fractions if f > 0]
    pass_at_k = Fraction(len(solved), len(fractions))
    variation = sum(solved, Fraction(0)) / len(solved) if solved else Fraction(0)
    out.append({"pass": ratio(pass_at_k), "variation": ratio(variation), "undefined": not solved})
print(json.dumps(out))

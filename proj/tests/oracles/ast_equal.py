"""Reads a JSON list of [original, rendered] pairs on stdin and prints a JSON
list: true when `rendered` parses to the same tree as `original` with
docstrings removed, else a short reason."""
import ast
import json
import sys


def strip_docstrings(tree):
    for node in ast.walk(tree):
        if isinstance(node, (ast.Module, ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
            body = node.body
            if body and isinstance(body[0], ast.Expr) and isinstance(body[0].value, ast.Constant) \
                    and isinstance(body[0].value.value, str):
                node.body = body[1:] or ([] if isinstance(node, ast.Module) else [ast.Pass()])
    return tree


out = []
for original, rendered in json.load(sys.stdin):
    try:
        want = ast.dump(strip_docstrings(ast.parse(original)))
    except SyntaxError as e:
        out.append("original does not parse: %s" % e)
        continue
    try:
        got = ast.dump(ast.parse(rendered))
    except SyntaxError as e:
        out.append("rendered does not parse: %s" % e)
        continue
    out.append(True if got == want else "tree differs")
print(json.dumps(out))

"""stdin: JSON list of sources. stdout: JSON list of the identifiers each
source reads (Name nodes in Load or Del context), sorted."""
import ast
import json
import sys

out = []
for source in json.load(sys.stdin):
    tree = ast.parse(source)
    reads = {n.id for n in ast.walk(tree) if isinstance(n, ast.Name) and not isinstance(n.ctx, ast.Store)}
    out.append(sorted(reads))
print(json.dumps(out))

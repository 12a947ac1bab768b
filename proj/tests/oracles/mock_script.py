"""Writes the scripted mock replies for Fixture/0..4 and the golden
pass@10 / variation@10 they must produce.

The golden values come from running every reply under the real interpreter
and deduplicating passing replies by their ast dump (docstrings removed),
independently of the C++ harness.
"""
import ast
import json
import sys
from fractions import Fraction

K = 10

RUNNING_MAX = '''def running_max(numbers: List[int]):
    result = []
    best = None
    for n in numbers:
        if best is None or n > best:
            best = n
        result.append(best)
    return result'''
RUNNING_MAX_COMMENTED = '''def running_max(numbers: List[int]):
    # track the best value so far
    result = []
    best = None

    for n in numbers:   # scan
        if best is None or n > best:
            best = n
        result.append(best)
    return result'''
RUNNING_MAX_A = '''def running_max(numbers):
    out = []
    for i, n in enumerate(numbers):
        out.append(n if i == 0 else max(out[-1], n))
    return out'''
RUNNING_MAX_A_SPACED = '''def running_max( numbers ):
    out=[]
    for i,n in enumerate( numbers ):
        out.append( n if i==0 else max(out[-1],n) )
    return out'''
RUNNING_MAX_B = '''def running_max(numbers):
    """Prefix maxima."""
    return [max(numbers[:i + 1]) for i in range(len(numbers))]'''
RUNNING_MAX_C = '''def running_max(numbers):
    import itertools
    return list(itertools.accumulate(numbers, max))'''

SUM_WRONG = '''def sum_of_squares(n):
    return n * n'''
SUM_OFF_BY_ONE = '''def sum_of_squares(n):
    return sum(i * i for i in range(n))'''
SUM_SYNTAX = '''def sum_of_squares(n)
    return sum(i * i for i in range(n + 1))'''
SUM_RAISES = '''def sum_of_squares(n):
    return sum(i * i for i in range(n + 1)) / (n - n)'''
SUM_WRONG_NAME = '''def sum_squares(n):
    return sum(i * i for i in range(n + 1))'''

VOWELS_X = '''def count_vowels(text):
    return sum(1 for ch in text.lower() if ch in 'aeiou')'''
VOWELS_Y = '''def count_vowels(text):
    return len([c for c in text if c in 'aeiouAEIOU'])'''
VOWELS_CASE = '''def count_vowels(text):
    return sum(1 for ch in text if ch in 'aeiou')'''
VOWELS_ZERO = '''def count_vowels(text):
    return 0'''

CLAMP_OK = '''def clamp(x, lo, hi):
    return max(lo, min(x, hi))'''
CLAMP_SWAPPED = '''def clamp(x, lo, hi):
    return min(lo, max(x, hi))'''
CLAMP_NO_HI = '''def clamp(x, lo, hi):
    return max(lo, x)'''

FIB_PASS = [
    '''def fib(n):
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a''',
    '''def fib(n):
    if n < 2:
        return n
    return fib(n - 1) + fib(n - 2)''',
    '''def fib(n):
    x, y = 0, 1
    i = 0
    while i < n:
        x, y = y, x + y
        i += 1
    return x''',
    '''def fib(n):
    seq = [0, 1]
    while len(seq) <= n:
        seq.append(seq[-1] + seq[-2])
    return seq[n]''',
    '''def fib(n):
    memo = {0: 0, 1: 1}
    for i in range(2, n + 1):
        memo[i] = memo[i - 1] + memo[i - 2]
    return memo[n]''',
    '''def fib(n):
    a = 0
    b = 1
    for _ in range(n):
        t = a + b
        a = b
        b = t
    return a''',
    '''def fib(n):
    def go(k, a, b):
        return a if k == 0 else go(k - 1, b, a + b)
    return go(n, 0, 1)''',
]
FIB_FAIL = '''def fib(n):
    a, b = 1, 1
    for _ in range(n):
        a, b = b, a + b
    return a'''


def fence(code, lang='python'):
    return '```%s\n%s\n```' % (lang, code)


REPLIES = {
    'Fixture/0': [
        fence(RUNNING_MAX),
        fence(RUNNING_MAX_COMMENTED),
        fence(RUNNING_MAX_A),
        RUNNING_MAX_A_SPACED,
        'Sure! Here is a version using slicing:\n\n' + fence(RUNNING_MAX_B) + '\n\nIt is quadratic.',
        'Here you go:\n' + fence(RUNNING_MAX_A, ''),
        RUNNING_MAX_C,
        fence(RUNNING_MAX_C),
        RUNNING_MAX,
        'This one avoids the explicit loop.\n\n' + RUNNING_MAX_B + '\n',
    ],
    'Fixture/1': [
        'I cannot help with that.',
        fence(SUM_WRONG),
        fence(SUM_OFF_BY_ONE),
        fence(SUM_SYNTAX),
        fence(SUM_RAISES),
        fence(SUM_WRONG_NAME),
        SUM_WRONG,
        'The answer is n(n+1)(2n+1)/6.',
        '',
        fence(SUM_OFF_BY_ONE),
    ],
    'Fixture/2': [
        fence(VOWELS_X),
        VOWELS_X,
        fence(VOWELS_Y),
        fence(VOWELS_CASE),
        fence(VOWELS_ZERO),
        VOWELS_CASE,
        'no idea',
        fence(VOWELS_ZERO),
        fence(VOWELS_CASE),
        fence(VOWELS_ZERO),
    ],
    'Fixture/3': [
        fence(CLAMP_OK),
        fence(CLAMP_SWAPPED),
        fence(CLAMP_NO_HI),
        CLAMP_SWAPPED,
        CLAMP_NO_HI,
        'clamp is already optimal.',
        fence(CLAMP_SWAPPED),
        fence(CLAMP_NO_HI),
        fence(CLAMP_SWAPPED),
        fence(CLAMP_NO_HI),
    ],
    'Fixture/4': [fence(code) for code in FIB_PASS] + [fence(FIB_FAIL), FIB_FAIL, 'Use Binet\'s formula.'],
}


def extract(raw):
    lines = raw.split('\n')
    for i, line in enumerate(lines):
        if line.strip().startswith('```'):
            for j in range(i + 1, len(lines)):
                if lines[j].strip().startswith('```'):
                    return '\n'.join(lines[i + 1:j])
            return '\n'.join(lines[i + 1:])
    for i, line in enumerate(lines):
        if line.startswith('def '):
            j = i + 1
            while j < len(lines) and (not lines[j].strip() or lines[j][0] in ' \t'):
                j += 1
            while j > i + 1 and not lines[j - 1].strip():
                j -= 1
            code = '\n'.join(lines[i:j])
            try:
                ast.parse(code)
                return code
            except SyntaxError:
                pass
    return None


def fingerprint(code):
    tree = ast.parse(code)
    for node in ast.walk(tree):
        body = getattr(node, 'body', None)
        if isinstance(body, list) and body and isinstance(body[0], ast.Expr) \
                and isinstance(body[0].value, ast.Constant) and isinstance(body[0].value.value, str):
            node.body = body[1:] or [ast.Pass()]
    return ast.dump(tree)


def passes(code, task):
    context = task['prompt']
    module = ast.parse(context)
    keep = [n for n in module.body if not (isinstance(n, ast.FunctionDef) and n.name == task['entry_point'])]
    ns = {'__name__': '__oracle__'}
    try:
        exec(compile(ast.Module(body=keep, type_ignores=[]), 'ctx', 'exec'), ns)
        exec(code, ns)
        exec(task['test'], ns)
        ns['check'](ns[task['entry_point']])
        return True
    except BaseException:
        return False


def main(corpus_path, script_path, golden_path):
    tasks = {}
    for line in open(corpus_path):
        t = json.loads(line)
        tasks[t['task_id']] = t
    outcomes = []
    with open(script_path, 'w') as out:
        for task_id, replies in REPLIES.items():
            assert len(replies) == K, task_id
            correct, unique = 0, set()
            for i, reply in enumerate(replies):
                out.write(json.dumps({'task_id': task_id, 'sample_index': i, 'reply': reply}, sort_keys=True) + '\n')
                code = extract(reply)
                if code is None:
                    continue
                try:
                    key = fingerprint(code)
                except SyntaxError:
                    continue
                if passes(code, tasks[task_id]):
                    correct += 1
                    unique.add(key)
            outcomes.append({'task_id': task_id, 'k': K, 'n_correct': correct, 'n_unique_correct': len(unique)})
    s = [Fraction(o['n_unique_correct'], K) for o in outcomes]
    s_prime = [x for x in s if x > 0]
    pass_at_k = Fraction(len(s_prime), len(s))
    variation = sum(s_prime) / len(s_prime)
    golden = {'k': K, 'outcomes': outcomes, 'pass_at_k': str(pass_at_k), 'variation_at_k': str(variation)}
    with open(golden_path, 'w') as f:
        json.dump(golden, f, indent=2, sort_keys=True)
        f.write('\n')
    print(json.dumps(golden, sort_keys=True))


if __name__ == '__main__':
    main(*sys.argv[1:4])

#include <gtest/gtest.h>

#include "mutabench/error.hpp"
#include "mutabench/sandbox.hpp"
#include "support.hpp"

using namespace mutabench;
using sandbox::Sandbox;

namespace {

corpus::Task make_task(const std::string& entry, const std::string& test) {
    corpus::Task t;
    t.task_id = "T/" + entry;
    t.prompt = "def " + entry + "(x):\n";
    t.entry_point = entry;
    t.canonical_solution = "    return x\n";
    t.test_source = test;
    return t;
}

const corpus::Task& add_task() {
    static const corpus::Task t = make_task("add", "def check(candidate):\n    assert candidate(2) == 4\n    assert candidate(5) == 10\n");
    return t;
}

const std::string kGood = "def add(x):\n    return x + x";
const std::string kLoop = "def add(x):\n    while True:\n        pass";

sandbox::Limits quick(double timeout = 5) { return {timeout, 256}; }

}  // namespace

TEST(Sandbox, CanonicalSolutionsPass) {
    Sandbox sb;
    for (const auto& t : testing_support::fixture_corpus().tasks) {
        auto v = sb.verify(t.reference_source(), t, quick());
        EXPECT_EQ(v.kind, VerdictKind::Pass) << t.task_id << ": " << v.detail;
        EXPECT_GE(v.wall_ms, 0);
    }
}

TEST(Sandbox, WrongAnswerFails) {
    Sandbox sb;
    auto v = sb.verify("def add(x):\n    return None", add_task(), quick());
    EXPECT_EQ(v.kind, VerdictKind::Fail);
}

TEST(Sandbox, NonParseBeforeExecution) {
    Sandbox sb;
    auto v = sb.verify("def add(x:\n    return", add_task(), quick());
    EXPECT_EQ(v.kind, VerdictKind::NonParse);
    EXPECT_EQ(sb.verify("", add_task(), quick()).kind, VerdictKind::NonParse);
}

TEST(Sandbox, RuntimeErrors) {
    Sandbox sb;
    auto div = sb.verify("def add(x):\n    return x // 0", add_task(), quick());
    EXPECT_EQ(div.kind, VerdictKind::RuntimeError);
    EXPECT_NE(div.detail.find("ZeroDivisionError"), std::string::npos) << div.detail;
    auto missing = sb.verify("def other(x):\n    return x", add_task(), quick());
    EXPECT_EQ(missing.kind, VerdictKind::RuntimeError);
    EXPECT_NE(missing.detail.find("entry point not defined"), std::string::npos) << missing.detail;
    auto exits = sb.verify("import sys\ndef add(x):\n    sys.exit(3)", add_task(), quick());
    EXPECT_NE(exits.kind, VerdictKind::Pass);
}

TEST(Sandbox, InfiniteLoopTimesOut) {
    Sandbox sb;
    auto v = sb.verify(kLoop, add_task(), quick(2));
    EXPECT_EQ(v.kind, VerdictKind::Timeout);
    EXPECT_GE(v.wall_ms, 2000);
    EXPECT_LE(v.wall_ms, 4000);
}

TEST(Sandbox, ChildProcessesAreKilledOnTimeout) {
    Sandbox sb;
    std::string candidate =
        "import os, time\n"
        "def add(x):\n"
        "    if os.fork() == 0:\n"
        "        while True:\n"
        "            time.sleep(0.05)\n"
        "    while True:\n"
        "        pass";
    auto v = sb.verify(candidate, add_task(), quick(1));
    EXPECT_EQ(v.kind, VerdictKind::Timeout);
    EXPECT_LE(v.wall_ms, 2000);
}

TEST(Sandbox, StdoutFloodStillReports) {
    Sandbox sb;
    auto v = sb.verify("def add(x):\n    print('x' * 100000)\n    print('{\"status\": \"pass\"}')\n    return x + x", add_task(), quick());
    EXPECT_EQ(v.kind, VerdictKind::Pass) << v.detail;
    auto f = sb.verify("def add(x):\n    print('y' * 100000)\n    return 0", add_task(), quick());
    EXPECT_EQ(f.kind, VerdictKind::Fail) << f.detail;
}

TEST(Sandbox, MemoryLimit) {
    Sandbox sb;
    auto v = sb.verify("def add(x):\n    return len(bytearray(2 ** 31)) and x + x", add_task(), {5, 128});
    EXPECT_EQ(v.kind, VerdictKind::RuntimeError);
    EXPECT_NE(v.detail.find("MemoryError"), std::string::npos) << v.detail;
}

TEST(Sandbox, Isolation) {
    auto task = make_task("probe", "import builtins\ndef check(candidate):\n    assert not hasattr(builtins, 'LEAK')\n    candidate(1)\n");
    std::string leaker = "import builtins\ndef probe(x):\n    builtins.LEAK = x";
    for (bool fork_server : {true, false}) {
        sandbox::Options o;
        o.fork_server = fork_server;
        Sandbox sb(o);
        EXPECT_EQ(sb.verify(leaker, task, quick()).kind, VerdictKind::Pass);
        EXPECT_EQ(sb.verify(leaker, task, quick()).kind, VerdictKind::Pass);
        auto batch = sb.verify_batch(std::vector<std::string>(6, leaker), task, quick(), 1);
        for (const auto& v : batch) EXPECT_EQ(v.kind, VerdictKind::Pass) << v.detail;
    }
}

TEST(Sandbox, WorkingDirectoryIsThrowaway) {
    Sandbox sb;
    auto task = make_task("cwd", "def check(candidate):\n    assert candidate(0)\n");
    std::string c = "import os\ndef cwd(x):\n    open('scratch.txt', 'w').write('x')\n    return os.listdir('.') and not os.path.exists('/scratch.txt')";
    EXPECT_EQ(sb.verify(c, task, quick()).kind, VerdictKind::Pass);
}

TEST(Sandbox, BatchPreservesOrder) {
    Sandbox sb;
    std::vector<std::string> cands;
    std::vector<VerdictKind> want;
    for (int i = 0; i < 10; ++i) {
        switch (i % 3) {
            case 0: cands.push_back(kGood); want.push_back(VerdictKind::Pass); break;
            case 1: cands.push_back("def add(x):\n    return x"); want.push_back(VerdictKind::Fail); break;
            default: cands.push_back("def add(x:"); want.push_back(VerdictKind::NonParse); break;
        }
    }
    auto par = sb.verify_batch(cands, add_task(), quick(), 4);
    auto seq = sb.verify_batch(cands, add_task(), quick(), 1);
    ASSERT_EQ(par.size(), 10u);
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_EQ(par[i].kind, want[i]) << i;
        EXPECT_EQ(seq[i].kind, par[i].kind) << i;
    }
}

TEST(Sandbox, MixedTriple) {
    Sandbox sb;
    auto v = sb.verify_batch({kGood, "def add(x) return", kLoop}, add_task(), quick(2), 3);
    ASSERT_EQ(v.size(), 3u);
    EXPECT_EQ(v[0].kind, VerdictKind::Pass);
    EXPECT_EQ(v[1].kind, VerdictKind::NonParse);
    EXPECT_EQ(v[2].kind, VerdictKind::Timeout);
}

TEST(Sandbox, SpawnModeAgreesWithForkServer) {
    sandbox::Options spawn;
    spawn.fork_server = false;
    Sandbox a;
    Sandbox b(spawn);
    std::vector<std::string> cands = {kGood, "def add(x):\n    return x", "def add(x):\n    return 1 / 0", "def nope(x):\n    pass"};
    auto va = a.verify_batch(cands, add_task(), quick());
    auto vb = b.verify_batch(cands, add_task(), quick());
    for (std::size_t i = 0; i < cands.size(); ++i) EXPECT_EQ(va[i].kind, vb[i].kind) << i;
    EXPECT_EQ(b.verify(kLoop, add_task(), quick(1)).kind, VerdictKind::Timeout);
}

TEST(Sandbox, MissingInterpreterIsSetupError) {
    for (bool fork_server : {true, false}) {
        sandbox::Options o;
        o.interpreter = "/nonexistent/python-for-tests";
        o.fork_server = fork_server;
        Sandbox sb(o);
        try {
            sb.verify(kGood, add_task(), quick());
            FAIL() << "expected a setup error";
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::SandboxSetup);
        }
    }
}

TEST(Sandbox, PromptContextAndScript) {
    corpus::Task t;
    t.prompt = "import math\nfrom typing import List\n\n\ndef helper(a):\n    return a\n\n\ndef g(x: List[int]):\n    \"\"\"doc\"\"\"\n";
    t.entry_point = "g";
    t.test_source = "def check(candidate):\n    pass\n";
    EXPECT_EQ(sandbox::prompt_context(t), "import math\nfrom typing import List\ndef helper(a):\n    return a\n");
    std::string script = sandbox::execution_script("def g(x):\n    return x", t);
    auto cand = script.find("def g(x)");
    auto tests = script.find("def check");
    EXPECT_LT(script.find("import math"), cand);
    EXPECT_LT(cand, tests);
    EXPECT_EQ(script.substr(script.size() - 9), "check(g)\n");
}

TEST(ShimReport, ParsesFinalLine) {
    auto r = sandbox::parse_shim_report("noise\n{\"status\": \"fail\", \"message\": \"m\", \"elapsed_ms\": 3}\n\n");
    ASSERT_TRUE(r.has_value());
    EXPECT_EQ(r->status, "fail");
    EXPECT_EQ(r->message, "m");
    EXPECT_EQ(r->elapsed_ms, 3);
    EXPECT_FALSE(sandbox::parse_shim_report("no json here").has_value());
    EXPECT_FALSE(sandbox::parse_shim_report("").has_value());
}

TEST(ShimReport, FakeShimIsSelfContained) {
    const auto& src = sandbox::fake_shim_source();
    EXPECT_NE(src.find("entry point not defined"), std::string::npos);
    auto r = testing_support::run_python("import ast, sys\nast.parse(sys.stdin.read())\nprint('ok')\n", src);
    EXPECT_EQ(r.output, "ok\n");
}

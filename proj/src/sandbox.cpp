#include "mutabench/sandbox.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>
#include <thread>

#include "mutabench/error.hpp"
#include "mutabench/py/parser.hpp"

namespace mutabench::sandbox {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::size_t kOutputTail = 64 * 1024;

const char* const kFakeShim = R"PY(import io
import sys
import time

LIMIT = 8192


def encode(text):
    out = []
    for ch in text:
        code = ord(ch)
        if ch == '"':
            out.append('\\"')
        elif ch == '\\':
            out.append('\\\\')
        elif code < 0x20 or code > 0x7e:
            if code > 0xffff:
                code -= 0x10000
                out.append('\\u%04x\\u%04x' % (0xd800 + (code >> 10), 0xdc00 + (code & 0x3ff)))
            else:
                out.append('\\u%04x' % code)
        else:
            out.append(ch)
    return ''.join(out)


def finish(status, message, started):
    sys.stdout = sys.__stdout__
    sys.stderr = sys.__stderr__
    elapsed = int((time.monotonic() - started) * 1000)
    sys.stdout.write('\n{"status": "%s", "message": "%s", "elapsed_ms": %d}\n' % (status, encode(message), elapsed))
    sys.stdout.flush()
    sys.exit(0 if status == 'pass' else 1)


def main():
    started = time.monotonic()
    path, entry = sys.argv[1], sys.argv[2]
    with open(path, encoding='utf-8') as f:
        text = f.read()
    body, _, last = text.rstrip('\n').rpartition('\n')
    if last.strip() != 'check(%s)' % entry:
        body = text
    captured = io.StringIO()
    sys.stdout = captured
    sys.stderr = captured
    namespace = {'__name__': '__sandbox__'}
    status, message = 'pass', ''
    try:
        exec(compile(body, path, 'exec'), namespace)
        if entry not in namespace:
            status, message = 'runtime_error', 'entry point not defined'
        else:
            namespace['check'](namespace[entry])
    except AssertionError as e:
        status, message = 'fail', ('AssertionError: %s' % e).rstrip(': ')
    except BaseException as e:
        status, message = 'runtime_error', '%s: %s' % (type(e).__name__, e)
    if status != 'pass':
        output = captured.getvalue()
        if output:
            message += '\n' + output[-LIMIT:]
    finish(status, message, started)


main()
)PY";

// Warm interpreter that forks one child per candidate. Requests are single
// tab-separated lines on stdin; for each the server answers "<pid>" once the
// child exists and "<pid> <wait status>" once it has been reaped.
const char* const kForkServer = R"PY(import os
import runpy
import sys
import traceback

import io
import time
import typing


def child(shim, script, entry, cwd, memory, output):
    code = 1
    try:
        os.setpgid(0, 0)
        fd = os.open(output, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o600)
        os.dup2(fd, 1)
        os.dup2(fd, 2)
        os.close(fd)
        fd = os.open('/dev/null', os.O_RDONLY)
        os.dup2(fd, 0)
        os.close(fd)
        os.chdir(cwd)
        os.environ['HOME'] = cwd
        import resource
        resource.setrlimit(resource.RLIMIT_AS, (memory, memory))
        resource.setrlimit(resource.RLIMIT_CORE, (0, 0))
        sys.argv = [shim, script, entry]
        sys.path[0] = os.path.dirname(shim)
        runpy.run_path(shim, run_name='__main__')
        code = 0
    except SystemExit as e:
        if e.code is None:
            code = 0
        elif isinstance(e.code, int):
            code = e.code
        else:
            code = 1
    except BaseException:
        traceback.print_exc()
    finally:
        try:
            sys.stdout.flush()
            sys.stderr.flush()
        except BaseException:
            pass
        os._exit(code)


def serve():
    replies = sys.stdout
    for raw in sys.stdin.buffer:
        fields = raw.decode('utf-8').rstrip('\n').split('\t')
        if len(fields) != 6:
            replies.write('error\n')
            replies.flush()
            continue
        replies.flush()
        pid = os.fork()
        if pid == 0:
            child(fields[0], fields[1], fields[2], fields[3], int(fields[4]), fields[5])
        try:
            os.setpgid(pid, pid)
        except OSError:
            pass
        replies.write('%d\n' % pid)
        replies.flush()
        _, status = os.waitpid(pid, 0)
        replies.write('%d %d\n' % (pid, status))
        replies.flush()


serve()
)PY";

std::string resolve_interpreter(const std::string& name) {
    if (name.find('/') != std::string::npos) return access(name.c_str(), X_OK) == 0 ? name : std::string{};
    const char* path = std::getenv("PATH");
    std::string dirs = path != nullptr ? path : "/usr/bin:/bin";
    std::size_t pos = 0;
    while (pos <= dirs.size()) {
        std::size_t colon = dirs.find(':', pos);
        std::string dir = dirs.substr(pos, colon == std::string::npos ? std::string::npos : colon - pos);
        std::string candidate = (dir.empty() ? "." : dir) + "/" + name;
        if (access(candidate.c_str(), X_OK) == 0) return candidate;
        if (colon == std::string::npos) break;
        pos = colon + 1;
    }
    return {};
}

fs::path make_temp_dir(const fs::path& parent, const char* stem) {
    std::string tmpl = (parent / (std::string(stem) + "XXXXXX")).string();
    if (mkdtemp(tmpl.data()) == nullptr) {
        throw Error(ErrorKind::SandboxSetup, "cannot create temp dir under " + parent.string() + ": " + std::strerror(errno));
    }
    return tmpl;
}

void write_text(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorKind::SandboxSetup, "cannot write " + path.string());
}

struct ProcessResult {
    bool timed_out = false;
    bool exec_failed = false;
    int exec_errno = 0;
    int status = 0;
    std::string output;
    std::int64_t wall_ms = 0;
};

// Runs argv in `cwd` with stdout and stderr captured; the child leads its
// own process group so the whole tree can be killed at the deadline.
ProcessResult run_process(const std::vector<std::string>& argv, const fs::path& cwd, const Limits& limits) {
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    std::string home = "HOME=" + cwd.string();
    std::string path_env = std::string("PATH=") + (std::getenv("PATH") ? std::getenv("PATH") : "/usr/bin:/bin");
    std::vector<std::string> env_strings = {path_env, home, "LANG=C.UTF-8", "PYTHONDONTWRITEBYTECODE=1",
                                            "PYTHONHASHSEED=0"};
    std::vector<char*> env;
    for (auto& e : env_strings) env.push_back(e.data());
    env.push_back(nullptr);
    std::string dir = cwd.string();
    rlim_t memory = static_cast<rlim_t>(limits.memory_mb) * 1024 * 1024;

    int out_pipe[2];
    int err_pipe[2];
    if (pipe2(out_pipe, O_CLOEXEC) != 0 || pipe2(err_pipe, O_CLOEXEC) != 0) {
        throw Error(ErrorKind::SandboxSetup, std::string("pipe: ") + std::strerror(errno));
    }
    auto start = Clock::now();
    pid_t pid = fork();
    if (pid < 0) throw Error(ErrorKind::SandboxSetup, std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
        setpgid(0, 0);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(out_pipe[1], STDERR_FILENO);
        int devnull = open("/dev/null", O_RDONLY);
        if (devnull >= 0) dup2(devnull, STDIN_FILENO);
        struct rlimit as{memory, memory};
        setrlimit(RLIMIT_AS, &as);
        struct rlimit core{0, 0};
        setrlimit(RLIMIT_CORE, &core);
        if (chdir(dir.c_str()) != 0) _exit(126);
        execve(args[0], args.data(), env.data());
        int e = errno;
        ssize_t ignored = write(err_pipe[1], &e, sizeof(e));
        (void)ignored;
        _exit(127);
    }
    setpgid(pid, pid);
    close(out_pipe[1]);
    close(err_pipe[1]);

    ProcessResult r;
    auto deadline = start + std::chrono::milliseconds(static_cast<std::int64_t>(limits.timeout_s * 1000));
    bool open_stream = true;
    bool reaped = false;
    char buf[8192];
    while (true) {
        auto now = Clock::now();
        if (now >= deadline) {
            r.timed_out = true;
            break;
        }
        if (open_stream) {
            auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
            pollfd p{out_pipe[0], POLLIN, 0};
            int ready = poll(&p, 1, static_cast<int>(std::min<std::int64_t>(left + 1, 100)));
            if (ready > 0) {
                ssize_t n = read(out_pipe[0], buf, sizeof(buf));
                if (n > 0) {
                    r.output.append(buf, static_cast<std::size_t>(n));
                    if (r.output.size() > 2 * kOutputTail) r.output.erase(0, r.output.size() - kOutputTail);
                } else if (n == 0 || (errno != EINTR && errno != EAGAIN)) {
                    open_stream = false;
                }
            }
        }
        int status = 0;
        pid_t w = waitpid(pid, &status, WNOHANG);
        if (w == pid) {
            r.status = status;
            reaped = true;
            // Drain whatever is still buffered in the pipe.
            fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
            ssize_t n;
            while ((n = read(out_pipe[0], buf, sizeof(buf))) > 0) r.output.append(buf, static_cast<std::size_t>(n));
            break;
        }
        if (!open_stream) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    kill(-pid, SIGKILL);
    if (!reaped) waitpid(pid, &r.status, 0);
    r.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
    close(out_pipe[0]);
    int e = 0;
    if (read(err_pipe[0], &e, sizeof(e)) == static_cast<ssize_t>(sizeof(e))) {
        r.exec_failed = true;
        r.exec_errno = e;
    }
    close(err_pipe[0]);
    if (r.output.size() > kOutputTail) r.output.erase(0, r.output.size() - kOutputTail);
    return r;
}

std::string read_tail(const fs::path& path, std::size_t n) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) return {};
    std::streamoff size = in.tellg();
    std::streamoff from = size > static_cast<std::streamoff>(n) ? size - static_cast<std::streamoff>(n) : 0;
    in.seekg(from);
    std::string out(static_cast<std::size_t>(size - from), '\0');
    in.read(out.data(), static_cast<std::streamsize>(out.size()));
    return out;
}

}  // namespace

class ForkServer {
public:
    ForkServer(const std::vector<std::string>& argv, const fs::path& cwd) {
        std::vector<char*> args;
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        std::string path_env = std::string("PATH=") + (std::getenv("PATH") ? std::getenv("PATH") : "/usr/bin:/bin");
        std::vector<std::string> env_strings = {path_env, "HOME=" + cwd.string(), "LANG=C.UTF-8",
                                                "PYTHONDONTWRITEBYTECODE=1", "PYTHONHASHSEED=0"};
        std::vector<char*> env;
        for (auto& e : env_strings) env.push_back(e.data());
        env.push_back(nullptr);
        std::string dir = cwd.string();

        int in_pipe[2];
        int out_pipe[2];
        int err_pipe[2];
        if (pipe2(in_pipe, O_CLOEXEC) != 0 || pipe2(out_pipe, O_CLOEXEC) != 0 || pipe2(err_pipe, O_CLOEXEC) != 0) {
            throw Error(ErrorKind::SandboxSetup, std::string("pipe: ") + std::strerror(errno));
        }
        pid_ = fork();
        if (pid_ < 0) throw Error(ErrorKind::SandboxSetup, std::string("fork: ") + std::strerror(errno));
        if (pid_ == 0) {
            dup2(in_pipe[0], STDIN_FILENO);
            dup2(out_pipe[1], STDOUT_FILENO);
            int devnull = open("/dev/null", O_WRONLY);
            if (devnull >= 0) dup2(devnull, STDERR_FILENO);
            if (chdir(dir.c_str()) != 0) _exit(126);
            execve(args[0], args.data(), env.data());
            int e = errno;
            ssize_t ignored = write(err_pipe[1], &e, sizeof(e));
            (void)ignored;
            _exit(127);
        }
        close(in_pipe[0]);
        close(out_pipe[1]);
        close(err_pipe[1]);
        to_ = in_pipe[1];
        from_ = out_pipe[0];
        int e = 0;
        ssize_t n = read(err_pipe[0], &e, sizeof(e));
        close(err_pipe[0]);
        if (n == static_cast<ssize_t>(sizeof(e))) {
            shutdown();
            throw Error(ErrorKind::SandboxSetup, "cannot execute " + argv.front() + ": " + std::strerror(e));
        }
    }

    ~ForkServer() { shutdown(); }
    ForkServer(const ForkServer&) = delete;
    ForkServer& operator=(const ForkServer&) = delete;

    bool healthy() const noexcept { return healthy_; }

    ProcessResult run(const fs::path& shim, const fs::path& script, const std::string& entry, const fs::path& cwd,
                      const Limits& limits) {
        fs::path output = cwd / "output.txt";
        std::string request = shim.string() + "\t" + script.string() + "\t" + entry + "\t" + cwd.string() + "\t" +
                              std::to_string(static_cast<long long>(limits.memory_mb) * 1024 * 1024) + "\t" +
                              output.string() + "\n";
        ProcessResult r;
        auto start = Clock::now();
        auto deadline = start + std::chrono::milliseconds(static_cast<std::int64_t>(limits.timeout_s * 1000));
        if (!write_all(request)) fail("fork server is gone");
        std::string line;
        if (!read_line(line, start + std::chrono::seconds(30))) fail("fork server did not start the child");
        pid_t child = static_cast<pid_t>(std::strtol(line.c_str(), nullptr, 10));
        if (child <= 0) fail("fork server rejected the request");
        if (!read_line(line, deadline)) {
            r.timed_out = true;
            kill(-child, SIGKILL);
            kill(child, SIGKILL);
            if (!read_line(line, Clock::now() + std::chrono::seconds(10))) fail("fork server did not reap the child");
        }
        kill(-child, SIGKILL);
        r.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
        std::size_t space = line.find(' ');
        r.status = space == std::string::npos ? 0 : std::atoi(line.c_str() + space + 1);
        r.output = read_tail(output, kOutputTail);
        return r;
    }

private:
    [[noreturn]] void fail(const std::string& why) {
        healthy_ = false;
        throw Error(ErrorKind::SandboxSetup, why);
    }

    bool write_all(std::string_view data) {
        while (!data.empty()) {
            ssize_t n = write(to_, data.data(), data.size());
            if (n < 0 && errno == EINTR) continue;
            if (n <= 0) return false;
            data.remove_prefix(static_cast<std::size_t>(n));
        }
        return true;
    }

    // False when the deadline passes first; EOF marks the server unhealthy.
    bool read_line(std::string& line, Clock::time_point deadline) {
        while (true) {
            std::size_t nl = buffer_.find('\n');
            if (nl != std::string::npos) {
                line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                return true;
            }
            auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
            if (left <= 0) return false;
            pollfd p{from_, POLLIN, 0};
            int ready = poll(&p, 1, static_cast<int>(std::min<std::int64_t>(left, 1000)));
            if (ready < 0 && errno != EINTR) fail(std::string("poll: ") + std::strerror(errno));
            if (ready <= 0) continue;
            char buf[256];
            ssize_t n = read(from_, buf, sizeof(buf));
            if (n < 0 && errno == EINTR) continue;
            if (n <= 0) fail("fork server exited");
            buffer_.append(buf, static_cast<std::size_t>(n));
        }
    }

    void shutdown() {
        if (to_ >= 0) close(to_);
        if (from_ >= 0) close(from_);
        to_ = from_ = -1;
        if (pid_ > 0) {
            kill(pid_, SIGKILL);
            waitpid(pid_, nullptr, 0);
            pid_ = -1;
        }
    }

    pid_t pid_ = -1;
    int to_ = -1;
    int from_ = -1;
    std::string buffer_;
    bool healthy_ = true;
};

namespace {

std::string tail(const std::string& text, std::size_t n) {
    return text.size() <= n ? text : text.substr(text.size() - n);
}

}  // namespace

std::optional<ShimReport> parse_shim_report(std::string_view output) {
    std::size_t end = output.find_last_not_of(" \t\r\n");
    if (end == std::string_view::npos) return std::nullopt;
    std::size_t start = output.rfind('\n', end);
    start = start == std::string_view::npos ? 0 : start + 1;
    auto j = nlohmann::json::parse(output.substr(start, end + 1 - start), nullptr, false);
    if (!j.is_object() || !j.contains("status") || !j["status"].is_string()) return std::nullopt;
    ShimReport r;
    r.status = j["status"].get<std::string>();
    if (r.status != "pass" && r.status != "fail" && r.status != "runtime_error") return std::nullopt;
    if (j.contains("message") && j["message"].is_string()) r.message = j["message"].get<std::string>();
    if (j.contains("elapsed_ms") && j["elapsed_ms"].is_number_integer()) r.elapsed_ms = j["elapsed_ms"].get<std::int64_t>();
    return r;
}

const std::string& fake_shim_source() {
    static const std::string source = kFakeShim;
    return source;
}

std::string prompt_context(const corpus::Task& task) {
    py::Node module;
    try {
        module = py::parse_module(task.prompt);
    } catch (const ParseError&) {
        return {};
    }
    std::string out;
    for (const auto& s : module.kids) {
        if (s.kind == py::Kind::FunctionDef && s.text == task.entry_point) continue;
        out.append(task.prompt, s.begin, s.end - s.begin);
        out += '\n';
    }
    return out;
}

std::string execution_script(std::string_view candidate, const corpus::Task& task) {
    std::string script = prompt_context(task);
    if (!script.empty()) script += "\n\n";
    script += candidate;
    script += "\n\n\n";
    script += task.test_source;
    script += "\n\ncheck(" + task.entry_point + ")\n";
    return script;
}

Sandbox::Sandbox(Options options) : options_(std::move(options)) {
    std::error_code ec;
    fs::path tmp = fs::temp_directory_path(ec);
    if (ec) tmp = "/tmp";
    workdir_ = make_temp_dir(tmp, "mutabench-");
    if (options_.shim_path.empty()) {
        shim_ = workdir_ / "shim.py";
        write_text(shim_, fake_shim_source());
    } else {
        shim_ = fs::absolute(options_.shim_path);
    }
    if (options_.fork_server) {
        server_script_ = workdir_ / "forkserver.py";
        write_text(server_script_, kForkServer);
    }
}

Sandbox::~Sandbox() {
    idle_.clear();
    std::error_code ec;
    fs::remove_all(workdir_, ec);
}

unsigned Sandbox::parallelism() const noexcept {
    if (options_.parallelism > 0) return options_.parallelism;
    return std::max(1u, std::thread::hardware_concurrency());
}

std::unique_ptr<ForkServer> Sandbox::acquire_server(const std::string& interpreter) const {
    {
        std::lock_guard lock(pool_mu_);
        if (!idle_.empty()) {
            auto server = std::move(idle_.back());
            idle_.pop_back();
            return server;
        }
    }
    std::vector<std::string> argv = {interpreter};
    argv.insert(argv.end(), options_.interpreter_args.begin(), options_.interpreter_args.end());
    argv.push_back(server_script_.string());
    return std::make_unique<ForkServer>(argv, workdir_);
}

void Sandbox::release_server(std::unique_ptr<ForkServer> server) const {
    if (!server->healthy()) return;
    std::lock_guard lock(pool_mu_);
    idle_.push_back(std::move(server));
}

Verdict Sandbox::verify(std::string_view candidate, const corpus::Task& task, const Limits& limits) const {
    Verdict v;
    if (candidate.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        v.kind = VerdictKind::NonParse;
        v.detail = "empty candidate";
        return v;
    }
    try {
        py::parse_module(candidate);
    } catch (const ParseError& e) {
        v.kind = VerdictKind::NonParse;
        v.detail = e.what();
        return v;
    }
    std::string interpreter = resolve_interpreter(options_.interpreter);
    if (interpreter.empty()) throw Error(ErrorKind::SandboxSetup, "interpreter not found: " + options_.interpreter);
    if (!fs::exists(shim_)) throw Error(ErrorKind::SandboxSetup, "runner shim not found: " + shim_.string());

    fs::path dir = make_temp_dir(workdir_, "run-");
    fs::path script = dir / "script.py";
    write_text(script, execution_script(candidate, task));
    ProcessResult r;
    try {
        if (options_.fork_server) {
            auto server = acquire_server(interpreter);
            r = server->run(shim_, script, task.entry_point, dir, limits);
            release_server(std::move(server));
        } else {
            std::vector<std::string> argv = {interpreter};
            argv.insert(argv.end(), options_.interpreter_args.begin(), options_.interpreter_args.end());
            argv.push_back(shim_.string());
            argv.push_back(script.string());
            argv.push_back(task.entry_point);
            r = run_process(argv, dir, limits);
        }
    } catch (...) {
        std::error_code ec;
        fs::remove_all(dir, ec);
        throw;
    }
    std::error_code ec;
    fs::remove_all(dir, ec);

    v.wall_ms = r.wall_ms;
    if (r.exec_failed) {
        throw Error(ErrorKind::SandboxSetup, "cannot execute " + interpreter + ": " + std::strerror(r.exec_errno));
    }
    if (r.timed_out) {
        v.kind = VerdictKind::Timeout;
        char msg[64];
        std::snprintf(msg, sizeof(msg), "killed at the %g s deadline", limits.timeout_s);
        v.detail = msg;
        return v;
    }
    auto report = parse_shim_report(r.output);
    int exit_code = WIFEXITED(r.status) ? WEXITSTATUS(r.status) : -1;
    if (!report) {
        v.kind = VerdictKind::RuntimeError;
        if (WIFSIGNALED(r.status)) {
            v.detail = "killed by signal " + std::to_string(WTERMSIG(r.status));
        } else {
            v.detail = "no shim report (exit " + std::to_string(exit_code) + ")";
        }
        std::string out = tail(r.output, 2048);
        if (!out.empty()) v.detail += "\n" + out;
        return v;
    }
    v.detail = report->message;
    if (report->status == "pass") {
        v.kind = exit_code == 0 ? VerdictKind::Pass : VerdictKind::RuntimeError;
        if (exit_code != 0) v.detail = "shim reported pass but exited " + std::to_string(exit_code);
    } else if (report->status == "fail") {
        v.kind = VerdictKind::Fail;
    } else {
        v.kind = VerdictKind::RuntimeError;
    }
    return v;
}

std::vector<Verdict> Sandbox::verify_batch(const std::vector<std::string>& candidates, const corpus::Task& task,
                                           const Limits& limits, unsigned parallelism) const {
    std::vector<Verdict> out(candidates.size());
    unsigned workers = parallelism > 0 ? parallelism : this->parallelism();
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, candidates.size()));
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::vector<std::string> failures;
    auto work = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= candidates.size()) return;
            try {
                out[i] = verify(candidates[i], task, limits);
            } catch (const Error& e) {
                std::lock_guard lock(mu);
                failures.push_back("candidate " + std::to_string(i) + ": " + e.what());
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (!failures.empty()) {
        std::string msg = std::to_string(failures.size()) + " sandbox setup failure(s)";
        for (const auto& f : failures) msg += "\n  " + f;
        throw Error(ErrorKind::SandboxSetup, msg);
    }
    return out;
}

std::vector<std::string> self_check_corpus(const corpus::Corpus& corpus, const Sandbox& sandbox, const Limits& limits) {
    std::vector<std::string> failed;
    for (const auto& task : corpus.tasks) {
        if (!sandbox.verify(task.reference_source(), task, limits).passed()) failed.push_back(task.task_id);
    }
    return failed;
}

}  // namespace mutabench::sandbox

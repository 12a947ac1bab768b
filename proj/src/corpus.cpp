#include "mutabench/corpus.hpp"

#include <zlib.h>

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "mutabench/error.hpp"
#include "mutabench/py/parser.hpp"

namespace mutabench::corpus {

namespace {

constexpr const char* kFields[] = {"task_id", "prompt", "entry_point", "canonical_solution", "test"};

bool is_identifier(std::string_view s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    }
    return true;
}

std::string gunzip(const std::filesystem::path& path) {
    gzFile gz = gzopen(path.c_str(), "rb");
    if (gz == nullptr) throw Error(ErrorKind::FileNotFound, "cannot open " + path.string());
    std::string out;
    char buf[1 << 16];
    int n;
    while ((n = gzread(gz, buf, sizeof(buf))) > 0) out.append(buf, static_cast<std::size_t>(n));
    int err = 0;
    const char* msg = gzerror(gz, &err);
    std::string reason = err < 0 ? msg : "";
    gzclose(gz);
    if (n < 0 || !reason.empty()) throw Error(ErrorKind::MalformedRecord, "gzip: " + reason);
    return out;
}

Task task_from_record(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("record is not an object");
    for (const char* f : kFields) {
        if (!j.contains(f)) throw std::invalid_argument(std::string("missing field `") + f + "`");
        if (!j[f].is_string()) throw std::invalid_argument(std::string("field `") + f + "` is not a string");
    }
    Task t;
    t.task_id = j["task_id"].get<std::string>();
    t.prompt = j["prompt"].get<std::string>();
    t.entry_point = j["entry_point"].get<std::string>();
    t.canonical_solution = j["canonical_solution"].get<std::string>();
    t.test_source = j["test"].get<std::string>();
    return t;
}

}  // namespace

const Task* Corpus::find(std::string_view task_id) const {
    for (const auto& t : tasks) {
        if (t.task_id == task_id) return &t;
    }
    return nullptr;
}

std::string validate_task(const Task& task) {
    if (task.task_id.empty()) return "empty task_id";
    if (!is_identifier(task.entry_point)) return "entry_point is not an identifier";
    try {
        py::Node module = py::parse_module(task.reference_source());
        bool defined = false;
        for (const auto& s : module.kids) {
            if (s.kind == py::Kind::FunctionDef && s.text == task.entry_point) defined = true;
        }
        if (!defined) return "prompt + canonical_solution does not define `" + task.entry_point + "`";
    } catch (const ParseError& e) {
        return std::string("prompt + canonical_solution: ") + e.what();
    }
    try {
        py::Node tests = py::parse_module(task.test_source);
        int checks = 0;
        for (const auto& s : tests.kids) {
            if (s.kind == py::Kind::FunctionDef && s.text == "check" && !s.kids[0].kids.empty()) ++checks;
        }
        if (checks != 1) return "test must define exactly one `check(candidate)`";
    } catch (const ParseError& e) {
        return std::string("test: ") + e.what();
    }
    return {};
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::FileNotFound, "file not found: " + path.string());
    unsigned char magic[2] = {0, 0};
    in.read(reinterpret_cast<char*>(magic), 2);
    if (in.gcount() == 2 && magic[0] == 0x1f && magic[1] == 0x8b) return gunzip(path);
    in.clear();
    in.seekg(0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Corpus parse_corpus(std::string_view text, std::string source_path, const LoadOptions& options,
                    std::vector<Diagnostic>* skipped) {
    Corpus corpus;
    corpus.source_path = std::move(source_path);
    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        std::string reason;
        Task task;
        try {
            task = task_from_record(nlohmann::json::parse(line));
            reason = validate_task(task);
            if (reason.empty() && !seen.insert(task.task_id).second) reason = "duplicate task_id " + task.task_id;
        } catch (const nlohmann::json::exception& e) {
            reason = std::string("invalid JSON: ") + e.what();
        } catch (const std::invalid_argument& e) {
            reason = e.what();
        }
        if (reason.empty()) {
            corpus.tasks.push_back(std::move(task));
        } else if (options.strict) {
            throw MalformedRecord(line_no, reason);
        } else if (skipped != nullptr) {
            skipped->push_back(Diagnostic{line_no, reason});
        }
    }
    if (corpus.tasks.empty()) throw Error(ErrorKind::EmptyCorpus, "empty corpus: " + corpus.source_path);
    return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options, std::vector<Diagnostic>* skipped) {
    return parse_corpus(read_file(path), path.string(), options, skipped);
}

void to_json(nlohmann::json& j, const Task& task) {
    j = nlohmann::json{{"task_id", task.task_id},
                       {"prompt", task.prompt},
                       {"entry_point", task.entry_point},
                       {"canonical_solution", task.canonical_solution},
                       {"test", task.test_source}};
}

std::string to_jsonl(const Corpus& corpus) {
    std::string out;
    for (const auto& t : corpus.tasks) {
        out += nlohmann::json(t).dump();
        out += '\n';
    }
    return out;
}

}  // namespace mutabench::corpus

#pragma once

// HumanEval-format corpora: one JSON object per line with the fields
// task_id, prompt, entry_point, canonical_solution and test. Gzip-compressed
// files are detected by their magic bytes.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace mutabench::corpus {

struct Task {
    std::string task_id;
    std::string prompt;
    std::string entry_point;
    std::string canonical_solution;
    std::string test_source;

    friend bool operator==(const Task&, const Task&) = default;

    // prompt ⧺ canonical_solution
    std::string reference_source() const { return prompt + canonical_solution; }
};

struct Corpus {
    std::vector<Task> tasks;
    std::string source_path;

    friend bool operator==(const Corpus&, const Corpus&) = default;

    const Task* find(std::string_view task_id) const;
};

struct Diagnostic {
    std::size_t line = 0;
    std::string reason;
};

struct LoadOptions {
    bool strict = true;  // abort on the first malformed record
};

// Throws Error(FileNotFound), MalformedRecord (strict mode) or
// Error(EmptyCorpus). In non-strict mode rejected lines are appended to
// `skipped` when given.
Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options = {},
                   std::vector<Diagnostic>* skipped = nullptr);

// Same, from text already in memory.
Corpus parse_corpus(std::string_view text, std::string source_path, const LoadOptions& options = {},
                    std::vector<Diagnostic>* skipped = nullptr);

// Empty when the task satisfies the record invariants, else the reason.
std::string validate_task(const Task& task);

std::string to_jsonl(const Corpus& corpus);

// Whole file contents, transparently gunzipped. Throws Error(FileNotFound).
std::string read_file(const std::filesystem::path& path);

void to_json(nlohmann::json& j, const Task& task);

}  // namespace mutabench::corpus

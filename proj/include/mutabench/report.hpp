#pragma once

// Cross-run reports from results files: a pass@k / variation@k table, a CSV
// of the points, and an SVG scatter plot over the feasibility region.

#include <filesystem>
#include <string>
#include <vector>

#include "mutabench/engine.hpp"
#include "mutabench/metrics.hpp"

namespace mutabench::report {

struct ResultsFile {
    std::filesystem::path path;
    engine::RunManifest manifest;
    std::vector<metrics::ProblemOutcome> outcomes;
    metrics::MetricsSummary summary;  // recomputed from the outcome rows
};

// Throws Error(FileNotFound), MalformedRecord, Error(EmptyInput) or Error(MixedK).
ResultsFile load_results(const std::filesystem::path& path);

// Files as given; directories contribute their *.jsonl files, sorted.
// Throws Error(EmptyInput) when nothing is found.
std::vector<std::filesystem::path> collect_inputs(const std::vector<std::filesystem::path>& inputs);

struct Point {
    std::string label;
    std::string backend_id;
    int k = 0;
    int n_problems = 0;
    metrics::Rational pass_at_k;
    metrics::Rational variation_at_k;
    bool variation_undefined = false;
};

// Throws Error(MixedK) unless every file has the same k.
std::vector<Point> points(const std::vector<ResultsFile>& files);

std::string format_table(const std::vector<Point>& points);
std::string format_csv(const std::vector<Point>& points);
std::string render_svg(const std::vector<Point>& points);

}  // namespace mutabench::report

#include "mutabench/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "mutabench/error.hpp"

namespace mutabench::report {

namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int decimals = 4) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

ResultsFile load_results(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::FileNotFound, "cannot open " + path.string());
    ResultsFile r;
    r.path = path;
    bool have_manifest = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (!j.is_object()) throw MalformedRecord(line_no, "not a JSON object");
        std::string kind = j.value("record", "");
        try {
            if (kind == "manifest") {
                r.manifest = j.get<engine::RunManifest>();
                have_manifest = true;
            } else if (kind == "outcome") {
                r.outcomes.push_back(j.get<metrics::ProblemOutcome>());
            }
        } catch (const std::exception& e) {
            throw MalformedRecord(line_no, e.what());
        }
    }
    if (!have_manifest) throw MalformedRecord(1, path.string() + " has no manifest record");
    if (r.outcomes.empty()) throw Error(ErrorKind::EmptyInput, path.string() + " has no outcome records");
    for (const auto& o : r.outcomes) {
        if (o.k != r.manifest.k) {
            throw Error(ErrorKind::MixedK, path.string() + ": outcome " + o.task_id + " has k=" + std::to_string(o.k) +
                                               ", manifest k=" + std::to_string(r.manifest.k));
        }
    }
    r.summary = metrics::summarize(r.outcomes);
    return r;
}

std::vector<fs::path> collect_inputs(const std::vector<fs::path>& inputs) {
    std::vector<fs::path> out;
    for (const auto& p : inputs) {
        std::error_code ec;
        if (fs::is_directory(p, ec)) {
            std::vector<fs::path> found;
            for (const auto& e : fs::directory_iterator(p)) {
                if (e.is_regular_file() && e.path().extension() == ".jsonl") found.push_back(e.path());
            }
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else if (fs::exists(p, ec)) {
            out.push_back(p);
        } else {
            throw Error(ErrorKind::FileNotFound, "no such file or directory: " + p.string());
        }
    }
    if (out.empty()) throw Error(ErrorKind::EmptyInput, "no results files given");
    return out;
}

std::vector<Point> points(const std::vector<ResultsFile>& files) {
    if (files.empty()) throw Error(ErrorKind::EmptyInput, "no results files given");
    std::vector<Point> out;
    for (const auto& f : files) {
        if (f.summary.k != files.front().summary.k) {
            throw Error(ErrorKind::MixedK, "results mix k=" + std::to_string(files.front().summary.k) + " (" +
                                               files.front().path.string() + ") and k=" + std::to_string(f.summary.k) +
                                               " (" + f.path.string() + ")");
        }
        Point p;
        p.label = f.manifest.label.empty() ? f.manifest.backend_id : f.manifest.label;
        p.backend_id = f.manifest.backend_id;
        p.k = f.summary.k;
        p.n_problems = f.summary.n_problems;
        p.pass_at_k = f.summary.pass_at_k;
        p.variation_at_k = f.summary.variation_at_k;
        p.variation_undefined = f.summary.variation_undefined;
        out.push_back(std::move(p));
    }
    return out;
}

std::string format_table(const std::vector<Point>& points) {
    if (points.empty()) return {};
    int k = points.front().k;
    std::string pass_h = "pass@" + std::to_string(k);
    std::string var_h = "variation@" + std::to_string(k);
    std::size_t w = 5;
    for (const auto& p : points) w = std::max(w, p.label.size());
    std::string out;
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%-*s %6s %12s %14s\n", static_cast<int>(w), "Model", "n", pass_h.c_str(),
                  var_h.c_str());
    out += buf;
    out += std::string(w + 1 + 6 + 1 + 12 + 1 + 14, '-') + "\n";
    for (const auto& p : points) {
        std::string var = metrics::format_percent(p.variation_at_k);
        if (p.variation_undefined) var += "*";
        std::snprintf(buf, sizeof(buf), "%-*s %6d %12s %14s\n", static_cast<int>(w), p.label.c_str(), p.n_problems,
                      metrics::format_percent(p.pass_at_k).c_str(), var.c_str());
        out += buf;
    }
    bool any_undefined = std::any_of(points.begin(), points.end(), [](const Point& p) { return p.variation_undefined; });
    if (any_undefined) out += "* no problem solved; variation reported as 0\n";
    return out;
}

std::string format_csv(const std::vector<Point>& points) {
    std::string out = "backend,label,k,n_problems,pass_at_k,variation_at_k,variation_undefined\n";
    for (const auto& p : points) {
        out += csv_field(p.backend_id) + "," + csv_field(p.label) + "," + std::to_string(p.k) + "," +
               std::to_string(p.n_problems) + "," + fixed(p.pass_at_k.value(), 6) + "," +
               fixed(p.variation_at_k.value(), 6) + "," + (p.variation_undefined ? "true" : "false") + "\n";
    }
    return out;
}

std::string render_svg(const std::vector<Point>& points) {
    int k = points.empty() ? 1 : points.front().k;
    metrics::FeasibilityRegion region = metrics::feasibility_region(k);
    constexpr double kLeft = 70, kTop = 30, kSize = 400;
    auto px = [&](double x) { return fixed(kLeft + x * kSize, 2); };
    auto py = [&](double y) { return fixed(kTop + (1 - y) * kSize, 2); };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" viewBox=\"0 0 800 500\" "
         "font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
    s += "<polygon fill=\"#dbe9f6\" stroke=\"#4a7ab5\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < region.boundary.size(); ++i) {
        if (i > 0) s += " ";
        s += px(region.boundary[i].first) + "," + py(region.boundary[i].second);
    }
    s += "\"/>\n";
    // The open edge at pass = 0 is not part of the region.
    s += "<line x1=\"" + px(0) + "\" y1=\"" + py(region.lower.value()) + "\" x2=\"" + px(0) + "\" y2=\"" + py(1) +
         "\" stroke=\"white\" stroke-width=\"2\" stroke-dasharray=\"4 3\"/>\n";
    s += "<circle cx=\"" + px(0) + "\" cy=\"" + py(0) + "\" r=\"3.5\" fill=\"#4a7ab5\"/>\n";
    s += "<line x1=\"" + px(0) + "\" y1=\"" + py(0) + "\" x2=\"" + px(1) + "\" y2=\"" + py(0) +
         "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + px(0) + "\" y1=\"" + py(0) + "\" x2=\"" + px(0) + "\" y2=\"" + py(1) +
         "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 10; t += 2) {
        double v = t / 10.0;
        std::string label = fixed(v, 1);
        s += "<text x=\"" + px(v) + "\" y=\"" + fixed(kTop + kSize + 18, 2) + "\" text-anchor=\"middle\">" + label +
             "</text>\n";
        s += "<text x=\"" + fixed(kLeft - 8, 2) + "\" y=\"" + fixed(kTop + (1 - v) * kSize + 4, 2) +
             "\" text-anchor=\"end\">" + label + "</text>\n";
    }
    s += "<text x=\"" + px(0.5) + "\" y=\"" + fixed(kTop + kSize + 40, 2) + "\" text-anchor=\"middle\">pass@" +
         std::to_string(k) + "</text>\n";
    s += "<text x=\"18\" y=\"" + py(0.5) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " + py(0.5) +
         ")\">variation@" + std::to_string(k) + "</text>\n";
    s += "<text x=\"" + px(1) + "\" y=\"" + fixed(kTop + (1 - region.lower.value()) * kSize + 14, 2) +
         "\" text-anchor=\"end\" fill=\"#4a7ab5\">1/k = " + region.lower.str() + "</text>\n";
    static const char* const kColors[] = {"#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        const char* color = kColors[i % (sizeof(kColors) / sizeof(kColors[0]))];
        double x = p.pass_at_k.value();
        double y = p.variation_at_k.value();
        s += "<circle cx=\"" + px(x) + "\" cy=\"" + py(y) + "\" r=\"5\" fill=\"" + color + "\"/>\n";
        s += "<text x=\"" + fixed(kLeft + kSize + 20, 2) + "\" y=\"" + fixed(kTop + 14 + 18.0 * static_cast<double>(i), 2) +
             "\" fill=\"" + color + "\">" + xml_escape(p.label) + " (" + metrics::format_percent(p.pass_at_k) + ", " +
             metrics::format_percent(p.variation_at_k) + ")</text>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace mutabench::report

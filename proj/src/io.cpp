#include "effectci/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace effectci {

namespace {

char detect_delimiter(const std::string& line) {
    const char candidates[] = {',', '\t', ';'};
    char best = ',';
    std::size_t best_count = 0;
    for (char c : candidates) {
        const std::size_t count =
            static_cast<std::size_t>(std::count(line.begin(), line.end(), c));
        if (count > best_count) {
            best_count = count;
            best = c;
        }
    }
    return best;
}

std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == delim) {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

bool parse_number(const std::string& field, double& out) {
    const char* begin = field.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t') ++end;
    return *end == '\0';
}

}  // namespace

Dataset read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DegenerateDataError("cannot open data file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        // Skip blank lines.
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        lines.push_back(line);
    }
    if (lines.empty()) throw DegenerateDataError("data file is empty: " + path);

    const char delim = detect_delimiter(lines.front());
    std::vector<std::string> first = split_fields(lines.front(), delim);
    const int d = static_cast<int>(first.size());

    bool has_header = false;
    for (const std::string& f : first) {
        double v;
        if (!parse_number(f, v)) {
            has_header = true;
            break;
        }
    }
    std::optional<std::vector<std::string>> names;
    std::size_t start_row = 0;
    if (has_header) {
        names = first;
        start_row = 1;
    }

    const std::size_t n = lines.size() - start_row;
    if (n == 0) throw DegenerateDataError("data file has a header but no rows: " + path);
    Eigen::MatrixXd x(static_cast<int>(n), d);
    for (std::size_t r = 0; r < n; ++r) {
        const std::vector<std::string> fields = split_fields(lines[start_row + r], delim);
        if (static_cast<int>(fields.size()) != d)
            throw DegenerateDataError("row " + std::to_string(r + start_row + 1) + ": expected " +
                                      std::to_string(d) + " fields, got " +
                                      std::to_string(fields.size()));
        for (int c = 0; c < d; ++c) {
            double v;
            if (!parse_number(fields[static_cast<std::size_t>(c)], v))
                throw DegenerateDataError("row " + std::to_string(r + start_row + 1) + ", column " +
                                          std::to_string(c + 1) + ": not a number: '" +
                                          fields[static_cast<std::size_t>(c)] + "'");
            x(static_cast<int>(r), c) = v;
        }
    }
    return Dataset::make(std::move(x), std::move(names));
}

std::string region_to_json(const ConfidenceRegion& region) {
    nlohmann::json j;
    j["intervals"] = nlohmann::json::array();
    for (const auto& iv : region.intervals) j["intervals"].push_back({iv[0], iv[1]});
    j["includes_zero"] = region.includes_zero;
    j["alpha"] = region.alpha;
    j["method"] = method_name(region.method);
    j["diagnostics"] = {{"survivor_count", region.diagnostics.survivor_count},
                        {"evaluations", region.diagnostics.evaluations},
                        {"wall_ms", region.diagnostics.wall_ms}};
    return j.dump(2) + "\n";
}

ConfidenceRegion region_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    ConfidenceRegion region;
    for (const auto& iv : j.at("intervals"))
        region.intervals.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
    region.includes_zero = j.at("includes_zero").get<bool>();
    region.alpha = j.at("alpha").get<double>();
    region.method = method_from_name(j.at("method").get<std::string>());
    const auto& diag = j.at("diagnostics");
    region.diagnostics.survivor_count = diag.at("survivor_count").get<int>();
    region.diagnostics.evaluations = diag.at("evaluations").get<long>();
    region.diagnostics.wall_ms = diag.at("wall_ms").get<double>();
    return region;
}

std::string region_to_text(const ConfidenceRegion& region) {
    std::ostringstream os;
    char buf[128];
    os << "method: " << method_name(region.method) << "\n";
    std::snprintf(buf, sizeof buf, "alpha: %.17g\n", region.alpha);
    os << buf;
    os << "intervals: " << region.intervals.size() << "\n";
    for (const auto& iv : region.intervals) {
        std::snprintf(buf, sizeof buf, "  [%.17g, %.17g]\n", iv[0], iv[1]);
        os << buf;
    }
    os << "includes_zero: " << (region.includes_zero ? "true" : "false") << "\n";
    os << "survivors: " << region.diagnostics.survivor_count << "\n";
    os << "evaluations: " << region.diagnostics.evaluations << "\n";
    std::snprintf(buf, sizeof buf, "wall_ms: %.17g\n", region.diagnostics.wall_ms);
    os << buf;
    return os.str();
}

void set_num_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

}  // namespace effectci

#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crowdbandit/bandit.hpp"
#include "crowdbandit/core.hpp"
#include "crowdbandit/kmeans.hpp"

namespace crowdbandit {

// Number rendering for result files: 6 significant digits for reported
// statistics, 17 for probabilities so replay survives the text round-trip.
inline std::string format_g6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string format_g17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::string_view trim(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t' || text.front() == '\r'))
        text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    return text;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (start <= line.size()) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) comma = line.size();
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

inline double parse_double(std::string_view field, const std::string& where) {
    double value = 0.0;
    const auto result = std::from_chars(field.data(), field.data() + field.size(), value);
    if (result.ec != std::errc{} || result.ptr != field.data() + field.size())
        throw std::runtime_error(where + ": cannot parse number '" + std::string(field) + "'");
    return value;
}

inline int parse_int(std::string_view field, const std::string& where) {
    int value = 0;
    const auto result = std::from_chars(field.data(), field.data() + field.size(), value);
    if (result.ec != std::errc{} || result.ptr != field.data() + field.size())
        throw std::runtime_error(where + ": cannot parse integer '" + std::string(field) + "'");
    return value;
}

// Non-empty, non-comment lines of a file.
inline std::vector<std::string> data_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        const auto trimmed = trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        lines.emplace_back(trimmed);
    }
    return lines;
}

} // namespace detail

// Feature CSV: one row per task, numeric feature columns, final column the
// true label in {-1, +1}.
inline std::pair<FeatureTable, GroundTruth> load_features(const std::string& path, bool has_header) {
    auto lines = detail::data_lines(path);
    if (has_header && !lines.empty()) lines.erase(lines.begin());
    if (lines.empty()) throw std::runtime_error(path + ": no data rows");
    FeatureTable features;
    GroundTruth truth;
    for (std::size_t r = 0; r < lines.size(); ++r) {
        const auto fields = detail::split_fields(lines[r]);
        if (fields.size() < 2)
            throw std::runtime_error(path + ": row " + std::to_string(r + 1) +
                                     " needs at least one feature and a label");
        if (r == 0) {
            features.n_cols = fields.size() - 1;
        } else if (fields.size() - 1 != features.n_cols) {
            throw std::runtime_error(path + ": row " + std::to_string(r + 1) +
                                     " has inconsistent column count");
        }
        for (std::size_t c = 0; c + 1 < fields.size(); ++c)
            features.values.push_back(detail::parse_double(fields[c], path));
        const int label = detail::parse_int(fields.back(), path);
        if (label != -1 && label != +1)
            throw std::runtime_error(path + ": row " + std::to_string(r + 1) +
                                     " label must be -1 or +1, got " + std::to_string(label));
        truth.labels.push_back(label);
    }
    features.n_rows = lines.size();
    return {std::move(features), std::move(truth)};
}

// Truth CSV: one label in {-1, +1} per line.
inline GroundTruth load_truth(const std::string& path) {
    GroundTruth truth;
    for (const auto& line : detail::data_lines(path)) {
        const int label = detail::parse_int(detail::split_fields(line).at(0), path);
        if (label != -1 && label != +1)
            throw std::runtime_error(path + ": truth labels must be -1 or +1, got " +
                                     std::to_string(label));
        truth.labels.push_back(label);
    }
    if (truth.labels.empty()) throw std::runtime_error(path + ": no truth labels");
    return truth;
}

// Context CSV: one integer per line; ids may start at 0 or 1 and must cover
// a contiguous range.
inline ContextAssignment load_context_file(const std::string& path, int n_tasks) {
    std::vector<int> raw;
    for (const auto& line : detail::data_lines(path))
        raw.push_back(detail::parse_int(detail::split_fields(line).at(0), path));
    if (static_cast<int>(raw.size()) != n_tasks)
        throw std::runtime_error(path + ": has " + std::to_string(raw.size()) +
                                 " contexts for " + std::to_string(n_tasks) + " tasks");
    int lowest = raw[0], highest = raw[0];
    for (int v : raw) {
        lowest = std::min(lowest, v);
        highest = std::max(highest, v);
    }
    for (int& v : raw) v -= lowest;
    return ContextAssignment(highest - lowest + 1, std::move(raw));
}

struct LoadedInstance {
    LabelMatrix matrix;
    ContextAssignment contexts;
    GroundTruth truth;
};

// Real-data mode input: a complete N x K matrix over {-1, +1}, the truth
// labels, and optionally a context per task (one context assumed otherwise).
inline LoadedInstance load_label_matrix(const std::string& labels_path,
                                        const std::string& truth_path,
                                        const std::optional<std::string>& context_path) {
    const auto lines = detail::data_lines(labels_path);
    if (lines.empty()) throw std::runtime_error(labels_path + ": no data rows");
    std::vector<int> entries;
    std::size_t n_workers = 0;
    for (std::size_t r = 0; r < lines.size(); ++r) {
        const auto fields = detail::split_fields(lines[r]);
        if (r == 0) n_workers = fields.size();
        if (fields.size() != n_workers)
            throw std::runtime_error(labels_path + ": row " + std::to_string(r + 1) +
                                     " has inconsistent column count");
        for (const auto& field : fields) {
            const int v = detail::parse_int(field, labels_path);
            if (v == 0)
                throw std::runtime_error(labels_path + ": row " + std::to_string(r + 1) +
                                         " contains a missing label (0); this mode needs a "
                                         "completed matrix, run matrix completion first");
            if (v != -1 && v != +1)
                throw std::runtime_error(labels_path + ": row " + std::to_string(r + 1) +
                                         " label must be -1 or +1, got " + std::to_string(v));
            entries.push_back(v);
        }
    }
    const int n_tasks = static_cast<int>(lines.size());
    LabelMatrix matrix(n_tasks, static_cast<int>(n_workers), std::move(entries));
    GroundTruth truth = load_truth(truth_path);
    if (truth.n_tasks() != n_tasks)
        throw std::runtime_error(truth_path + ": has " + std::to_string(truth.n_tasks()) +
                                 " labels for " + std::to_string(n_tasks) + " tasks");
    ContextAssignment contexts =
        context_path ? load_context_file(*context_path, n_tasks)
                     : ContextAssignment(1, std::vector<int>(n_tasks, 0));
    return {std::move(matrix), std::move(contexts), std::move(truth)};
}

inline const char* phase_name(Phase phase) {
    return phase == Phase::Exploration ? "explore" : "adapt";
}

inline void write_event_log(const std::string& path, std::uint64_t seed,
                            std::span<const Event> events) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "# seed=" << seed << "\n";
    out << "step,phase,task,context,worker,probability,label,vote,loss\n";
    for (const Event& ev : events)
        out << ev.step << ',' << phase_name(ev.phase) << ',' << ev.task << ',' << ev.context << ','
            << ev.worker << ',' << format_g17(ev.probability) << ',' << ev.label << ',' << ev.vote
            << ',' << ev.loss << "\n";
}

struct EventLogFile {
    std::uint64_t seed = 0;
    std::vector<Event> events;
};

inline EventLogFile read_event_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    EventLogFile log;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        const auto trimmed = detail::trim(line);
        if (trimmed.empty()) continue;
        if (trimmed.starts_with("# seed=")) {
            log.seed = std::stoull(std::string(trimmed.substr(7)));
            continue;
        }
        if (trimmed.front() == '#') continue;
        if (!header_seen && trimmed.starts_with("step,")) {
            header_seen = true;
            continue;
        }
        const auto fields = detail::split_fields(trimmed);
        if (fields.size() != 9)
            throw std::runtime_error(path + ": malformed event line '" + std::string(trimmed) + "'");
        Event ev;
        ev.step = detail::parse_int(fields[0], path);
        ev.phase = fields[1] == "explore" ? Phase::Exploration : Phase::Adaptive;
        ev.task = detail::parse_int(fields[2], path);
        ev.context = detail::parse_int(fields[3], path);
        ev.worker = detail::parse_int(fields[4], path);
        ev.probability = detail::parse_double(fields[5], path);
        ev.label = detail::parse_int(fields[6], path);
        ev.vote = detail::parse_int(fields[7], path);
        ev.loss = detail::parse_int(fields[8], path);
        log.events.push_back(ev);
    }
    return log;
}

} // namespace crowdbandit

#include "scenetok/metrics.hpp"

#include "scenetok/error.hpp"
#include "scenetok/stats.hpp"

#include <algorithm>
#include <cctype>
#include <cfenv>
#include <cmath>
#include <cstdio>

namespace scenetok {
namespace {

constexpr std::array<Metric, 4> kVG = {Metric::Ac25, Metric::Ac50, Metric::F1_25, Metric::F1_50};
constexpr std::array<Metric, 2> kCap = {Metric::B4_50, Metric::C50};
constexpr std::array<Metric, 3> kQA = {Metric::C, Metric::EM_ScanQA, Metric::EM_SQA3D};

}  // namespace

std::string_view to_string(Metric m) {
    switch (m) {
        case Metric::Ac25: return "Ac25";
        case Metric::Ac50: return "Ac50";
        case Metric::F1_25: return "F1_25";
        case Metric::F1_50: return "F1_50";
        case Metric::B4_50: return "B4_50";
        case Metric::C50: return "C50";
        case Metric::C: return "C";
        case Metric::EM_ScanQA: return "EM_ScanQA";
        case Metric::EM_SQA3D: return "EM_SQA3D";
    }
    return "?";
}

Metric parse_metric(std::string_view name) {
    for (auto m : kAllMetrics) {
        if (to_string(m) == name) return m;
    }
    throw InputError("unknown metric '" + std::string(name) + "'");
}

std::string_view to_string(Task t) {
    switch (t) {
        case Task::All: return "All";
        case Task::VG: return "3DVG";
        case Task::Cap: return "3DCap";
        case Task::QA: return "3DQA";
    }
    return "?";
}

Task parse_task(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "all") return Task::All;
    if (lower == "3dvg") return Task::VG;
    if (lower == "3dcap") return Task::Cap;
    if (lower == "3dqa") return Task::QA;
    throw InputError("unknown task '" + std::string(name) + "' (expected all, 3dvg, 3dcap or 3dqa)");
}

std::span<const Metric> task_members(Task t) {
    switch (t) {
        case Task::All: return kAllMetrics;
        case Task::VG: return kVG;
        case Task::Cap: return kCap;
        case Task::QA: return kQA;
    }
    return {};
}

void ScoreTable::set(Metric m, double value) {
    require(std::isfinite(value) && value >= 0.0,
            "metric " + std::string(to_string(m)) + " must be finite and non-negative");
    values_[m] = value;
}

double ScoreTable::at(Metric m) const {
    auto it = values_.find(m);
    require(it != values_.end(), "missing metric " + std::string(to_string(m)));
    return it->second;
}

ScoreTable ScoreTable::from_row(const std::array<double, 9>& row) {
    ScoreTable t;
    for (std::size_t i = 0; i < kAllMetrics.size(); ++i) t.set(kAllMetrics[i], row[i]);
    return t;
}

double normalized_score(const ScoreTable& scores, const ScoreTable& baseline, Task task) {
    const auto members = task_members(task);
    double sum = 0.0;
    for (auto m : members) {
        const double base = baseline.at(m);
        require(base > 0.0, "baseline for " + std::string(to_string(m)) + " must be positive");
        sum += 100.0 * scores.at(m) / base;
    }
    return sum / static_cast<double>(members.size());
}

double round_one_decimal(double value) {
    const int saved = std::fegetround();
    std::fesetround(FE_TONEAREST);
    const double r = std::nearbyint(value * 10.0) / 10.0;
    std::fesetround(saved);
    return r;
}

std::string format_one_decimal(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", round_one_decimal(value));
    return buf;
}

SeedSummary multi_seed_summary(std::span<const ScoreTable> runs, const ScoreTable& baseline, Task task) {
    require(!runs.empty(), "multi-seed summary needs at least one run");
    SeedSummary out;
    for (const auto& r : runs) out.per_run.push_back(normalized_score(r, baseline, task));
    const auto ms = mean_and_population_std(out.per_run);
    out.mean = ms.mean;
    out.std = ms.std;
    return out;
}

}  // namespace scenetok

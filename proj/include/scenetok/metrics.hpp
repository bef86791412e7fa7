#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scenetok {

// Benchmark metrics: ScanRefer (Ac25, Ac50), Multi3DRefer (F1_25, F1_50),
// Scan2Cap (B4_50, C50), ScanQA (C, EM_ScanQA), SQA3D (EM_SQA3D).
enum class Metric { Ac25, Ac50, F1_25, F1_50, B4_50, C50, C, EM_ScanQA, EM_SQA3D };

inline constexpr std::array<Metric, 9> kAllMetrics = {Metric::Ac25,  Metric::Ac50, Metric::F1_25,
                                                       Metric::F1_50, Metric::B4_50, Metric::C50,
                                                       Metric::C,     Metric::EM_ScanQA, Metric::EM_SQA3D};

std::string_view to_string(Metric m);
Metric parse_metric(std::string_view name);

enum class Task { All, VG, Cap, QA };

std::string_view to_string(Task t);
// Accepts "all", "3dvg", "3dcap", "3dqa" (case-insensitive).
Task parse_task(std::string_view name);
std::span<const Metric> task_members(Task t);

// Named metric values; a metric may be absent (a "-" cell).
class ScoreTable {
public:
    ScoreTable() = default;

    void set(Metric m, double value);
    bool has(Metric m) const { return values_.count(m) != 0; }
    double at(Metric m) const;
    const std::map<Metric, double>& entries() const { return values_; }

    // Values in kAllMetrics order.
    static ScoreTable from_row(const std::array<double, 9>& row);

    bool operator==(const ScoreTable&) const = default;

private:
    std::map<Metric, double> values_;
};

// Mean over the task's metrics of 100 * score / baseline, full precision.
double normalized_score(const ScoreTable& scores, const ScoreTable& baseline, Task task);

// Round half to even at one decimal.
double round_one_decimal(double value);
std::string format_one_decimal(double value);

struct SeedSummary {
    double mean;
    double std;  // population
    std::vector<double> per_run;
};

SeedSummary multi_seed_summary(std::span<const ScoreTable> runs, const ScoreTable& baseline, Task task);

}  // namespace scenetok

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gapbench/sim.hpp"

namespace gapbench {

struct ProcessingStats {
    double mean = 0.0;
    double std = 0.0;  // population
    double max = 0.0;
    double p95 = 0.0;  // nearest rank
};

/// Per-trial metrics. PO, EO and AGV exist for finished trials only.
struct TrialMetrics {
    Outcome outcome = Outcome::Timeout;
    std::optional<double> po;   // percent
    std::optional<double> eo;   // m/s^2
    std::optional<double> agv;  // m/s
    double mp = 0.0;            // percent
    double d_trav = 0.0;
    std::optional<double> d_min;
    double t_trial = 0.0;
};

/// T_finished / T_whole. Throws MetricError on an empty set.
[[nodiscard]] double success_rate(std::span<const Outcome> outcomes);
[[nodiscard]] double success_rate(std::size_t finished, std::size_t whole);

/// (d_trav − d_min) / d_min × 100. Throws MetricError unless d_min > 0.
[[nodiscard]] double path_optimality(double d_trav, double d_min);

/// Σ‖(a_{k+1} − a_k)/Δt_k‖ Δt_k with per-interval Δt. Needs ≥ 3 samples.
[[nodiscard]] double energy_optimality(std::span<const DroneState> states);

/// d_min / t_trial. Throws MetricError unless t_trial > 0.
[[nodiscard]] double average_goal_velocity(double d_min, double t_trial);

/// (1 − |a·c| / |a|²) × 100 with a = goal − start, c = a − (final − start),
/// clamped to [0, 100]. Throws MetricError when start == goal.
[[nodiscard]] double mission_progress(const Vec3& start, const Vec3& goal, const Vec3& final_position);

/// Throws MetricError on an empty set.
[[nodiscard]] ProcessingStats processing_stats(std::span<const double> durations);

/// Success summary of one algorithm's trial set.
struct SuccessSample {
    double sr = 0.0;
    double mean_d_min = 0.0;
    std::size_t trials = 0;  // T_whole, used for clamping
};

/// SR clamped into [1/(2T), 1 − 1/(2T)].
[[nodiscard]] double clamp_success_rate(double sr, std::size_t trials);

/// CF = (d̄_B · ln SR_A) / (d̄_A · ln SR_B). With clamp, both SRs are clamped
/// first; without it an SR of exactly 0 or 1 throws MetricError("degenerate success rate").
[[nodiscard]] double contrast_factor(const SuccessSample& a, const SuccessSample& b, bool clamp = true);

[[nodiscard]] TrialMetrics compute_trial_metrics(const TrialRecord& record);

struct TraversabilityBin {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::size_t> members;  // indices into the input values
    [[nodiscard]] double center() const { return 0.5 * (lo + hi); }
};

struct Binning {
    std::vector<TraversabilityBin> bins;
    std::vector<std::string> warnings;
};

/// Equal-width bins over [min, max] of the values; the maximum falls in the
/// last bin. With fewer distinct values than k, k is reduced to the number of
/// distinct values and a warning is recorded.
[[nodiscard]] Binning bin_by_traversability(std::span<const double> trav, int k);

/// Spearman rank correlation with average ranks for ties. Nullopt when either
/// side is constant or there are fewer than 2 pairs.
[[nodiscard]] std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // population
    std::size_t count = 0;
};
[[nodiscard]] std::optional<MeanStd> mean_std(std::span<const double> values);

}  // namespace gapbench

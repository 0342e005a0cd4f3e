#include "gapbench/perf_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "gapbench/errors.hpp"

namespace gapbench {

double success_rate(std::size_t finished, std::size_t whole) {
    if (whole == 0) throw MetricError("success rate of an empty trial set is undefined");
    if (finished > whole) throw MetricError("more finished trials than trials");
    return static_cast<double>(finished) / static_cast<double>(whole);
}

double success_rate(std::span<const Outcome> outcomes) {
    const auto finished = static_cast<std::size_t>(std::count(outcomes.begin(), outcomes.end(), Outcome::Finished));
    return success_rate(finished, outcomes.size());
}

double path_optimality(double d_trav, double d_min) {
    if (!(d_min > 0.0)) throw MetricError("path optimality needs d_min > 0");
    return (d_trav - d_min) / d_min * 100.0;
}

double energy_optimality(std::span<const DroneState> states) {
    if (states.size() < 3) throw MetricError("energy optimality needs at least 3 samples");
    double eo = 0.0;
    for (std::size_t k = 0; k + 1 < states.size(); ++k) {
        const double dt = states[k + 1].t - states[k].t;
        if (!(dt > 0.0)) throw MetricError("timestamps must be strictly increasing");
        const Vec3 jerk = (states[k + 1].acceleration - states[k].acceleration) / dt;
        eo += jerk.norm() * dt;
    }
    return eo;
}

double average_goal_velocity(double d_min, double t_trial) {
    if (!(t_trial > 0.0)) throw MetricError("average goal velocity needs t_trial > 0");
    return d_min / t_trial;
}

double mission_progress(const Vec3& start, const Vec3& goal, const Vec3& final_position) {
    const Vec3 a = goal - start;
    const double a2 = a.squaredNorm();
    if (!(a2 > 0.0)) throw MetricError("mission progress is undefined when start equals goal");
    const Vec3 c = a - (final_position - start);
    const double mp = (1.0 - std::abs(a.dot(c)) / a2) * 100.0;
    return std::clamp(mp, 0.0, 100.0);
}

ProcessingStats processing_stats(std::span<const double> durations) {
    if (durations.empty()) throw MetricError("processing statistics need at least one command");
    ProcessingStats s;
    const auto ms = mean_std(durations);
    s.mean = ms->mean;
    s.std = ms->std;
    s.max = *std::max_element(durations.begin(), durations.end());
    std::vector<double> sorted(durations.begin(), durations.end());
    std::sort(sorted.begin(), sorted.end());
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(sorted.size())));
    s.p95 = sorted[std::max<std::size_t>(rank, 1) - 1];
    return s;
}

double clamp_success_rate(double sr, std::size_t trials) {
    if (trials == 0) throw MetricError("cannot clamp a success rate over zero trials");
    const double eps = 1.0 / (2.0 * static_cast<double>(trials));
    return std::clamp(sr, eps, 1.0 - eps);
}

double contrast_factor(const SuccessSample& a, const SuccessSample& b, bool clamp) {
    if (!(a.mean_d_min > 0.0) || !(b.mean_d_min > 0.0)) throw MetricError("contrast factor needs positive mean d_min");
    double sr_a = a.sr, sr_b = b.sr;
    if (clamp) {
        sr_a = clamp_success_rate(sr_a, a.trials);
        sr_b = clamp_success_rate(sr_b, b.trials);
    } else if (sr_a <= 0.0 || sr_a >= 1.0 || sr_b <= 0.0 || sr_b >= 1.0) {
        throw MetricError("degenerate success rate");
    }
    return (b.mean_d_min * std::log(sr_a)) / (a.mean_d_min * std::log(sr_b));
}

TrialMetrics compute_trial_metrics(const TrialRecord& record) {
    TrialMetrics m;
    m.outcome = record.outcome;
    m.d_trav = record.d_trav;
    m.d_min = record.d_min;
    m.t_trial = record.t_trial;
    const Vec3 final_position = record.states.empty() ? record.trial.start : record.states.back().position;
    m.mp = mission_progress(record.trial.start, record.trial.goal, final_position);
    if (record.outcome == Outcome::Finished) {
        if (record.d_min && *record.d_min > 0.0) {
            m.po = path_optimality(record.d_trav, *record.d_min);
            m.agv = average_goal_velocity(*record.d_min, record.t_trial);
        }
        if (record.states.size() >= 3) m.eo = energy_optimality(record.states);
    }
    return m;
}

Binning bin_by_traversability(std::span<const double> trav, int k) {
    if (k < 2) throw MetricError("need at least 2 bins");
    Binning out;
    if (trav.empty()) return out;
    const std::set<double> distinct(trav.begin(), trav.end());
    int bins = k;
    if (static_cast<int>(distinct.size()) < k) {
        bins = static_cast<int>(distinct.size());
        out.warnings.push_back(fmt::format("only {} distinct traversability values for {} bins; using {} bins",
                                           distinct.size(), k, bins));
    }
    const double lo = *distinct.begin();
    const double hi = *distinct.rbegin();
    const double width = bins > 1 ? (hi - lo) / bins : 0.0;
    out.bins.resize(static_cast<std::size_t>(bins));
    for (int b = 0; b < bins; ++b) {
        out.bins[static_cast<std::size_t>(b)].lo = lo + b * width;
        out.bins[static_cast<std::size_t>(b)].hi = b + 1 == bins ? hi : lo + (b + 1) * width;
    }
    for (std::size_t i = 0; i < trav.size(); ++i) {
        int b = width > 0.0 ? static_cast<int>(std::floor((trav[i] - lo) / width)) : 0;
        b = std::clamp(b, 0, bins - 1);
        out.bins[static_cast<std::size_t>(b)].members.push_back(i);
    }
    return out;
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t m = i; m <= j; ++m) r[order[m]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) return std::nullopt;
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

std::optional<MeanStd> mean_std(std::span<const double> values) {
    if (values.empty()) return std::nullopt;
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    return MeanStd{mean, std::sqrt(var / n), values.size()};
}

}  // namespace gapbench

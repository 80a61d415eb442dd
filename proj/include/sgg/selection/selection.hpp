#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgg/core/errors.hpp"
#include "sgg/core/types.hpp"

namespace sgg::sel {

// The k highest-score detections, stable order (input assumed post-NMS).
inline std::vector<Detection> topk_proposals(const std::vector<Detection>& dets, int k) {
    if (k < 1) throw ConfigError("topk_proposals: k must be >= 1");
    std::vector<Detection> out = dets;
    std::stable_sort(out.begin(), out.end(),
                     [](const Detection& a, const Detection& b) { return a.score > b.score; });
    if (static_cast<int>(out.size()) > k) out.resize(k);
    return out;
}

// All ordered pairs without self-pairs, lexicographic: exactly n*(n-1).
inline std::vector<std::pair<int, int>> enumerate_pairs(int n) {
    std::vector<std::pair<int, int>> pairs;
    if (n < 0) throw ConfigError("enumerate_pairs: n must be >= 0");
    pairs.reserve(static_cast<std::size_t>(n) * std::max(0, n - 1));
    for (int s = 0; s < n; ++s)
        for (int o = 0; o < n; ++o)
            if (s != o) pairs.emplace_back(s, o);
    return pairs;
}

// Sampled accuracy-vs-budget curve with the selected inference budget x_opt:
// the smallest sampled k whose estimated |f'(k)| falls below epsilon, falling
// back to the training budget theta when no point qualifies.
struct DcsCurve {
    std::vector<int> sampled_k;          // strictly increasing
    std::vector<double> metric_values;   // f(k) per sample
    double epsilon = 1e-5;
    int theta = 100;
    int x_opt = -1;                      // -1 until fitted

    nlohmann::json to_json() const {
        return {{"format", "sgg-lab/1"}, {"kind", "dcs_curve"},
                {"sampled_k", sampled_k}, {"metric_values", metric_values},
                {"epsilon", epsilon},     {"theta", theta},
                {"x_opt", x_opt}};
    }

    static DcsCurve from_json(const nlohmann::json& j) {
        DcsCurve c;
        c.sampled_k = j.at("sampled_k").get<std::vector<int>>();
        c.metric_values = j.at("metric_values").get<std::vector<double>>();
        c.epsilon = j.at("epsilon").get<double>();
        c.theta = j.at("theta").get<int>();
        c.x_opt = j.value("x_opt", -1);
        return c;
    }
};

// Default sampling grid {1, 5, 10, ..., theta}. The smallest meaningful
// budget is 1; k = 0 would make recall undefined.
inline std::vector<int> default_grid(int theta, int step = 5) {
    std::vector<int> ks = {1};
    for (int k = step; k <= theta; k += step) ks.push_back(k);
    if (ks.back() != theta) ks.push_back(theta);
    return ks;
}

// Evaluates the metric once per grid point. Evaluator failures propagate with
// the offending k attached.
inline DcsCurve sample_curve(const std::function<double(int)>& evaluator,
                             const std::vector<int>& ks, double epsilon = 1e-5,
                             int theta = 100) {
    for (std::size_t i = 1; i < ks.size(); ++i)
        if (ks[i] <= ks[i - 1]) throw ConfigError("sample_curve: grid must be strictly increasing");
    DcsCurve curve;
    curve.sampled_k = ks;
    curve.epsilon = epsilon;
    curve.theta = theta;
    for (const int k : ks) {
        try {
            curve.metric_values.push_back(evaluator(k));
        } catch (const std::exception& e) {
            throw DataError("sample_curve: evaluator failed at k=" + std::to_string(k) + ": " +
                            e.what());
        }
    }
    return curve;
}

// Finite-difference slope estimates on the sampled grid: central differences
// in the interior, one-sided at the ends. An optional odd moving-average
// window (<= 1 disables) smooths the values first.
inline std::vector<double> estimate_slopes(const std::vector<int>& ks,
                                           const std::vector<double>& raw,
                                           int smooth_window = 0) {
    const std::size_t n = ks.size();
    std::vector<double> f = raw;
    if (smooth_window > 1) {
        const int half = smooth_window / 2;
        for (std::size_t i = 0; i < n; ++i) {
            double sum = 0.0;
            int count = 0;
            for (int j = -half; j <= half; ++j) {
                const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(i) + j;
                if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(n)) continue;
                sum += raw[static_cast<std::size_t>(idx)];
                ++count;
            }
            f[i] = sum / count;
        }
    }
    std::vector<double> slopes(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == n ? i : i + 1;
        slopes[i] = (f[hi] - f[lo]) / static_cast<double>(ks[hi] - ks[lo]);
    }
    return slopes;
}

// x_opt = min{ x | |f'(x)| < epsilon }, theta if no grid point qualifies.
inline int dcs_fit(DcsCurve& curve, int smooth_window = 0) {
    if (curve.sampled_k.size() < 3) throw ConfigError("dcs_fit: need at least 3 grid points");
    const auto slopes = estimate_slopes(curve.sampled_k, curve.metric_values, smooth_window);
    curve.x_opt = curve.theta;
    for (std::size_t i = 0; i < slopes.size(); ++i) {
        if (std::abs(slopes[i]) < curve.epsilon) {
            curve.x_opt = curve.sampled_k[i];
            break;
        }
    }
    return curve.x_opt;
}

}  // namespace sgg::sel

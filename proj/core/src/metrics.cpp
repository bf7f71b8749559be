#include "synbeats/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace synbeats {

Metrics compute_metrics(std::span<const double> errors, std::span<const double> truths) {
    if (errors.empty()) throw std::invalid_argument("compute_metrics: no errors");
    if (errors.size() != truths.size()) throw std::invalid_argument("compute_metrics: length mismatch");
    Metrics m;
    m.count = errors.size();
    double sq = 0.0;
    double pct = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        sq += errors[i] * errors[i];
        if (truths[i] == 0.0) {
            ++m.zero_truths;
            continue;
        }
        pct += std::abs(errors[i]) / std::abs(truths[i]);
        ++used;
    }
    if (used == 0) throw std::invalid_argument("compute_metrics: MAPE is undefined because every truth is zero");
    m.rmse = std::sqrt(sq / static_cast<double>(errors.size()));
    m.mape = 100.0 * pct / static_cast<double>(used);
    return m;
}

std::vector<double> best_shares(const std::vector<std::vector<double>>& scores) {
    std::vector<double> shares(scores.size(), 0.0);
    if (scores.empty()) return shares;
    const std::size_t iterations = scores.front().size();
    for (const auto& s : scores) {
        if (s.size() != iterations) throw std::invalid_argument("best_shares: ragged score table");
    }
    std::size_t counted = 0;
    for (std::size_t i = 0; i < iterations; ++i) {
        double best = 0.0;
        bool any = false;
        for (const auto& s : scores) {
            if (std::isnan(s[i])) continue;
            if (!any || s[i] < best) best = s[i];
            any = true;
        }
        if (!any) continue;
        ++counted;
        std::size_t tied = 0;
        for (const auto& s : scores) tied += (!std::isnan(s[i]) && s[i] == best) ? 1 : 0;
        for (std::size_t e = 0; e < scores.size(); ++e) {
            if (!std::isnan(scores[e][i]) && scores[e][i] == best) shares[e] += 1.0 / static_cast<double>(tied);
        }
    }
    if (counted > 0) {
        for (auto& s : shares) s /= static_cast<double>(counted);
    }
    return shares;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty input");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

} // namespace synbeats

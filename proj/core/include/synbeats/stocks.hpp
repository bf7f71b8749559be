#pragma once

#include "synbeats/panel.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace synbeats {

struct StockOptions {
    std::size_t events = 100;
    std::size_t peers = 8;      // donor pool size per event, at least 8
    std::size_t pre_days = 250;
    std::size_t post_days = 1;
    std::uint64_t seed = 0;
    double market_vol = 0.01;
    double industry_vol = 0.008;
    double idiosyncratic_vol = 0.015;
};

/**
 * @brief Synthetic daily-return event panels.
 *
 * Each event holds one focal firm and `peers` firms from the same industry.
 * Returns follow r_it = a_i + b_i m_t + c_i g_t + e_it with a market factor m,
 * an industry factor g and independent noise; no effect is added, so the
 * focal firm's post-event returns are its untreated outcomes.
 */
[[nodiscard]] std::vector<Panel> generate_stock_events(const StockOptions& options);

} // namespace synbeats

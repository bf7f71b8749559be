#include "synbeats/stocks.hpp"

#include "synbeats/rng.hpp"

#include <stdexcept>
#include <string>

namespace synbeats {

std::vector<Panel> generate_stock_events(const StockOptions& o) {
    if (o.peers < 8) throw std::invalid_argument("each event needs at least 8 peer firms");
    if (o.pre_days < 3) throw std::invalid_argument("at least 3 pre-event days are required");
    if (o.post_days == 0) throw std::invalid_argument("at least one post-event day is required");
    std::vector<Panel> events;
    events.reserve(o.events);
    const std::size_t days = o.pre_days + o.post_days;
    const std::size_t firms = o.peers + 1;
    for (std::size_t e = 0; e < o.events; ++e) {
        SplitMix64 rng(derive_seed(o.seed, e));
        Eigen::VectorXd market(static_cast<Eigen::Index>(days));
        Eigen::VectorXd industry(static_cast<Eigen::Index>(days));
        for (std::size_t d = 0; d < days; ++d) {
            market(static_cast<Eigen::Index>(d)) = o.market_vol * rng.normal();
            industry(static_cast<Eigen::Index>(d)) = o.industry_vol * rng.normal();
        }
        Eigen::MatrixXd r(static_cast<Eigen::Index>(firms), static_cast<Eigen::Index>(days));
        std::vector<std::string> names;
        for (std::size_t f = 0; f < firms; ++f) {
            names.push_back(f == 0 ? "focal" : "peer" + std::to_string(f));
            const double alpha = 0.0002 * rng.normal();
            const double beta = rng.uniform(0.6, 1.4);
            const double gamma = rng.uniform(0.5, 1.5);
            const double vol = o.idiosyncratic_vol * rng.uniform(0.7, 1.3);
            for (std::size_t d = 0; d < days; ++d) {
                const auto di = static_cast<Eigen::Index>(d);
                r(static_cast<Eigen::Index>(f), di) = alpha + beta * market(di) + gamma * industry(di) + vol * rng.normal();
            }
        }
        std::vector<int> times(days);
        for (std::size_t d = 0; d < days; ++d) times[d] = static_cast<int>(d) - static_cast<int>(o.pre_days);
        events.emplace_back(std::move(names), std::move(times), std::move(r), 0, o.pre_days);
    }
    return events;
}

} // namespace synbeats

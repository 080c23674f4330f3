#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "tcs/sim/types.hpp"

namespace tcs::lab {

// Stable-period performance summary: means over the last `window` days of
// each seed's trace, averaged across seeds. Token price and tariff columns
// are reported as missing for untolled runs.
struct MetricsReport {
    double aitt = 0.0;
    double car_aitt = 0.0;
    double pt_share_pct = 0.0;
    double welfare = 0.0;
    double price = std::numeric_limits<double>::quiet_NaN();
    double toll_m = std::numeric_limits<double>::quiet_NaN();
    double toll_mu = std::numeric_limits<double>::quiet_NaN();
    double toll_sigma = std::numeric_limits<double>::quiet_NaN();
    double net_revenue = 0.0;
    // max-min spread of the daily tariff amplitude inside the window,
    // averaged across seeds; quantifies day-to-day tariff oscillation
    double oscillation = std::numeric_limits<double>::quiet_NaN();
    int window = 6;
    int n_seeds = 0;
};

inline MetricsReport compute_metrics(const std::vector<std::vector<DayOutcome>>& traces,
                                     int window = 6, bool tolled = true) {
    if (traces.empty()) throw std::invalid_argument("no traces to summarize");
    MetricsReport r;
    r.window = window;
    r.n_seeds = static_cast<int>(traces.size());
    double osc_sum = 0.0;
    for (const auto& trace : traces) {
        if (static_cast<int>(trace.size()) < window) {
            throw std::invalid_argument("trace shorter than the metrics window");
        }
        double aitt = 0.0, car = 0.0, pt = 0.0, welfare = 0.0, price = 0.0;
        double m = 0.0, mu = 0.0, sigma = 0.0, revenue = 0.0;
        double m_min = std::numeric_limits<double>::infinity();
        double m_max = -std::numeric_limits<double>::infinity();
        int car_days = 0;
        for (std::size_t d = trace.size() - static_cast<std::size_t>(window);
             d < trace.size(); ++d) {
            const DayOutcome& out = trace[d];
            aitt += out.aitt;
            if (out.car_count > 0) {
                car += out.car_aitt;
                ++car_days;
            }
            pt += out.pt_share;
            welfare += out.welfare_per_capita;
            price += out.price;
            m += out.toll.amplitude;
            mu += out.toll.center;
            sigma += out.toll.width;
            revenue += out.net_revenue;
            m_min = std::min(m_min, out.toll.amplitude);
            m_max = std::max(m_max, out.toll.amplitude);
        }
        const double w = static_cast<double>(window);
        r.aitt += aitt / w;
        r.car_aitt += car_days > 0 ? car / car_days
                                   : std::numeric_limits<double>::quiet_NaN();
        r.pt_share_pct += 100.0 * pt / w;
        r.welfare += welfare / w;
        if (tolled) {
            r.price = (std::isnan(r.price) ? 0.0 : r.price) + price / w;
            r.toll_m = (std::isnan(r.toll_m) ? 0.0 : r.toll_m) + m / w;
            r.toll_mu = (std::isnan(r.toll_mu) ? 0.0 : r.toll_mu) + mu / w;
            r.toll_sigma = (std::isnan(r.toll_sigma) ? 0.0 : r.toll_sigma) + sigma / w;
        }
        r.net_revenue += revenue / w;
        osc_sum += m_max - m_min;
    }
    const double n = static_cast<double>(r.n_seeds);
    r.aitt /= n;
    r.car_aitt /= n;
    r.pt_share_pct /= n;
    r.welfare /= n;
    r.net_revenue /= n;
    if (tolled) {
        r.price /= n;
        r.toll_m /= n;
        r.toll_mu /= n;
        r.toll_sigma /= n;
        r.oscillation = osc_sum / n;
    }
    return r;
}

}  // namespace tcs::lab

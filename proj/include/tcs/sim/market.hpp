#pragma once

#include <algorithm>
#include <vector>

#include "tcs/sim/config.hpp"
#include "tcs/sim/types.hpp"

namespace tcs {

struct Settlement {
    std::vector<Transaction> transactions;
    double net_revenue = 0.0;  // dollars collected minus paid out
};

// Settles every traveler's token trade for the day against the regulator.
// Car travelers trade at their departure minute: a deficit against the tariff
// is bought at the posted price, a surplus left after paying the tariff is
// sold back; either way the account ends the trade empty and resumes
// accruing. Transit riders sell their whole balance at their departure
// minute. Wallets are advanced in place. `day_start_abs` anchors minute-of-day
// times on the absolute clock.
inline Settlement settle_market(const std::vector<Choice>& choices,
                                const std::vector<TravelerProfile>& travelers,
                                const std::vector<double>& toll_by_minute,
                                std::vector<TokenWallet>& wallets,
                                const MarketState& market, double day_start_abs) {
    Settlement s;
    const double fw = market.full_wallet();

    // deterministic order: by trade minute, then traveler id
    std::vector<int> order(travelers.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[static_cast<std::size_t>(i)] = static_cast<int>(i);
    auto trade_minute = [&](int i) {
        const auto& c = choices[static_cast<std::size_t>(i)];
        return c.mode == Mode::kCar ? c.window : travelers[static_cast<std::size_t>(i)].pt_departure;
    };
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const int ma = trade_minute(a);
        const int mb = trade_minute(b);
        return ma != mb ? ma < mb : a < b;
    });

    for (int i : order) {
        const std::size_t idx = static_cast<std::size_t>(i);
        const int minute = trade_minute(i);
        TokenWallet& w = wallets[idx];
        w.advance_to(day_start_abs + minute, market.allocation_rate, fw);
        if (choices[idx].mode == Mode::kCar) {
            const double toll = toll_by_minute[static_cast<std::size_t>(minute)];
            if (w.balance < toll) {
                const double bought = toll - w.balance;
                const double dollars = bought * market.price;
                s.net_revenue += dollars;
                if (bought > 0.0) {
                    s.transactions.push_back(Transaction{
                        i, static_cast<double>(minute), TransactionKind::kBuy, bought, dollars});
                }
            } else {
                const double sold = w.balance - toll;
                const double dollars = sold * market.price;
                s.net_revenue -= dollars;
                if (sold > 0.0) {
                    s.transactions.push_back(Transaction{i, static_cast<double>(minute),
                                                         TransactionKind::kSell, sold,
                                                         -dollars});
                }
            }
        } else {
            const double sold = w.balance;
            const double dollars = sold * market.price;
            s.net_revenue -= dollars;
            if (sold > 0.0) {
                s.transactions.push_back(Transaction{
                    i, static_cast<double>(minute), TransactionKind::kSell, sold, -dollars});
            }
        }
        w.balance = 0.0;  // tariff paid / holdings sold; accrual restarts here
    }
    return s;
}

// Daily price update: one step up when net revenue exceeds the threshold, one
// step down when it falls below the negative threshold, unchanged inside the
// dead band. The price never goes negative.
inline MarketState adjust_price(MarketState market, double net_revenue) {
    if (net_revenue > market.revenue_threshold) {
        market.price += market.price_step;
    } else if (net_revenue < -market.revenue_threshold) {
        market.price = std::max(0.0, market.price - market.price_step);
    }
    market.net_revenue = net_revenue;
    return market;
}

}  // namespace tcs

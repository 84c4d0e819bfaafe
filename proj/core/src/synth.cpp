#include "repurchase/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>

namespace repurchase {

namespace {

constexpr std::uint64_t kItemStream = 0x6974656d73ULL;  // separate stream family for item prices
constexpr double kSecondsPerDay = 86400.0;

Timestamp ymd(int y, unsigned m, unsigned d) {
    return Timestamp{std::chrono::sys_days{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}}};
}

Timestamp at_day(Timestamp start, double days) {
    return start + std::chrono::seconds{static_cast<std::int64_t>(std::floor(days * kSecondsPerDay))};
}

}  // namespace

SynthConfig SynthConfig::defaults() {
    SynthConfig c;
    c.start = ymd(2019, 8, 22);
    c.horizon_days = 397.0;        // through 2020-09-21 inclusive
    c.first_purchase_days = 366.0;  // through 2020-08-21 inclusive
    return c;
}

WindowConfig SynthConfig::default_window() {
    WindowConfig w;
    w.observation_start = ymd(2019, 8, 22);
    w.observation_end = ymd(2020, 8, 22);
    w.forecast_end = ymd(2020, 9, 22);
    return w;
}

void SynthConfig::validate() const {
    if (n_users < 1 || n_items < 1) throw InvalidArgument("synthetic config needs n_users >= 1 and n_items >= 1");
    if (!(mean_items_per_user >= 1.0)) throw InvalidArgument("mean_items_per_user must be >= 1");
    if (!(horizon_days > 0.0)) throw InvalidArgument("horizon_days must be positive");
    if (!(first_purchase_days > 0.0 && first_purchase_days <= horizon_days)) {
        throw InvalidArgument("first_purchase_days must lie in (0, horizon_days]");
    }
    if (!(loyal_fraction >= 0.0 && loyal_fraction <= 1.0)) throw InvalidArgument("loyal_fraction must lie in [0, 1]");
    if (!(loyal_rate >= 0.0) || !(casual_rate >= 0.0) || !(intensity >= 0.0)) {
        throw InvalidArgument("purchase rates and intensity must be non-negative");
    }
    if (!(user_shape > 0.0)) throw InvalidArgument("user_shape must be positive");
}

std::vector<Transaction> gen_synthetic(const SynthConfig& config) {
    config.validate();
    static const std::array<const char*, 4> kPayments{"alipay", "wechat", "card", "cash"};

    std::vector<double> item_price(config.n_items);
    for (std::size_t i = 0; i < config.n_items; ++i) {
        SplitMix64 rng(mix_seed(config.seed ^ kItemStream, i));
        std::normal_distribution<double> log_price(3.0, 0.7);
        item_price[i] = std::exp(log_price(rng));
    }

    std::vector<Transaction> out;
    for (std::size_t u = 0; u < config.n_users; ++u) {
        SplitMix64 rng(mix_seed(config.seed, u));
        const std::string user_id = "u" + std::to_string(u);
        std::gamma_distribution<double> user_gamma(config.user_shape, 1.0 / config.user_shape);
        const double multiplier = user_gamma(rng);

        std::poisson_distribution<int> extra_items(config.mean_items_per_user - 1.0);
        std::size_t n_pairs = 1;
        if (config.mean_items_per_user > 1.0) n_pairs += static_cast<std::size_t>(extra_items(rng));
        n_pairs = std::min(n_pairs, config.n_items);

        // Distinct items by partial Fisher-Yates over the catalogue.
        std::vector<std::size_t> catalogue(config.n_items);
        for (std::size_t i = 0; i < catalogue.size(); ++i) catalogue[i] = i;
        for (std::size_t k = 0; k < n_pairs; ++k) {
            std::swap(catalogue[k], catalogue[k + rng.below(catalogue.size() - k)]);
        }

        for (std::size_t k = 0; k < n_pairs; ++k) {
            const std::size_t item = catalogue[k];
            const bool loyal = rng.uniform() < config.loyal_fraction;
            const double rate = config.intensity * multiplier * (loyal ? config.loyal_rate : config.casual_rate);

            std::vector<double> days{rng.uniform() * config.first_purchase_days};
            if (rate > 0.0) {
                double t = days.front();
                while (true) {
                    t += -std::log(rng.uniform_open()) / rate;
                    if (t >= config.horizon_days) break;
                    days.push_back(t);
                }
            }
            for (double d : days) {
                Transaction tx;
                tx.user_id = user_id;
                tx.item_id = "i" + std::to_string(item);
                tx.timestamp = at_day(config.start, d);
                tx.quantity = 1;
                while (tx.quantity < 10 && rng.uniform() < 0.3) ++tx.quantity;
                std::normal_distribution<double> noise(0.0, 0.1);
                const double amount = item_price[item] * static_cast<double>(tx.quantity) * std::exp(noise(rng));
                tx.amount = std::round(amount * 100.0) / 100.0;
                tx.payment_method = kPayments[rng.below(kPayments.size())];
                out.push_back(std::move(tx));
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Transaction& a, const Transaction& b) {
        return std::tie(a.timestamp, a.user_id, a.item_id) < std::tie(b.timestamp, b.user_id, b.item_id);
    });
    return out;
}

}  // namespace repurchase

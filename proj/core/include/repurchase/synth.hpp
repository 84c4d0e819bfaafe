#pragma once

// Synthetic transaction logs with a latent loyalty structure, standing in for
// proprietary purchase data. Output uses the regular transaction schema.

#include <cstdint>
#include <string>
#include <vector>

#include "repurchase/dataio.hpp"

namespace repurchase {

struct SynthConfig {
    std::size_t n_users = 2000;
    std::size_t n_items = 60;
    double mean_items_per_user = 2.5;  // distinct items a user ever buys (>= 1)
    Timestamp start;                   // first day of the horizon
    double horizon_days = 0.0;         // purchases happen in [start, start + horizon)
    double first_purchase_days = 0.0;  // forced first purchase is uniform over [start, start + this)
    double loyal_fraction = 0.1;       // share of <user,item> pairs that are loyal
    double loyal_rate = 1.0 / 80.0;    // repeat purchases per day for loyal pairs
    double casual_rate = 1.0 / 1500.0;
    double user_shape = 2.0;           // gamma shape of the per-user intensity multiplier (mean 1)
    double intensity = 1.0;            // global multiplier on repeat rates; 0 leaves only first purchases
    std::uint64_t seed = 0;

    /// Horizon 2019-08-22 .. 2020-09-21 with first purchases before 2020-08-22.
    static SynthConfig defaults();
    /// Observation/forecast windows matching defaults().
    static WindowConfig default_window();
    void validate() const;
};

/// Transactions sorted by (timestamp, user, item).
std::vector<Transaction> gen_synthetic(const SynthConfig& config);

}  // namespace repurchase

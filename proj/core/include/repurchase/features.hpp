#pragma once

#include <array>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "repurchase/common.hpp"
#include "repurchase/dataio.hpp"

namespace repurchase {

inline constexpr std::array<const char*, kFeatureCount> kFeatureNames{"R", "F", "M", "S", "T"};

/// RFMST behaviour vector for one <user, item> pair. Durations are in days.
struct FeatureRow {
    std::string user_id;
    std::string item_id;
    double recency = 0.0;       // R: observation_end - last purchase
    std::int64_t frequency = 0;  // F: purchases in the observation window
    double monetary = 0.0;      // M: total amount
    double span = 0.0;          // S: last purchase - first purchase
    double interval = 0.0;      // T: S / F
    int label = 0;

    [[nodiscard]] std::array<double, kFeatureCount> values() const {
        return {recency, static_cast<double>(frequency), monetary, span, interval};
    }

    bool operator==(const FeatureRow&) const = default;
};

FeatureRow compute_rfmst(const LabeledPair& pair, const WindowConfig& window);
std::vector<FeatureRow> compute_features(const std::vector<LabeledPair>& pairs, const WindowConfig& window);

Dataset to_dataset(const std::vector<FeatureRow>& rows);

/// Per-feature z-scoring. Features with zero spread map to 0.
class Standardizer {
public:
    Standardizer() = default;
    Standardizer(std::vector<double> mean, std::vector<double> stddev);

    /// Sample mean and (n-1) standard deviation per column. Needs >= 2 rows.
    static Standardizer fit(const Matrix& x);
    static Standardizer fit(const std::vector<FeatureRow>& rows);

    [[nodiscard]] Matrix transform(const Matrix& x) const;
    [[nodiscard]] Matrix transform(const std::vector<FeatureRow>& rows) const;
    /// Inverse map; zero-spread columns come back as the stored mean.
    [[nodiscard]] Matrix inverse_transform(const Matrix& z) const;

    [[nodiscard]] const std::vector<double>& mean() const noexcept { return mean_; }
    [[nodiscard]] const std::vector<double>& stddev() const noexcept { return stddev_; }

private:
    std::vector<double> mean_;
    std::vector<double> stddev_;
};

void write_feature_csv(std::ostream& out, const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> read_feature_csv(std::istream& in);

}  // namespace repurchase

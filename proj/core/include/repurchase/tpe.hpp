#pragma once

// Sequential model-based hyperparameter search with tree-structured Parzen
// estimators, plus grid and random search baselines.

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "repurchase/common.hpp"

namespace repurchase {

enum class DimensionKind { uniform, log_uniform, integer, categorical };

std::string to_string(DimensionKind kind);

struct Dimension {
    std::string name;
    DimensionKind kind = DimensionKind::uniform;
    double low = 0.0;
    double high = 1.0;
    std::vector<std::string> choices;  // categorical only

    static Dimension uniform(std::string name, double low, double high);
    static Dimension log_uniform(std::string name, double low, double high);
    static Dimension integer(std::string name, std::int64_t low, std::int64_t high);
    static Dimension categorical(std::string name, std::vector<std::string> choices);

    void validate() const;
    /// Encoded value lies in the domain (categorical values are choice indices).
    [[nodiscard]] bool contains(double value) const;
};

/// One assignment per dimension, in SearchSpace order. Integer dimensions
/// hold integral doubles; categorical dimensions hold the choice index.
struct Config {
    std::vector<double> values;
    bool operator==(const Config&) const = default;
};

class SearchSpace {
public:
    SearchSpace() = default;
    explicit SearchSpace(std::vector<Dimension> dims);

    SearchSpace& add(Dimension dim);

    [[nodiscard]] std::size_t size() const noexcept { return dims_.size(); }
    [[nodiscard]] const Dimension& operator[](std::size_t i) const { return dims_[i]; }
    [[nodiscard]] const std::vector<Dimension>& dimensions() const noexcept { return dims_; }
    [[nodiscard]] std::size_t index_of(const std::string& name) const;

    [[nodiscard]] double real(const Config& c, const std::string& name) const;
    [[nodiscard]] std::int64_t integer(const Config& c, const std::string& name) const;
    [[nodiscard]] const std::string& choice(const Config& c, const std::string& name) const;

    [[nodiscard]] bool contains(const Config& c) const;
    /// Independent uniform draw per dimension (log-uniform in log space).
    [[nodiscard]] Config sample_uniform(SplitMix64& rng) const;
    /// Human-readable "name=value" list.
    [[nodiscard]] std::string describe(const Config& c) const;

private:
    std::vector<Dimension> dims_;
};

enum class TrialStatus { ok, failed };

struct Trial {
    std::size_t index = 0;
    Config config;
    double objective = 0.0;  // lower is better; +inf for failed trials
    double wall_time_s = 0.0;
    TrialStatus status = TrialStatus::ok;
};

struct TpeParams {
    double gamma = 0.25;
    std::size_t n_startup = 10;
    std::size_t n_candidates = 24;
    std::size_t max_trials = 30;
    std::uint64_t seed = 0;

    void validate() const;
};

struct ObservationSplit {
    std::vector<Trial> good;  // best max(1, ceil(gamma n)) trials
    std::vector<Trial> bad;
    double threshold = 0.0;  // y*, objective of the first bad trial
};

/// Stable sort by (objective, index), then split at the gamma quantile.
ObservationSplit split_observations(std::span<const Trial> trials, double gamma);

/// Truncated Parzen density over one dimension: an equal-weight Gaussian
/// mixture (observations plus one prior component at the domain centre)
/// for numeric dimensions, or a smoothed histogram for categorical ones.
class ParzenDensity {
public:
    static ParzenDensity fit(std::span<const double> values, const Dimension& dim);

    /// Density for continuous dimensions, probability mass for integer and
    /// categorical ones. Zero outside the domain.
    [[nodiscard]] double pdf(double x) const;
    [[nodiscard]] double sample(SplitMix64& rng) const;

    [[nodiscard]] const std::vector<double>& centers() const noexcept { return centers_; }
    [[nodiscard]] const std::vector<double>& sigmas() const noexcept { return sigmas_; }
    [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }

private:
    [[nodiscard]] double mixture_density(double u) const;
    [[nodiscard]] double mixture_mass(double a, double b) const;
    [[nodiscard]] double sample_mixture(SplitMix64& rng) const;

    Dimension dim_;
    double lo_ = 0.0, hi_ = 1.0;  // mixture support in internal coordinates
    std::vector<double> centers_, sigmas_, masses_;
    std::vector<double> weights_;  // categorical probabilities
};

struct SuggestTrace {
    bool warmup = false;
    std::vector<Config> candidates;
    std::vector<double> log_ratio;  // sum over dimensions of log l(x) - log g(x)
    std::size_t chosen = 0;
};

/// Next configuration to evaluate. Uses uniform sampling until n_startup
/// trials exist, then returns the candidate drawn from l(x) that maximizes
/// l(x) / g(x).
Config suggest(std::span<const Trial> trials, const SearchSpace& space, const TpeParams& params, SplitMix64& rng,
               SuggestTrace* trace = nullptr);

/// Expected improvement in closed form, (gamma + (g / l)(1 - gamma))^-1.
double expected_improvement(double l, double g, double gamma);

using Objective = std::function<double(const Config&)>;

struct TuneResult {
    Trial best;
    std::vector<Trial> history;
};

TuneResult tune(const Objective& objective, const SearchSpace& space, const TpeParams& params);
TuneResult random_search(const Objective& objective, const SearchSpace& space, std::size_t max_trials,
                         std::uint64_t seed);

/// Per-dimension grid values: linspace for numeric dimensions (rounded for
/// integers, geometric for log-uniform), every choice for categoricals.
std::vector<double> grid_values(const Dimension& dim, std::size_t count);

TuneResult grid_search(const Objective& objective, const SearchSpace& space, std::span<const std::size_t> counts,
                       std::size_t max_configs = 10000);

/// {"index":..,"config":{..},"objective":..,"wall_time_s":..,"status":".."}
std::string trial_to_json_line(const Trial& trial, const SearchSpace& space);
void write_history_jsonl(std::ostream& out, std::span<const Trial> history, const SearchSpace& space);

}  // namespace repurchase

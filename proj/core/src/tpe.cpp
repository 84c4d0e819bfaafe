#include "repurchase/tpe.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace repurchase {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

std::string to_string(DimensionKind kind) {
    switch (kind) {
        case DimensionKind::uniform: return "uniform";
        case DimensionKind::log_uniform: return "log_uniform";
        case DimensionKind::integer: return "int";
        case DimensionKind::categorical: return "categorical";
    }
    return "unknown";
}

Dimension Dimension::uniform(std::string name, double low, double high) {
    return {std::move(name), DimensionKind::uniform, low, high, {}};
}

Dimension Dimension::log_uniform(std::string name, double low, double high) {
    return {std::move(name), DimensionKind::log_uniform, low, high, {}};
}

Dimension Dimension::integer(std::string name, std::int64_t low, std::int64_t high) {
    return {std::move(name), DimensionKind::integer, static_cast<double>(low), static_cast<double>(high), {}};
}

Dimension Dimension::categorical(std::string name, std::vector<std::string> choices) {
    Dimension d{std::move(name), DimensionKind::categorical, 0.0, 0.0, std::move(choices)};
    d.high = static_cast<double>(d.choices.size()) - 1.0;
    return d;
}

void Dimension::validate() const {
    if (name.empty()) throw InvalidArgument("dimension needs a name");
    if (kind == DimensionKind::categorical) {
        if (choices.empty()) throw InvalidArgument("categorical dimension '" + name + "' has no choices");
        return;
    }
    if (!(low < high)) throw InvalidArgument("dimension '" + name + "' needs low < high");
    if (kind == DimensionKind::log_uniform && !(low > 0.0)) {
        throw InvalidArgument("log-uniform dimension '" + name + "' needs low > 0");
    }
    if (kind == DimensionKind::integer && (low != std::floor(low) || high != std::floor(high))) {
        throw InvalidArgument("integer dimension '" + name + "' needs integral bounds");
    }
}

bool Dimension::contains(double value) const {
    if (!std::isfinite(value)) return false;
    switch (kind) {
        case DimensionKind::uniform:
        case DimensionKind::log_uniform: return value >= low && value <= high;
        case DimensionKind::integer: return value == std::floor(value) && value >= low && value <= high;
        case DimensionKind::categorical:
            return value == std::floor(value) && value >= 0.0 && value < static_cast<double>(choices.size());
    }
    return false;
}

SearchSpace::SearchSpace(std::vector<Dimension> dims) {
    for (auto& d : dims) add(std::move(d));
}

SearchSpace& SearchSpace::add(Dimension dim) {
    dim.validate();
    for (const auto& d : dims_) {
        if (d.name == dim.name) throw InvalidArgument("duplicate dimension '" + dim.name + "'");
    }
    dims_.push_back(std::move(dim));
    return *this;
}

std::size_t SearchSpace::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (dims_[i].name == name) return i;
    }
    throw InvalidArgument("search space has no dimension '" + name + "'");
}

double SearchSpace::real(const Config& c, const std::string& name) const { return c.values.at(index_of(name)); }

std::int64_t SearchSpace::integer(const Config& c, const std::string& name) const {
    return static_cast<std::int64_t>(std::llround(c.values.at(index_of(name))));
}

const std::string& SearchSpace::choice(const Config& c, const std::string& name) const {
    const std::size_t i = index_of(name);
    const auto& dim = dims_[i];
    if (dim.kind != DimensionKind::categorical) throw InvalidArgument("'" + name + "' is not categorical");
    return dim.choices.at(static_cast<std::size_t>(c.values.at(i)));
}

bool SearchSpace::contains(const Config& c) const {
    if (c.values.size() != dims_.size()) return false;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (!dims_[i].contains(c.values[i])) return false;
    }
    return true;
}

Config SearchSpace::sample_uniform(SplitMix64& rng) const {
    Config c;
    c.values.reserve(dims_.size());
    for (const auto& d : dims_) {
        switch (d.kind) {
            case DimensionKind::uniform: c.values.push_back(std::min(d.high, d.low + rng.uniform() * (d.high - d.low))); break;
            case DimensionKind::log_uniform: {
                const double lo = std::log(d.low), hi = std::log(d.high);
                c.values.push_back(std::clamp(std::exp(lo + rng.uniform() * (hi - lo)), d.low, d.high));
                break;
            }
            case DimensionKind::integer: {
                const auto span = static_cast<std::uint64_t>(d.high - d.low) + 1;
                c.values.push_back(d.low + static_cast<double>(rng.below(span)));
                break;
            }
            case DimensionKind::categorical: c.values.push_back(static_cast<double>(rng.below(d.choices.size()))); break;
        }
    }
    return c;
}

std::string SearchSpace::describe(const Config& c) const {
    std::ostringstream out;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (i) out << ", ";
        out << dims_[i].name << '=';
        switch (dims_[i].kind) {
            case DimensionKind::categorical: out << dims_[i].choices.at(static_cast<std::size_t>(c.values[i])); break;
            case DimensionKind::integer: out << std::llround(c.values[i]); break;
            default: out << c.values[i];
        }
    }
    return out.str();
}

void TpeParams::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("TPE gamma must lie in (0, 1)");
    if (n_startup < 2) throw InvalidArgument("TPE needs n_startup >= 2");
    if (n_candidates < 1) throw InvalidArgument("TPE needs n_candidates >= 1");
    if (max_trials < n_startup) throw InvalidArgument("TPE max_trials must be >= n_startup");
}

ObservationSplit split_observations(std::span<const Trial> trials, double gamma) {
    if (trials.size() < 2) throw InvalidArgument("splitting observations needs at least 2 trials");
    std::vector<Trial> sorted(trials.begin(), trials.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const Trial& a, const Trial& b) {
        if (a.objective != b.objective) return a.objective < b.objective;
        return a.index < b.index;
    });
    std::size_t n_good = std::max<std::size_t>(1, ceil_fraction(gamma, sorted.size()));
    n_good = std::min(n_good, sorted.size() - 1);
    ObservationSplit out;
    out.good.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n_good));
    out.bad.assign(sorted.begin() + static_cast<std::ptrdiff_t>(n_good), sorted.end());
    out.threshold = out.bad.front().objective;
    return out;
}

ParzenDensity ParzenDensity::fit(std::span<const double> values, const Dimension& dim) {
    dim.validate();
    if (values.empty()) throw InvalidArgument("Parzen density needs at least one observation");
    for (double v : values) {
        if (!dim.contains(v)) throw InvalidArgument("observation outside the domain of '" + dim.name + "'");
    }
    ParzenDensity p;
    p.dim_ = dim;
    if (dim.kind == DimensionKind::categorical) {
        const std::size_t k = dim.choices.size();
        std::vector<double> counts(k, 1.0);  // add-one smoothing
        for (double v : values) counts[static_cast<std::size_t>(v)] += 1.0;
        const double total = static_cast<double>(values.size() + k);
        for (auto& c : counts) c /= total;
        p.weights_ = std::move(counts);
        return p;
    }

    switch (dim.kind) {
        case DimensionKind::log_uniform:
            p.lo_ = std::log(dim.low);
            p.hi_ = std::log(dim.high);
            break;
        case DimensionKind::integer:
            p.lo_ = dim.low - 0.5;
            p.hi_ = dim.high + 0.5;
            break;
        default:
            p.lo_ = dim.low;
            p.hi_ = dim.high;
    }
    const double range = p.hi_ - p.lo_;
    const double prior_center = p.lo_ + range / 2.0;
    for (double v : values) p.centers_.push_back(dim.kind == DimensionKind::log_uniform ? std::log(v) : v);
    p.centers_.push_back(prior_center);

    const std::size_t n = values.size();
    const double min_sigma = range / (1.0 + static_cast<double>(n));
    p.sigmas_.resize(p.centers_.size());
    for (std::size_t i = 0; i < n; ++i) {
        double nearest = kInf;
        for (std::size_t j = 0; j < p.centers_.size(); ++j) {
            if (j != i) nearest = std::min(nearest, std::abs(p.centers_[i] - p.centers_[j]));
        }
        p.sigmas_[i] = std::min(range, std::max(min_sigma, nearest));
    }
    p.sigmas_[n] = range;  // broad prior component
    p.masses_.resize(p.centers_.size());
    for (std::size_t i = 0; i < p.centers_.size(); ++i) {
        p.masses_[i] = normal_cdf((p.hi_ - p.centers_[i]) / p.sigmas_[i]) - normal_cdf((p.lo_ - p.centers_[i]) / p.sigmas_[i]);
    }
    return p;
}

double ParzenDensity::mixture_density(double u) const {
    if (u < lo_ || u > hi_) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < centers_.size(); ++i) {
        sum += normal_pdf((u - centers_[i]) / sigmas_[i]) / (sigmas_[i] * masses_[i]);
    }
    return sum / static_cast<double>(centers_.size());
}

double ParzenDensity::mixture_mass(double a, double b) const {
    a = std::max(a, lo_);
    b = std::min(b, hi_);
    if (!(a < b)) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < centers_.size(); ++i) {
        sum += (normal_cdf((b - centers_[i]) / sigmas_[i]) - normal_cdf((a - centers_[i]) / sigmas_[i])) / masses_[i];
    }
    return sum / static_cast<double>(centers_.size());
}

double ParzenDensity::pdf(double x) const {
    switch (dim_.kind) {
        case DimensionKind::categorical: {
            if (!dim_.contains(x)) return 0.0;
            return weights_[static_cast<std::size_t>(x)];
        }
        case DimensionKind::integer:
            if (!dim_.contains(x)) return 0.0;
            return mixture_mass(x - 0.5, x + 0.5);
        case DimensionKind::log_uniform:
            if (!(x >= dim_.low && x <= dim_.high)) return 0.0;
            return mixture_density(std::log(x)) / x;
        case DimensionKind::uniform: return mixture_density(x);
    }
    return 0.0;
}

double ParzenDensity::sample_mixture(SplitMix64& rng) const {
    const std::size_t i = static_cast<std::size_t>(rng.below(centers_.size()));
    std::normal_distribution<double> normal(centers_[i], sigmas_[i]);
    for (int attempt = 0; attempt < 256; ++attempt) {
        const double u = normal(rng);
        if (u >= lo_ && u <= hi_) return u;
    }
    return lo_ + rng.uniform() * (hi_ - lo_);
}

double ParzenDensity::sample(SplitMix64& rng) const {
    switch (dim_.kind) {
        case DimensionKind::categorical: {
            const double u = rng.uniform();
            double acc = 0.0;
            for (std::size_t i = 0; i < weights_.size(); ++i) {
                acc += weights_[i];
                if (u < acc) return static_cast<double>(i);
            }
            return static_cast<double>(weights_.size() - 1);
        }
        case DimensionKind::integer:
            return std::clamp(std::round(sample_mixture(rng)), dim_.low, dim_.high);
        case DimensionKind::log_uniform:
            return std::clamp(std::exp(sample_mixture(rng)), dim_.low, dim_.high);
        case DimensionKind::uniform: return sample_mixture(rng);
    }
    return 0.0;
}

double expected_improvement(double l, double g, double gamma) { return 1.0 / (gamma + (g / l) * (1.0 - gamma)); }

Config suggest(std::span<const Trial> trials, const SearchSpace& space, const TpeParams& params, SplitMix64& rng,
               SuggestTrace* trace) {
    if (trials.size() < params.n_startup) {
        Config c = space.sample_uniform(rng);
        if (trace) {
            *trace = SuggestTrace{};
            trace->warmup = true;
            trace->candidates = {c};
            trace->log_ratio = {0.0};
        }
        return c;
    }
    const ObservationSplit split = split_observations(trials, params.gamma);
    std::vector<ParzenDensity> good, bad;
    for (std::size_t d = 0; d < space.size(); ++d) {
        std::vector<double> gv, bv;
        for (const auto& t : split.good) gv.push_back(t.config.values[d]);
        for (const auto& t : split.bad) bv.push_back(t.config.values[d]);
        good.push_back(ParzenDensity::fit(gv, space[d]));
        bad.push_back(ParzenDensity::fit(bv, space[d]));
    }

    std::vector<Config> candidates(params.n_candidates);
    std::vector<double> scores(params.n_candidates, 0.0);
    std::size_t chosen = 0;
    for (std::size_t c = 0; c < params.n_candidates; ++c) {
        auto& cand = candidates[c];
        cand.values.resize(space.size());
        for (std::size_t d = 0; d < space.size(); ++d) cand.values[d] = good[d].sample(rng);
        double score = 0.0;
        for (std::size_t d = 0; d < space.size(); ++d) {
            const double l = good[d].pdf(cand.values[d]);
            const double g = bad[d].pdf(cand.values[d]);
            if (g <= 0.0) {
                score = kInf;  // g vanishes: ratio is unbounded
                break;
            }
            score += (l > 0.0 ? std::log(l) : -kInf) - std::log(g);
        }
        scores[c] = score;
        if (c > 0 && scores[c] > scores[chosen]) chosen = c;
    }
    if (trace) {
        trace->warmup = false;
        trace->candidates = candidates;
        trace->log_ratio = scores;
        trace->chosen = chosen;
    }
    return candidates[chosen];
}

namespace {

Trial run_trial(const Objective& objective, const Config& config, std::size_t index) {
    Trial t;
    t.index = index;
    t.config = config;
    const auto start = std::chrono::steady_clock::now();
    try {
        t.objective = objective(config);
        if (std::isnan(t.objective)) throw Error("objective returned NaN");
    } catch (const std::exception&) {
        t.objective = kInf;
        t.status = TrialStatus::failed;
    }
    t.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return t;
}

TuneResult finish(std::vector<Trial> history) {
    TuneResult r;
    r.best = history.front();
    for (const auto& t : history) {
        if (t.objective < r.best.objective) r.best = t;
    }
    r.history = std::move(history);
    return r;
}

}  // namespace

TuneResult tune(const Objective& objective, const SearchSpace& space, const TpeParams& params) {
    params.validate();
    std::vector<Trial> history;
    history.reserve(params.max_trials);
    for (std::size_t i = 0; i < params.max_trials; ++i) {
        SplitMix64 rng(mix_seed(params.seed, i));
        const Config config = suggest(history, space, params, rng);
        history.push_back(run_trial(objective, config, i));
    }
    return finish(std::move(history));
}

TuneResult random_search(const Objective& objective, const SearchSpace& space, std::size_t max_trials,
                         std::uint64_t seed) {
    if (max_trials < 1) throw InvalidArgument("random search needs max_trials >= 1");
    std::vector<Trial> history;
    history.reserve(max_trials);
    for (std::size_t i = 0; i < max_trials; ++i) {
        SplitMix64 rng(mix_seed(seed, i));
        history.push_back(run_trial(objective, space.sample_uniform(rng), i));
    }
    return finish(std::move(history));
}

std::vector<double> grid_values(const Dimension& dim, std::size_t count) {
    dim.validate();
    std::vector<double> values;
    if (dim.kind == DimensionKind::categorical) {
        for (std::size_t i = 0; i < dim.choices.size(); ++i) values.push_back(static_cast<double>(i));
        return values;
    }
    if (count == 0) throw InvalidArgument("grid count for '" + dim.name + "' must be >= 1");
    const bool log_scale = dim.kind == DimensionKind::log_uniform;
    const double lo = log_scale ? std::log(dim.low) : dim.low;
    const double hi = log_scale ? std::log(dim.high) : dim.high;
    for (std::size_t i = 0; i < count; ++i) {
        double v = count == 1 ? lo + (hi - lo) / 2.0
                              : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
        if (log_scale) v = std::clamp(std::exp(v), dim.low, dim.high);
        if (dim.kind == DimensionKind::integer) v = std::round(v);
        values.push_back(v);
    }
    return values;
}

TuneResult grid_search(const Objective& objective, const SearchSpace& space, std::span<const std::size_t> counts,
                       std::size_t max_configs) {
    if (counts.size() != space.size()) throw InvalidArgument("grid needs one count per dimension");
    std::vector<std::vector<double>> axes;
    std::size_t total = 1;
    for (std::size_t d = 0; d < space.size(); ++d) {
        axes.push_back(grid_values(space[d], counts[d]));
        total *= axes.back().size();
    }
    if (total > max_configs) {
        throw InvalidArgument("grid of " + std::to_string(total) + " configurations exceeds the cap of " +
                              std::to_string(max_configs) + "; raise max_configs explicitly");
    }
    std::vector<Trial> history;
    history.reserve(total);
    std::vector<std::size_t> pos(space.size(), 0);
    for (std::size_t k = 0; k < total; ++k) {
        Config c;
        for (std::size_t d = 0; d < space.size(); ++d) c.values.push_back(axes[d][pos[d]]);
        history.push_back(run_trial(objective, c, k));
        // Odometer increment, last dimension fastest.
        for (std::size_t d = space.size(); d-- > 0;) {
            if (++pos[d] < axes[d].size()) break;
            pos[d] = 0;
        }
    }
    return finish(std::move(history));
}

std::string trial_to_json_line(const Trial& trial, const SearchSpace& space) {
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (std::size_t d = 0; d < space.size(); ++d) {
        const auto& dim = space[d];
        const double v = trial.config.values[d];
        switch (dim.kind) {
            case DimensionKind::categorical: config[dim.name] = dim.choices.at(static_cast<std::size_t>(v)); break;
            case DimensionKind::integer: config[dim.name] = std::llround(v); break;
            default: config[dim.name] = v;
        }
    }
    nlohmann::ordered_json j;
    j["index"] = trial.index;
    j["config"] = config;
    if (std::isfinite(trial.objective)) {
        j["objective"] = trial.objective;
    } else {
        j["objective"] = nullptr;
    }
    j["wall_time_s"] = trial.wall_time_s;
    j["status"] = trial.status == TrialStatus::ok ? "ok" : "failed";
    return j.dump();
}

void write_history_jsonl(std::ostream& out, std::span<const Trial> history, const SearchSpace& space) {
    for (const auto& t : history) out << trial_to_json_line(t, space) << '\n';
}

}  // namespace repurchase

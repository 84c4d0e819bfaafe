// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "repurchase/cart.hpp"
#include "repurchase/ensemble.hpp"
#include "repurchase/features.hpp"
#include "repurchase/gbdt.hpp"
#include "repurchase/metrics.hpp"
#include "repurchase/pipeline.hpp"
#include "repurchase/resample.hpp"
#include "repurchase/synth.hpp"
#include "repurchase/tpe.hpp"
#include "test_data.hpp"

using namespace repurchase;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

std::vector<FeatureRow> synthetic_rows(std::size_t n_users, std::uint64_t seed) {
    auto c = SynthConfig::defaults();
    c.n_users = n_users;
    c.seed = seed;
    const auto window = SynthConfig::default_window();
    const auto split = split_windows(gen_synthetic(c), window);
    return compute_features(label_pairs(split.observation, split.forecast), window);
}

// ---------------------------------------------------------------------------

// Exhaustive scan with the same arithmetic as the weighted child impurity:
// (n_l * H(l) + n_r * H(r)) / n. First strict minimum wins, so ties resolve
// to the lowest feature, then the lowest threshold.
std::optional<SplitCandidate> exhaustive_split(const Dataset& d, Criterion crit) {
    auto H = [crit](double a, double b) {
        const double n = a + b;
        if (crit == Criterion::gini) return 1.0 - ((a / n) * (a / n) + (b / n) * (b / n));
        double h = 0.0;
        if (a > 0) h -= (a / n) * std::log2(a / n);
        if (b > 0) h -= (b / n) * std::log2(b / n);
        return h;
    };
    const double n = static_cast<double>(d.size());
    const double pos = static_cast<double>(d.count_label(1));
    std::optional<SplitCandidate> best;
    for (std::size_t f = 0; f < d.x.cols(); ++f) {
        std::set<double> values;
        for (std::size_t i = 0; i < d.size(); ++i) values.insert(d.x(i, f));
        for (auto it = values.begin(); std::next(it) != values.end(); ++it) {
            const double lo = *it, hi = *std::next(it);
            double thr = (lo + hi) / 2.0;
            if (!(thr < hi)) thr = lo;
            double l0 = 0, l1 = 0;
            for (std::size_t i = 0; i < d.size(); ++i) {
                if (d.x(i, f) <= thr) (d.y[i] ? l1 : l0) += 1;
            }
            const double nl = l0 + l1, nr = n - nl;
            const double g = (nl * H(l0, l1) + nr * H(n - pos - l0, pos - l1)) / n;
            if (!best || g < best->impurity) best = SplitCandidate{f, thr, g};
        }
    }
    if (best && best->impurity < H(n - pos, pos)) return best;
    return std::nullopt;
}

Outcome cart_oracle() {
    const auto t0 = Clock::now();
    std::size_t matched = 0, total = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        std::mt19937_64 rng(s);
        const std::size_t n = 20 + rng() % 181;
        // Half the datasets sit on a coarse lattice so value and impurity ties occur.
        const Dataset d = s % 2 ? fixtures::lattice_dataset(n, s) : fixtures::gaussian_blobs(n - n / 3, n / 3, 0.7, s);
        for (auto crit : {Criterion::gini, Criterion::entropy}) {
            TreeParams p;
            p.criterion = crit;
            const auto got = best_split(d, p);
            const auto want = exhaustive_split(d, crit);
            ++total;
            const bool same = got.has_value() == want.has_value() &&
                              (!got || (got->feature == want->feature && got->threshold == want->threshold &&
                                        got->impurity == want->impurity));
            matched += same ? 1 : 0;
        }
    }
    const double t = seconds_since(t0);
    return {matched == total && t < 30.0, fmt("%zu/%zu exact matches in %.2fs", matched, total, t)};
}

Outcome gradient_check() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> score(-8, 8);
    double worst = 0.0;
    const double eps = 1e-5;
    for (int i = 0; i < 100; ++i) {
        const int y = static_cast<int>(rng() % 2);
        const double s = score(rng);
        const auto gh = grad_hess(y, s);
        const double fd_g = (logistic_loss(y, s + eps) - logistic_loss(y, s - eps)) / (2 * eps);
        const double fd_h = (grad_hess(y, s + eps).g - grad_hess(y, s - eps).g) / (2 * eps);
        worst = std::max({worst, std::abs(gh.g - fd_g), std::abs(gh.h - fd_h)});
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-6 && t < 1.0, fmt("max |analytic - finite difference| = %.2e in %.3fs", worst, t)};
}

Outcome leaf_weight_optimality() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> G(-100, 100), H(0, 100), L(0.01, 10);
    int ok = 0;
    for (int i = 0; i < 100; ++i) {
        const double g = G(rng), h = H(rng), lambda = L(rng);
        const double w = leaf_weight(g, h, lambda);
        // Per-leaf objective evaluated independently of the library.
        auto obj = [&](double x) { return g * x + 0.5 * (h + lambda) * x * x; };
        ok += (obj(w) < obj(w + 1e-3) && obj(w) < obj(w - 1e-3)) ? 1 : 0;
    }
    const double t = seconds_since(t0);
    return {ok == 100 && t < 1.0, fmt("%d/100 strictly optimal in %.3fs", ok, t)};
}

Outcome goss_unbiased() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(4);
    std::normal_distribution<double> score(-1.0, 1.0);
    std::bernoulli_distribution label(0.1);
    std::vector<double> g(10000), abs_g(10000);
    double full = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = 1.0 / (1.0 + std::exp(-score(rng))) - (label(rng) ? 1.0 : 0.0);
        abs_g[i] = std::abs(g[i]);
        full += g[i];
    }
    const GossParams params{0.2, 0.1};
    double mean_estimate = 0.0;
    for (std::uint64_t r = 0; r < 1000; ++r) {
        const auto s = goss_sample(abs_g, params, r);
        double est = 0.0;
        for (std::size_t k = 0; k < s.indices.size(); ++k) est += s.weights[k] * g[s.indices[k]];
        mean_estimate += est / 1000.0;
    }
    const double rel = std::abs(mean_estimate - full) / std::abs(full);
    const double t = seconds_since(t0);
    return {rel <= 0.02 && t < 5.0,
            fmt("full sum %.3f, mean estimate %.3f, relative error %.4f in %.2fs", full, mean_estimate, rel, t)};
}

Outcome goss_degenerate() {
    const auto d = fixtures::gaussian_blobs(600, 400, 0.8, 5);
    BoostParams full;
    full.n_trees = 30;
    full.max_leaves = 15;
    full.max_depth = -1;
    BoostParams goss = full;
    goss.goss = GossParams{0.9999, 0.0001};  // ceil(0.9999 * 1000) = 1000
    const auto a = fit_boosted(d, full);
    const auto b = fit_boosted(d, goss);
    std::size_t same = 0;
    for (std::size_t i = 0; i < d.size(); ++i) same += a.predict_positive(d.x.row(i)) == b.predict_positive(d.x.row(i));
    return {same == d.size(), fmt("%zu/%zu identical predictions", same, d.size())};
}

Outcome smote_geometry() {
    const auto t0 = Clock::now();
    const auto blobs = fixtures::gaussian_blobs(400, 60, 1.5, 6);
    Matrix minority;
    for (std::size_t i = 0; i < blobs.size(); ++i) {
        if (blobs.y[i] == 1) minority.push_row(blobs.x.row(i));
    }
    SmoteParams sp;
    sp.seed = 6;
    const auto out = smote_generate(minority, sp, 1000);
    std::size_t convex = 0, neighbour_ok = 0;
    for (std::size_t s = 0; s < out.points.rows(); ++s) {
        const auto& o = out.origins[s];
        bool inside = true;
        for (std::size_t j = 0; j < minority.cols(); ++j) {
            const double a = minority(o.base, j), b = minority(o.neighbor, j), y = out.points(s, j);
            inside &= y >= std::min(a, b) && y <= std::max(a, b);
        }
        convex += inside;
        // Neighbour must be among the base's k nearest minority rows (ties by index).
        std::vector<std::pair<double, std::size_t>> dist;
        for (std::size_t r = 0; r < minority.rows(); ++r) {
            if (r != o.base) dist.push_back({squared_distance(minority.row(o.base), minority.row(r)), r});
        }
        std::sort(dist.begin(), dist.end());
        for (std::size_t k = 0; k < sp.k_neighbors; ++k) neighbour_ok += dist[k].second == o.neighbor;
    }

    // ENN on the combined set against a brute-force k = 5 majority vote.
    Dataset combined = blobs;
    for (std::size_t s = 0; s < out.points.rows(); ++s) combined.push_back(out.points.row(s), 1);
    const auto rejected = enn_rejected(combined, EnnParams{5});
    const std::set<std::size_t> removed(rejected.begin(), rejected.end());
    std::size_t agree = 0;
    for (std::size_t i = 0; i < combined.size(); ++i) {
        std::vector<std::pair<double, std::size_t>> dist;
        for (std::size_t r = 0; r < combined.size(); ++r) {
            if (r != i) dist.push_back({squared_distance(combined.x.row(i), combined.x.row(r)), r});
        }
        std::partial_sort(dist.begin(), dist.begin() + 5, dist.end());
        int same_label = 0;
        for (std::size_t k = 0; k < 5; ++k) same_label += combined.y[dist[k].second] == combined.y[i];
        const bool fails_majority = same_label < 3;
        agree += fails_majority == (removed.count(i) > 0);
    }
    const double t = seconds_since(t0);
    const bool pass = out.points.rows() == 1000 && convex == 1000 && neighbour_ok == 1000 &&
                      agree == combined.size() && !removed.empty() && t < 10.0;
    return {pass, fmt("count %zu, convex %zu/1000, neighbours %zu/1000, ENN verdicts %zu/%zu (%zu removed) in %.2fs",
                      out.points.rows(), convex, neighbour_ok, agree, combined.size(), removed.size(), t)};
}

double simpson(const std::function<double(double)>& f, double lo, double hi, std::size_t steps = 20000) {
    const double h = (hi - lo) / static_cast<double>(steps);
    double sum = f(lo) + f(hi);
    for (std::size_t i = 1; i < steps; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(lo + h * static_cast<double>(i));
    return sum * h / 3.0;
}

Outcome tpe_machinery() {
    // (a) densities integrate to one.
    double worst_mass = 0.0;
    SplitMix64 rng(7);
    for (int r = 0; r < 20; ++r) {
        std::vector<double> obs(1 + rng.below(15));
        const auto u = Dimension::uniform("x", -3, 4);
        for (auto& v : obs) v = -3 + 7 * rng.uniform();
        const auto pu = ParzenDensity::fit(obs, u);
        worst_mass = std::max(worst_mass, std::abs(simpson([&](double x) { return pu.pdf(x); }, -3, 4) - 1.0));
        const auto l = Dimension::log_uniform("lr", 0.01, 0.5);
        for (auto& v : obs) v = std::exp(std::log(0.01) + rng.uniform() * std::log(50.0));
        const auto pl = ParzenDensity::fit(obs, l);
        const double mass = simpson(
            [&](double z) {
                const double x = std::clamp(std::exp(z), 0.01, 0.5);
                return pl.pdf(x) * x;
            },
            std::log(0.01), std::log(0.5));
        worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
    }

    // (b) the chosen candidate maximizes l/g under independent re-scoring.
    const auto space = forest_search_space();
    const TpeParams params;
    int argmax_ok = 0;
    for (std::uint64_t r = 0; r < 100; ++r) {
        SplitMix64 hist_rng(100 + r);
        std::vector<Trial> history;
        for (std::size_t i = 0; i < 10 + r % 20; ++i) {
            Trial t;
            t.index = i;
            t.config = space.sample_uniform(hist_rng);
            t.objective = std::abs(t.config.values[0] - 200) / 500.0 + 0.05 * t.config.values[2] + 0.3 * hist_rng.uniform();
            history.push_back(t);
        }
        SuggestTrace trace;
        const auto chosen = suggest(history, space, params, hist_rng, &trace);
        const auto split = split_observations(history, params.gamma);
        std::vector<ParzenDensity> good, bad;
        for (std::size_t d = 0; d < space.size(); ++d) {
            std::vector<double> gv, bv;
            for (const auto& t : split.good) gv.push_back(t.config.values[d]);
            for (const auto& t : split.bad) bv.push_back(t.config.values[d]);
            good.push_back(ParzenDensity::fit(gv, space[d]));
            bad.push_back(ParzenDensity::fit(bv, space[d]));
        }
        double best = -1.0;
        std::size_t best_idx = 0;
        for (std::size_t c = 0; c < trace.candidates.size(); ++c) {
            double ratio = 1.0;
            for (std::size_t d = 0; d < space.size(); ++d) {
                ratio *= good[d].pdf(trace.candidates[c].values[d]) / bad[d].pdf(trace.candidates[c].values[d]);
            }
            if (ratio > best * (1.0 + 1e-9)) {
                best = ratio;
                best_idx = c;
            }
        }
        argmax_ok += (!trace.warmup && trace.chosen == best_idx && chosen == trace.candidates[best_idx]) ? 1 : 0;
    }

    // (c) observation split sizes.
    int counts_ok = 0;
    for (std::size_t n = 2; n <= 100; ++n) {
        std::vector<Trial> trials(n);
        for (std::size_t i = 0; i < n; ++i) {
            trials[i].index = i;
            trials[i].objective = static_cast<double>((i * 37) % 11);
        }
        const auto s = split_observations(trials, 0.25);
        counts_ok += s.good.size() == static_cast<std::size_t>(std::ceil(0.25 * static_cast<double>(n))) &&
                     s.good.size() + s.bad.size() == n;
    }
    return {worst_mass <= 0.01 && argmax_ok == 100 && counts_ok == 99,
            fmt("max |mass - 1| = %.2e; argmax %d/100; split counts %d/99", worst_mass, argmax_ok, counts_ok)};
}

Outcome tpe_vs_random() {
    auto rows = synthetic_rows(800, 8);
    rows.resize(std::min<std::size_t>(rows.size(), 2000));
    const auto [tr, va] = train_valid_split(rows, 0.8, 8);
    SmoteParams sp;
    sp.seed = 8;
    const Dataset train = smote_enn_standardized(to_dataset(tr), sp, EnnParams{}).data;
    const Dataset valid = to_dataset(va);
    const auto setup = ModelSetup::defaults(ModelKind::forest);

    int wins_or_ties = 0;
    double tpe_time = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const std::uint64_t fit_seed = mix_seed(s, 1);
        const Objective objective = [&](const Config& c) {
            return validation_objective(setup, train, valid, c, fit_seed);
        };
        TpeParams tp;
        tp.max_trials = 30;
        tp.seed = mix_seed(s, 2);
        const auto t0 = Clock::now();
        const auto tpe = tune(objective, setup.space, tp);
        tpe_time += seconds_since(t0);
        const auto rnd = random_search(objective, setup.space, 30, mix_seed(s, 3));
        wins_or_ties += tpe.best.objective <= rnd.best.objective ? 1 : 0;
    }
    tpe_time /= 20.0;

    const Objective grid_objective = [&](const Config& c) {
        return validation_objective(setup, train, valid, c, mix_seed(0, 1));
    };
    const auto t0 = Clock::now();
    const auto grid = grid_search(grid_objective, setup.space, setup.grid_counts);
    const double grid_time = seconds_since(t0);
    const bool pass = wins_or_ties >= 12 && grid.history.size() == 1600 && tpe_time < 0.1 * grid_time;
    return {pass, fmt("TPE wins or ties %d/20 on %zu rows; mean TPE 30 trials %.1fs vs %zu-point grid %.1fs (%.1f%%)",
                      wins_or_ties, rows.size(), tpe_time, grid.history.size(), grid_time,
                      100.0 * tpe_time / grid_time)};
}

struct BenchmarkResults {
    std::vector<double> raw_f1, balanced_f1, goss_f1, ensemble_f1;
    double worst_vote_gap = 0.0;
    std::size_t rows = 0, positives = 0;
};

// Balancing and voting share one benchmark: ~20,000 pair rows per seed,
// 64/16/20 train/validation/test. The boosted member is tuned by TPE on the
// validation split; the forest uses the default configuration.
const BenchmarkResults& benchmark_results() {
    static const BenchmarkResults results = [] {
        BenchmarkResults r;
        for (std::uint64_t s = 0; s < 10; ++s) {
            const auto rows = synthetic_rows(8000, mix_seed(900 + s, 1));
            r.rows += rows.size();
            for (const auto& row : rows) r.positives += static_cast<std::size_t>(row.label);
            const auto [fit_rows, test_rows] = train_valid_split(rows, 0.8, mix_seed(s, 2));
            const auto [train_rows, valid_rows] = train_valid_split(fit_rows, 0.8, mix_seed(s, 3));
            const Dataset train = to_dataset(train_rows), valid = to_dataset(valid_rows), test = to_dataset(test_rows);
            SmoteParams sp;
            sp.seed = mix_seed(s, 4);
            const Dataset balanced = smote_enn_standardized(train, sp, EnnParams{}).data;

            ForestParams fp = default_forest_params();
            fp.seed = mix_seed(s, 5);
            const Forest raw = fit_forest(train, fp);
            const auto forest = std::make_shared<Forest>(fit_forest(balanced, fp));

            const auto goss_setup = ModelSetup::defaults(ModelKind::gbdt_goss);
            TpeParams tp;
            tp.max_trials = 20;
            tp.seed = mix_seed(s, 6);
            const auto tuned = tune(
                [&](const Config& c) { return validation_objective(goss_setup, balanced, valid, c, mix_seed(s, 7)); },
                goss_setup.space, tp);
            const auto goss = goss_setup.fit(balanced, tuned.best.config, mix_seed(s, 7));
            const VotingEnsemble ensemble({{"forest", forest}, {"gbdt_goss", goss}});

            for (std::size_t i = 0; i < test.size(); ++i) {
                const auto row = test.x.row(i);
                const double mean = (forest->predict_positive(row) + goss->predict_positive(row)) / 2.0;
                r.worst_vote_gap = std::max(r.worst_vote_gap, std::abs(ensemble.soft_vote(row) - mean));
            }
            r.raw_f1.push_back(evaluate(raw, test).f1);
            r.balanced_f1.push_back(evaluate(*forest, test).f1);
            r.goss_f1.push_back(evaluate(*goss, test).f1);
            r.ensemble_f1.push_back(evaluate(ensemble, test).f1);
        }
        return r;
    }();
    return results;
}

Outcome balancing_benefit() {
    const auto& r = benchmark_results();
    const double raw = median(r.raw_f1), bal = median(r.balanced_f1);
    return {bal - raw >= 0.05,
            fmt("median F1 raw %.3f vs balanced %.3f (gain %+.3f); %.0f rows/seed, %.1f%% positive", raw, bal,
                bal - raw, static_cast<double>(r.rows) / 10.0,
                100.0 * static_cast<double>(r.positives) / static_cast<double>(r.rows))};
}

Outcome ensemble_behaviour() {
    const auto& r = benchmark_results();
    const double f = median(r.balanced_f1), g = median(r.goss_f1), e = median(r.ensemble_f1);
    return {e >= std::max(f, g) - 0.02 && r.worst_vote_gap <= 1e-12,
            fmt("median F1 forest %.3f, gbdt_goss %.3f, soft vote %.3f; max |vote - mean| = %.1e", f, g, e,
                r.worst_vote_gap)};
}

Outcome metric_identities() {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::int64_t> cell(0, 1000);
    int exact = 0, checked = 0;
    for (int i = 0; i < 1000; ++i) {
        const Confusion c{cell(rng), cell(rng), cell(rng), cell(rng)};
        const auto r = prf1(c);
        ++checked;
        const double p = c.tp + c.fp ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
        const double rec = c.tp + c.fn ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
        const double f1 = p + rec > 0 ? (p == rec ? p : 2.0 * p * rec / (p + rec)) : 0.0;
        const bool identity = p + rec == 0.0 || std::abs(r.f1 * (r.precision + r.recall) - 2 * r.precision * r.recall) <= 1e-12;
        exact += (r.precision == p && r.recall == rec && r.f1 == f1 && identity) ? 1 : 0;
    }
    int equal_pr = 0;
    for (std::int64_t k = 1; k <= 100; ++k) {
        const auto r = prf1(Confusion{7 * k, 3 * k, 50, 3 * k});
        equal_pr += (r.precision == r.recall && r.f1 == r.precision) ? 1 : 0;
    }
    return {exact == checked && equal_pr == 100,
            fmt("%d/%d confusion matrices exact; P=R gives F1=P in %d/100", exact, checked, equal_pr)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome reproducible_runs() {
    const Json j = Json::parse(R"({
        "seed": 12,
        "synthetic": {"n_users": 600},
        "models": ["forest", "gbdt_depthwise", "gbdt_goss"],
        "tuner": {"method": "tpe", "max_trials": 12, "n_startup": 6},
        "evaluation": {"rounds": 10}
    })");
    const fs::path root = fs::temp_directory_path() / "repurchase_acceptance_runs";
    fs::remove_all(root);
    std::vector<std::string> reports;
    for (const char* sub : {"first", "second"}) {
        auto c = PipelineConfig::from_json(j);
        c.output_dir = root / sub;
        run_pipeline(c);
        reports.push_back(slurp(c.output_dir / "report.json"));
    }
    fs::remove_all(root);
    const bool same = !reports[0].empty() && reports[0] == reports[1];
    return {same, fmt("report.json %s across two runs (%zu bytes)", same ? "byte-identical" : "differs",
                      reports[0].size())};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"cart split matches exhaustive oracle", cart_oracle},
        {"logistic gradient and hessian", gradient_check},
        {"leaf weight optimality", leaf_weight_optimality},
        {"one-side sampling is unbiased", goss_unbiased},
        {"one-side sampling degenerates to full fit", goss_degenerate},
        {"smote geometry and enn verdicts", smote_geometry},
        {"tpe densities, proposal and split", tpe_machinery},
        {"tpe versus random and grid search", tpe_vs_random},
        {"balancing improves forest f1", balancing_benefit},
        {"soft vote keeps up with best member", ensemble_behaviour},
        {"precision, recall and f1 identities", metric_identities},
        {"pipeline reports are reproducible", reproducible_runs},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s [%2zu] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}

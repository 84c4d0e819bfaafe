#include "repurchase/features.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace repurchase {

namespace {

constexpr double kSecondsPerDay = 86400.0;

double days_between(Timestamp from, Timestamp to) {
    return static_cast<double>((to - from).count()) / kSecondsPerDay;
}

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double to_double(const std::string& s, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError(line, "bad number '" + s + "'");
    return v;
}

}  // namespace

FeatureRow compute_rfmst(const LabeledPair& pair, const WindowConfig& window) {
    if (pair.transactions.empty()) {
        throw InvalidArgument("pair " + pair.user_id + "/" + pair.item_id + " has no observation transactions");
    }
    const Timestamp first = pair.transactions.front().timestamp;
    const Timestamp last = pair.transactions.back().timestamp;
    FeatureRow row;
    row.user_id = pair.user_id;
    row.item_id = pair.item_id;
    row.recency = days_between(last, window.observation_end);
    row.frequency = static_cast<std::int64_t>(pair.transactions.size());
    for (const auto& tx : pair.transactions) row.monetary += tx.amount;
    row.span = days_between(first, last);
    row.interval = row.span / static_cast<double>(row.frequency);
    row.label = pair.label;
    return row;
}

std::vector<FeatureRow> compute_features(const std::vector<LabeledPair>& pairs, const WindowConfig& window) {
    std::vector<FeatureRow> rows;
    rows.reserve(pairs.size());
    for (const auto& p : pairs) rows.push_back(compute_rfmst(p, window));
    return rows;
}

Dataset to_dataset(const std::vector<FeatureRow>& rows) {
    Dataset d;
    d.x = Matrix(0, kFeatureCount);
    for (const auto& r : rows) d.push_back(r.values(), r.label);
    return d;
}

Standardizer::Standardizer(std::vector<double> mean, std::vector<double> stddev)
    : mean_(std::move(mean)), stddev_(std::move(stddev)) {
    if (mean_.size() != stddev_.size()) throw InvalidArgument("standardizer mean/stddev size mismatch");
}

Standardizer Standardizer::fit(const Matrix& x) {
    if (x.rows() < 2) throw InvalidArgument("standardizer needs at least 2 rows");
    const std::size_t d = x.cols();
    std::vector<double> mean(d, 0.0), sd(d, 0.0);
    const double n = static_cast<double>(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < d; ++j) mean[j] += x(i, j);
    }
    for (auto& m : mean) m /= n;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = x(i, j) - mean[j];
            sd[j] += dev * dev;
        }
    }
    for (auto& s : sd) s = std::sqrt(s / (n - 1.0));
    return Standardizer(std::move(mean), std::move(sd));
}

Standardizer Standardizer::fit(const std::vector<FeatureRow>& rows) { return fit(to_dataset(rows).x); }

Matrix Standardizer::transform(const Matrix& x) const {
    if (x.cols() != mean_.size()) {
        throw InvalidArgument("standardizer fitted on " + std::to_string(mean_.size()) + " features, got " +
                              std::to_string(x.cols()));
    }
    Matrix z(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            z(i, j) = stddev_[j] > 0.0 ? (x(i, j) - mean_[j]) / stddev_[j] : 0.0;
        }
    }
    return z;
}

Matrix Standardizer::transform(const std::vector<FeatureRow>& rows) const { return transform(to_dataset(rows).x); }

Matrix Standardizer::inverse_transform(const Matrix& z) const {
    if (z.cols() != mean_.size()) throw InvalidArgument("standardizer dimension mismatch");
    Matrix x(z.rows(), z.cols());
    for (std::size_t i = 0; i < z.rows(); ++i) {
        for (std::size_t j = 0; j < z.cols(); ++j) x(i, j) = z(i, j) * stddev_[j] + mean_[j];
    }
    return x;
}

void write_feature_csv(std::ostream& out, const std::vector<FeatureRow>& rows) {
    out << "user_id,item_id,R,F,M,S,T,label\n";
    for (const auto& r : rows) {
        out << r.user_id << ',' << r.item_id << ',' << format_double(r.recency) << ',' << r.frequency << ','
            << format_double(r.monetary) << ',' << format_double(r.span) << ',' << format_double(r.interval) << ','
            << r.label << '\n';
    }
}

std::vector<FeatureRow> read_feature_csv(std::istream& in) {
    std::vector<FeatureRow> rows;
    std::string line;
    if (!std::getline(in, line)) return rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 8) throw ParseError(line_no, "expected 8 feature columns");
        FeatureRow r;
        r.user_id = f[0];
        r.item_id = f[1];
        r.recency = to_double(f[2], line_no);
        r.frequency = static_cast<std::int64_t>(to_double(f[3], line_no));
        r.monetary = to_double(f[4], line_no);
        r.span = to_double(f[5], line_no);
        r.interval = to_double(f[6], line_no);
        r.label = static_cast<int>(to_double(f[7], line_no));
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace repurchase

#pragma once

// Transaction ingestion, observation/forecast windowing and pair labeling.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <istream>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "repurchase/common.hpp"

namespace repurchase {

using Timestamp = std::chrono::sys_seconds;

struct Transaction {
    std::string user_id;
    std::string item_id;
    Timestamp timestamp;
    std::int64_t quantity = 0;
    double amount = 0.0;
    std::string payment_method;

    bool operator==(const Transaction&) const = default;
};

/// Observation window is [observation_start, observation_end]; the forecast
/// window is (observation_end, forecast_end].
struct WindowConfig {
    Timestamp observation_start;
    Timestamp observation_end;
    Timestamp forecast_end;

    void validate() const;
    [[nodiscard]] double observation_days() const;
};

struct LabeledPair {
    std::string user_id;
    std::string item_id;
    std::vector<Transaction> transactions;  // observation window only, ascending time
    int label = 0;
};

/// Input column names. Defaults match the generator's output.
struct ColumnMapping {
    std::string user_id = "user_id";
    std::string item_id = "item_id";
    std::string timestamp = "timestamp";
    std::string quantity = "quantity";
    std::string amount = "amount";
    std::string payment_method = "payment_method";  // optional column
};

struct RowError {
    std::size_t line = 0;  // 1-based, header is line 1
    std::string message;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message);
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct ParseOptions {
    bool fail_fast = false;
};

struct ParseResult {
    std::vector<Transaction> transactions;
    std::vector<RowError> skipped;
    std::size_t rows_read = 0;
};

/// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS" and "YYYY-MM-DD HH:MM:SS",
/// each optionally suffixed by "Z". Returns nullopt on malformed input.
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);

/// Splits one CSV record. Handles double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

ParseResult parse_transactions(std::istream& source, const ColumnMapping& schema = {},
                               const ParseOptions& options = {});

void write_transactions(std::ostream& out, const std::vector<Transaction>& txs);

struct WindowSplit {
    std::vector<Transaction> observation;
    std::vector<Transaction> forecast;
    std::size_t dropped = 0;
};

WindowSplit split_windows(const std::vector<Transaction>& txs, const WindowConfig& window);

/// One pair per distinct <user, item> seen in the observation window, sorted
/// by (user_id, item_id).
std::vector<LabeledPair> label_pairs(const std::vector<Transaction>& observation,
                                     const std::vector<Transaction>& forecast);

/// Shuffles under `seed` and puts the first ceil(ratio * n) rows into train.
template <typename Row>
std::pair<std::vector<Row>, std::vector<Row>> train_valid_split(const std::vector<Row>& rows, double ratio,
                                                                std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("split ratio must lie in (0, 1)");
    if (rows.size() < 2) throw InvalidArgument("train/valid split needs at least 2 rows");
    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t n_train = ceil_fraction(ratio, rows.size());
    std::pair<std::vector<Row>, std::vector<Row>> out;
    out.first.reserve(n_train);
    out.second.reserve(rows.size() - n_train);
    for (std::size_t k = 0; k < order.size(); ++k) {
        (k < n_train ? out.first : out.second).push_back(rows[order[k]]);
    }
    return out;
}

}  // namespace repurchase

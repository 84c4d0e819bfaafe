#include "repurchase/dataio.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <ostream>
#include <tuple>

namespace repurchase {

namespace {

bool parse_fixed_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& message)
    : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

void WindowConfig::validate() const {
    if (!(observation_start < observation_end && observation_end < forecast_end)) {
        throw InvalidArgument("window boundaries must satisfy observation_start < observation_end < forecast_end");
    }
}

double WindowConfig::observation_days() const {
    return static_cast<double>((observation_end - observation_start).count()) / 86400.0;
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
    if (text.size() != 10 && text.size() != 19) return std::nullopt;
    if (text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (!parse_fixed_int(text.substr(0, 4), y) || !parse_fixed_int(text.substr(5, 2), mo) ||
        !parse_fixed_int(text.substr(8, 2), d)) {
        return std::nullopt;
    }
    if (text.size() == 19) {
        if ((text[10] != 'T' && text[10] != ' ') || text[13] != ':' || text[16] != ':') return std::nullopt;
        if (!parse_fixed_int(text.substr(11, 2), h) || !parse_fixed_int(text.substr(14, 2), mi) ||
            !parse_fixed_int(text.substr(17, 2), s)) {
            return std::nullopt;
        }
        if (h > 23 || mi > 59 || s > 59 || h < 0 || mi < 0 || s < 0) return std::nullopt;
    }
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::string format_timestamp(Timestamp ts) {
    using namespace std::chrono;
    const auto day_point = floor<days>(ts);
    const year_month_day ymd{day_point};
    const hh_mm_ss<seconds> tod{ts - day_point};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                  static_cast<long>(tod.seconds().count()));
    return buf;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else if (c != '\r') {
            current += c;
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

ParseResult parse_transactions(std::istream& source, const ColumnMapping& schema, const ParseOptions& options) {
    ParseResult result;
    std::string line;
    if (!std::getline(source, line)) return result;
    const auto header = split_csv_line(line);

    auto find_column = [&](const std::string& name, bool required) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (trim(header[i]) == name) return i;
        }
        if (required) throw ParseError(1, "missing column '" + name + "'");
        return std::nullopt;
    };
    const std::size_t c_user = *find_column(schema.user_id, true);
    const std::size_t c_item = *find_column(schema.item_id, true);
    const std::size_t c_time = *find_column(schema.timestamp, true);
    const std::size_t c_qty = *find_column(schema.quantity, true);
    const std::size_t c_amount = *find_column(schema.amount, true);
    const auto c_payment = find_column(schema.payment_method, false);
    const std::size_t width = header.size();

    std::size_t line_no = 1;
    while (std::getline(source, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ++result.rows_read;
        auto fail = [&](const std::string& message) {
            if (options.fail_fast) throw ParseError(line_no, message);
            result.skipped.push_back({line_no, message});
        };
        const auto fields = split_csv_line(line);
        if (fields.size() != width) {
            fail("expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));
            continue;
        }
        const auto ts = parse_timestamp(fields[c_time]);
        if (!ts) {
            fail("malformed timestamp '" + fields[c_time] + "'");
            continue;
        }
        const auto qty = parse_int(fields[c_qty]);
        if (!qty || *qty < 0) {
            fail("invalid quantity '" + fields[c_qty] + "'");
            continue;
        }
        const auto amount = parse_double(fields[c_amount]);
        if (!amount || *amount < 0.0) {
            fail("invalid amount '" + fields[c_amount] + "'");
            continue;
        }
        Transaction tx;
        tx.user_id = std::string(trim(fields[c_user]));
        tx.item_id = std::string(trim(fields[c_item]));
        if (tx.user_id.empty() || tx.item_id.empty()) {
            fail("empty user or item id");
            continue;
        }
        tx.timestamp = *ts;
        tx.quantity = *qty;
        tx.amount = *amount;
        if (c_payment) tx.payment_method = std::string(trim(fields[*c_payment]));
        result.transactions.push_back(std::move(tx));
    }
    return result;
}

void write_transactions(std::ostream& out, const std::vector<Transaction>& txs) {
    out << "user_id,item_id,timestamp,quantity,amount,payment_method\n";
    char amount[64];
    for (const auto& tx : txs) {
        std::snprintf(amount, sizeof amount, "%.2f", tx.amount);
        out << csv_escape(tx.user_id) << ',' << csv_escape(tx.item_id) << ',' << format_timestamp(tx.timestamp) << ','
            << tx.quantity << ',' << amount << ',' << csv_escape(tx.payment_method) << '\n';
    }
}

WindowSplit split_windows(const std::vector<Transaction>& txs, const WindowConfig& window) {
    window.validate();
    WindowSplit out;
    for (const auto& tx : txs) {
        if (tx.timestamp >= window.observation_start && tx.timestamp <= window.observation_end) {
            out.observation.push_back(tx);
        } else if (tx.timestamp > window.observation_end && tx.timestamp <= window.forecast_end) {
            out.forecast.push_back(tx);
        } else {
            ++out.dropped;
        }
    }
    return out;
}

std::vector<LabeledPair> label_pairs(const std::vector<Transaction>& observation,
                                     const std::vector<Transaction>& forecast) {
    using Key = std::pair<std::string, std::string>;
    std::map<Key, std::vector<Transaction>> grouped;
    for (const auto& tx : observation) grouped[{tx.user_id, tx.item_id}].push_back(tx);

    std::map<Key, bool> repurchased;
    for (const auto& tx : forecast) repurchased[{tx.user_id, tx.item_id}] = true;

    std::vector<LabeledPair> pairs;
    pairs.reserve(grouped.size());
    for (auto& [key, txs] : grouped) {
        std::stable_sort(txs.begin(), txs.end(),
                         [](const Transaction& a, const Transaction& b) { return a.timestamp < b.timestamp; });
        LabeledPair pair;
        pair.user_id = key.first;
        pair.item_id = key.second;
        pair.transactions = std::move(txs);
        pair.label = repurchased.contains(key) ? 1 : 0;
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

}  // namespace repurchase

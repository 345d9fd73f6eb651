#include "democlust/data_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>

#include "democlust/csv.hpp"
#include "democlust/error.hpp"

namespace democlust {

namespace {

std::string_view trim(std::string_view s) noexcept {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

bool iequals(std::string_view a, std::string_view b) noexcept {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        char x = a[i], y = b[i];
        if (x >= 'A' && x <= 'Z') x = static_cast<char>(x - 'A' + 'a');
        if (y >= 'A' && y <= 'Z') y = static_cast<char>(y - 'A' + 'a');
        if (x != y) return false;
    }
    return true;
}

std::string fingerprint(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

const char* to_string(ColumnKind kind) noexcept {
    return kind == ColumnKind::kNumeric ? "numeric" : "categorical";
}

bool is_missing_token(std::string_view cell) noexcept {
    cell = trim(cell);
    return cell.empty() || iequals(cell, "na") || iequals(cell, "nan");
}

std::optional<double> parse_number(std::string_view cell) noexcept {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    if (cell.empty()) return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<std::size_t> DataTable::find_column(std::string_view name) const noexcept {
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        if (columns_[c].name == name) return c;
    }
    return std::nullopt;
}

std::size_t DataTable::column_index(std::string_view name) const {
    if (auto c = find_column(name)) return *c;
    throw Error(ErrorCode::kUnknownFeature, "unknown column '" + std::string(name) + "'");
}

bool DataTable::is_missing(ItemId row, std::size_t col) const {
    const auto& spec = columns_.at(col);
    if (spec.kind == ColumnKind::kNumeric) return std::isnan(numeric_[col].at(row));
    return category_codes_[col].at(row) == kMissingCategory;
}

double DataTable::numeric(ItemId row, std::size_t col) const {
    if (columns_.at(col).kind != ColumnKind::kNumeric) {
        throw Error(ErrorCode::kInvalidArgument, "column '" + columns_[col].name + "' is not numeric");
    }
    return numeric_[col].at(row);
}

int DataTable::category(ItemId row, std::size_t col) const {
    if (columns_.at(col).kind != ColumnKind::kCategorical) {
        throw Error(ErrorCode::kInvalidArgument,
                    "column '" + columns_[col].name + "' is not categorical");
    }
    return category_codes_[col].at(row);
}

const std::string& DataTable::raw(ItemId row, std::size_t col) const {
    return raw_.at(col).at(row);
}

DataTable ingest_csv(std::string_view document, const CsvOptions& options) {
    auto records = csv::parse(document, options.delimiter);
    if (records.empty()) throw Error(ErrorCode::kEmptyInput, "CSV document is empty");
    if (records.size() < 2) throw Error(ErrorCode::kEmptyInput, "CSV document has no data rows");

    const auto& header = records.front();
    const std::size_t n_cols = header.size();
    const std::size_t n_rows = records.size() - 1;

    DataTable table;
    table.id_ = fingerprint(document);
    table.n_rows_ = n_rows;
    table.columns_.resize(n_cols);
    table.raw_.assign(n_cols, std::vector<std::string>(n_rows));
    table.numeric_.resize(n_cols);
    table.category_codes_.resize(n_cols);

    for (std::size_t c = 0; c < n_cols; ++c) {
        auto& spec = table.columns_[c];
        spec.name = header[c];
        auto& raw = table.raw_[c];
        for (std::size_t r = 0; r < n_rows; ++r) raw[r] = std::move(records[r + 1][c]);

        bool numeric = true;
        std::vector<double> values(n_rows, std::nan(""));
        for (std::size_t r = 0; r < n_rows; ++r) {
            if (is_missing_token(raw[r])) {
                ++spec.missing_count;
                continue;
            }
            if (auto v = parse_number(raw[r])) {
                values[r] = *v;
            } else {
                numeric = false;
            }
        }

        if (numeric) {
            spec.kind = ColumnKind::kNumeric;
            double sum = 0.0, lo = 0.0, hi = 0.0;
            std::size_t count = 0;
            for (double v : values) {
                if (std::isnan(v)) continue;
                if (count == 0) lo = hi = v;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
                sum += v;
                ++count;
            }
            if (count > 0) {
                const double mean = std::clamp(sum / static_cast<double>(count), lo, hi);
                double ss = 0.0;
                for (double v : values) {
                    if (!std::isnan(v)) ss += (v - mean) * (v - mean);
                }
                spec.min = lo;
                spec.max = hi;
                spec.mean = mean;
                spec.stddev = std::sqrt(ss / static_cast<double>(count));
            }
            table.numeric_[c] = std::move(values);
        } else {
            // categorical: every non-missing cell is a category, missing tokens stay missing
            spec.kind = ColumnKind::kCategorical;
            spec.missing_count = 0;
            std::vector<std::string> cats;
            for (const auto& cell : raw) {
                if (!is_missing_token(cell)) cats.push_back(cell);
            }
            std::sort(cats.begin(), cats.end());
            cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
            auto& codes = table.category_codes_[c];
            codes.assign(n_rows, DataTable::kMissingCategory);
            for (std::size_t r = 0; r < n_rows; ++r) {
                if (is_missing_token(raw[r])) {
                    ++spec.missing_count;
                    continue;
                }
                auto it = std::lower_bound(cats.begin(), cats.end(), raw[r]);
                codes[r] = static_cast<int>(it - cats.begin());
            }
            spec.categories = std::move(cats);
        }
    }
    return table;
}

}  // namespace democlust

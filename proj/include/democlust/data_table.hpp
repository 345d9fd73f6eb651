#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace democlust {

/// Stable 0-based row identifier, assigned in file order at ingest.
using ItemId = std::size_t;

enum class ColumnKind { kNumeric, kCategorical };

const char* to_string(ColumnKind kind) noexcept;

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::kNumeric;
    // numeric only, population statistics over non-missing cells
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    // categorical only, deduplicated and sorted
    std::vector<std::string> categories;
    std::size_t missing_count = 0;

    double range() const noexcept { return max - min; }
};

struct CsvOptions {
    char delimiter = ',';
};

/// True for the missing-value tokens: "", "NA", "NaN" (case-insensitive,
/// surrounding whitespace ignored).
bool is_missing_token(std::string_view cell) noexcept;

/// Parse a finite real number; nullopt if the cell is not one.
std::optional<double> parse_number(std::string_view cell) noexcept;

/**
 * Typed tabular dataset. Immutable after ingest.
 *
 * Rows are items keyed by ItemId (dense, 0..n_rows-1). Every cell keeps its
 * raw text so exports reproduce the input. Numeric cells additionally carry a
 * parsed value (NaN when missing); categorical cells carry an index into the
 * column's sorted category list (-1 when missing).
 */
class DataTable {
public:
    static constexpr int kMissingCategory = -1;

    const std::string& id() const noexcept { return id_; }
    std::size_t n_rows() const noexcept { return n_rows_; }
    std::size_t n_columns() const noexcept { return columns_.size(); }
    const std::vector<ColumnSpec>& columns() const noexcept { return columns_; }
    const ColumnSpec& column(std::size_t c) const { return columns_.at(c); }

    std::optional<std::size_t> find_column(std::string_view name) const noexcept;
    /// Throws Error(kUnknownFeature) for an unknown name.
    std::size_t column_index(std::string_view name) const;

    bool is_missing(ItemId row, std::size_t col) const;
    /// Parsed value of a numeric cell, NaN when missing.
    double numeric(ItemId row, std::size_t col) const;
    /// Category index of a categorical cell, kMissingCategory when missing.
    int category(ItemId row, std::size_t col) const;
    const std::string& raw(ItemId row, std::size_t col) const;

private:
    friend DataTable ingest_csv(std::string_view, const CsvOptions&);

    std::string id_;
    std::size_t n_rows_ = 0;
    std::vector<ColumnSpec> columns_;
    std::vector<std::vector<std::string>> raw_;     // column-major
    std::vector<std::vector<double>> numeric_;      // column-major, empty for categorical
    std::vector<std::vector<int>> category_codes_;  // column-major, empty for numeric
};

/**
 * Build a DataTable from a CSV document with a header row.
 *
 * A column is numeric iff every non-missing cell parses as a real number.
 * Throws ParseError for malformed CSV and Error(kEmptyInput) when there is no
 * header or no data row.
 */
DataTable ingest_csv(std::string_view document, const CsvOptions& options = {});

}  // namespace democlust

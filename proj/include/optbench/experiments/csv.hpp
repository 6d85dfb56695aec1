#ifndef OPTBENCH_EXPERIMENTS_CSV_HPP
#define OPTBENCH_EXPERIMENTS_CSV_HPP

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

namespace optbench::experiments {

/// Doubles are written with 17 significant digits, which round-trips exactly.
inline std::string format_double(double v) { return fmt::format("{:.17g}", v); }

/// In-memory CSV: comma separated, '\n' line endings, header always first.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
        append_line(header_);
    }

    const std::vector<std::string>& header() const noexcept { return header_; }
    std::size_t rows() const noexcept { return rows_; }
    const std::string& text() const noexcept { return text_; }

    /// One formatted field.
    struct Cell {
        std::string text;
        Cell(double v) : text(format_double(v)) {}
        template <std::integral T>
            requires(!std::same_as<T, bool>)
        Cell(T v) : text(std::to_string(v)) {}
        Cell(bool v) : text(v ? "1" : "0") {}
        Cell(std::string_view v) : text(v) {}
        Cell(const char* v) : text(v) {}
        Cell(const std::string& v) : text(v) {}
        // empty field when absent
        Cell(const std::optional<double>& v) : text(v ? format_double(*v) : std::string{}) {}
    };

    void add_row(std::initializer_list<Cell> cells) {
        if (cells.size() != header_.size())
            throw std::logic_error(fmt::format("CSV row has {} fields, header has {}", cells.size(), header_.size()));
        bool first = true;
        for (const auto& c : cells) {
            if (!first) text_ += ',';
            text_ += c.text;
            first = false;
        }
        text_ += '\n';
        ++rows_;
    }

    /// Appends another table's data rows; headers must match.
    void append(const CsvTable& other) {
        if (other.header_ != header_) throw std::logic_error("CSV header mismatch on append");
        const auto body = other.text_.find('\n');
        text_ += other.text_.substr(body + 1);
        rows_ += other.rows_;
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
        out.write(text_.data(), static_cast<std::streamsize>(text_.size()));
        if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
    }

private:
    void append_line(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) text_ += ',';
            text_ += fields[i];
        }
        text_ += '\n';
    }

    std::vector<std::string> header_;
    std::string text_;
    std::size_t rows_ = 0;
};

// Column sets, fixed per output file.
inline const std::vector<std::string> kConditionsHeader{"trial",  "i",      "H0",     "H1",      "H2",
                                                        "bound0", "bound1", "bound2", "violated"};
inline const std::vector<std::string> kConditionsMaxHeader{"i", "max_margin0", "max_margin1", "max_margin2"};
inline const std::vector<std::string> kRatioHeader{"trial", "n", "delta", "expected_delta", "ratio"};
inline const std::vector<std::string> kRatioEnvelopeHeader{"i", "min_ratio", "mean_ratio", "max_ratio"};
inline const std::vector<std::string> kTraceHeader{"algo", "seed",        "iter",          "grad_evals",
                                                   "f",    "grad_norm_y", "grad_norm_xbar"};
inline const std::vector<std::string> kHistogramHeader{"quantity", "i", "bin_left", "bin_right", "count"};
inline const std::vector<std::string> kMeanTraceHeader{"algo", "iter", "mean_grad_evals", "mean_f", "mean_f_gap"};
inline const std::vector<std::string> kRateHeader{"k", "mean_min_grad_sq", "std_error", "bound", "holds"};
inline const std::vector<std::string> kSummaryHeader{"key", "value"};

}  // namespace optbench::experiments

#endif  // OPTBENCH_EXPERIMENTS_CSV_HPP

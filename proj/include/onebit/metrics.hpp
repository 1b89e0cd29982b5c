#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace onebit {

/// Observations from one Monte-Carlo trial. Metrics that do not apply to the
/// configured pipeline stay empty (NMSE under perfect CSI, candidate counts
/// without a second stage).
struct TrialRecord {
    std::optional<double> nmse;
    std::optional<double> ber;
    std::optional<double> mean_candidates;
    double flagged_rows = 0.0;   // zero-solution rows/slots plus unconverged solves
};

struct MetricRow {
    double snr_db = 0.0;
    std::string metric;          // NMSE, BER, mean_candidates, flagged_rows
    double mean = 0.0;
    double stderr_ = 0.0;        // sample standard deviation / sqrt(n)
    long n = 0;

    bool operator==(const MetricRow&) const = default;
};

class MetricTable {
public:
    /// Summarizes the records of one SNR point, in the given order.
    void add_point(double snr_db, const std::vector<TrialRecord>& records);

    const std::vector<MetricRow>& rows() const noexcept { return rows_; }
    /// Throws std::out_of_range if the row does not exist.
    const MetricRow& at(double snr_db, std::string_view metric) const;
    std::optional<MetricRow> find(double snr_db, std::string_view metric) const;

    std::string to_csv() const;
    static MetricTable from_csv(std::string_view text);

    bool operator==(const MetricTable&) const = default;

private:
    std::vector<MetricRow> rows_;
};

/// CSV with header `snr_dB,metric,mean,stderr,n`, numbers at %.17g. Throws
/// ConfigError when the file cannot be written.
void emit_csv(const MetricTable& table, const std::string& path);

/// Plot data uses the same CSV layout.
void emit_plotdata(const MetricTable& table, const std::string& path);

} // namespace onebit

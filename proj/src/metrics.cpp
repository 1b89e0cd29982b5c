#include "onebit/metrics.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "onebit/types.hpp"

namespace onebit {

namespace {

constexpr std::string_view kHeader = "snr_dB,metric,mean,stderr,n";

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void summarize(std::vector<MetricRow>& out, double snr_db, const char* name,
               const std::vector<double>& samples) {
    if (samples.empty()) {
        return;
    }
    const auto n = static_cast<long>(samples.size());
    double sum = 0.0;
    for (double s : samples) {
        sum += s;
    }
    const double mean = sum / static_cast<double>(n);
    double err = 0.0;
    if (n > 1) {
        double ss = 0.0;
        for (double s : samples) {
            ss += (s - mean) * (s - mean);
        }
        err = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    }
    out.push_back({snr_db, name, mean, err, n});
}

} // namespace

void MetricTable::add_point(double snr_db, const std::vector<TrialRecord>& records) {
    std::vector<double> nmse, ber, cand, flagged;
    for (const auto& r : records) {
        if (r.nmse) nmse.push_back(*r.nmse);
        if (r.ber) ber.push_back(*r.ber);
        if (r.mean_candidates) cand.push_back(*r.mean_candidates);
        flagged.push_back(r.flagged_rows);
    }
    summarize(rows_, snr_db, "NMSE", nmse);
    summarize(rows_, snr_db, "BER", ber);
    summarize(rows_, snr_db, "mean_candidates", cand);
    summarize(rows_, snr_db, "flagged_rows", flagged);
}

std::optional<MetricRow> MetricTable::find(double snr_db, std::string_view metric) const {
    for (const auto& r : rows_) {
        if (r.snr_db == snr_db && r.metric == metric) {
            return r;
        }
    }
    return std::nullopt;
}

const MetricRow& MetricTable::at(double snr_db, std::string_view metric) const {
    for (const auto& r : rows_) {
        if (r.snr_db == snr_db && r.metric == metric) {
            return r;
        }
    }
    throw std::out_of_range("no metric '" + std::string(metric) + "' at " + format_double(snr_db) + " dB");
}

std::string MetricTable::to_csv() const {
    std::string out(kHeader);
    out += '\n';
    for (const auto& r : rows_) {
        out += format_double(r.snr_db) + ',' + r.metric + ',' + format_double(r.mean) + ',' +
               format_double(r.stderr_) + ',' + std::to_string(r.n) + '\n';
    }
    return out;
}

MetricTable MetricTable::from_csv(std::string_view text) {
    MetricTable table;
    bool header = true;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        if (line.empty()) {
            continue;
        }
        if (header) {
            if (line != kHeader) {
                throw InvalidInput("metrics csv: unexpected header");
            }
            header = false;
            continue;
        }
        std::vector<std::string_view> fields;
        while (true) {
            const auto comma = line.find(',');
            fields.push_back(line.substr(0, comma));
            if (comma == std::string_view::npos) {
                break;
            }
            line.remove_prefix(comma + 1);
        }
        if (fields.size() != 5) {
            throw InvalidInput("metrics csv: expected 5 fields");
        }
        auto num = [](std::string_view f) {
            double v = 0.0;
            const auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc() || end != f.data() + f.size()) {
                throw InvalidInput("metrics csv: bad number '" + std::string(f) + "'");
            }
            return v;
        };
        long n = 0;
        const auto [end, ec] = std::from_chars(fields[4].data(), fields[4].data() + fields[4].size(), n);
        if (ec != std::errc() || end != fields[4].data() + fields[4].size()) {
            throw InvalidInput("metrics csv: bad count");
        }
        table.rows_.push_back({num(fields[0]), std::string(fields[1]), num(fields[2]), num(fields[3]), n});
    }
    return table;
}

void emit_csv(const MetricTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write '" + path + "'");
    }
    out << table.to_csv();
    out.flush();
    if (!out) {
        throw ConfigError("write to '" + path + "' failed");
    }
}

void emit_plotdata(const MetricTable& table, const std::string& path) {
    emit_csv(table, path);
}

} // namespace onebit

#include "onebit/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "onebit/ofdm.hpp"

namespace onebit {

namespace {

template <typename Enum, std::size_t Count>
Enum lookup(std::string_view name, const std::pair<std::string_view, Enum> (&table)[Count],
            const char* what) {
    for (const auto& [key, value] : table) {
        if (key == name) {
            return value;
        }
    }
    throw ConfigError(std::string("unknown ") + what + " '" + std::string(name) + "'");
}

template <typename Enum, std::size_t Count>
std::string_view reverse(Enum value, const std::pair<std::string_view, Enum> (&table)[Count]) {
    for (const auto& [key, v] : table) {
        if (v == value) {
            return key;
        }
    }
    return "?";
}

constexpr std::pair<std::string_view, Scenario> kScenarios[] = {
    {"flat_iid", Scenario::flat_iid},
    {"flat_correlated", Scenario::flat_correlated},
    {"ofdm", Scenario::ofdm},
};
constexpr std::pair<std::string_view, Estimator> kEstimators[] = {
    {"svm", Estimator::svm},
    {"svm_correlated", Estimator::svm_correlated},
    {"joint_ce_dd", Estimator::joint_ce_dd},
    {"perfect_csi", Estimator::perfect_csi},
};
constexpr std::pair<std::string_view, Detector> kDetectors[] = {
    {"svm_two_stage", Detector::svm_two_stage},
    {"svm_stage1", Detector::svm_stage1},
    {"ml", Detector::ml},
    {"ofdm_svm", Detector::ofdm_svm},
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(std::string_view key, std::string_view text) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v)) {
        throw ConfigError("key '" + std::string(key) + "': '" + std::string(text) + "' is not a finite number");
    }
    return v;
}

template <typename Int>
Int to_integer(std::string_view key, std::string_view text) {
    Int v{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size()) {
        throw ConfigError("key '" + std::string(key) + "': '" + std::string(text) + "' is not an integer");
    }
    return v;
}

std::vector<double> to_list(std::string_view key, std::string_view text) {
    std::vector<double> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        out.push_back(to_double(key, trim(text.substr(0, comma))));
        if (comma == std::string_view::npos) {
            break;
        }
        text.remove_prefix(comma + 1);
    }
    return out;
}

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw ConfigError(message);
    }
}

} // namespace

Scenario parse_scenario(std::string_view name) { return lookup(name, kScenarios, "scenario"); }
Estimator parse_estimator(std::string_view name) { return lookup(name, kEstimators, "estimator"); }
Detector parse_detector(std::string_view name) { return lookup(name, kDetectors, "detector"); }
std::string_view to_string(Scenario s) { return reverse(s, kScenarios); }
std::string_view to_string(Estimator e) { return reverse(e, kEstimators); }
std::string_view to_string(Detector d) { return reverse(d, kDetectors); }

void ExperimentConfig::validate() const {
    require(users >= 1, "K must be at least 1");
    require(antennas >= users, "N must be at least K");
    require(trials >= 1, "trials must be at least 1");
    require(!snr_grid_db.empty(), "snr_grid_dB must not be empty");
    for (double s : snr_grid_db) {
        require(std::isfinite(s), "snr_grid_dB entries must be finite");
    }
    require(penalty > 0.0 && std::isfinite(penalty), "C must be positive");
    require(tol > 0.0 && std::isfinite(tol), "tol must be positive");
    require(max_epochs >= 1, "max_epochs must be at least 1");
    require(!gamma_override || *gamma_override >= 1.0, "gamma_override must be at least 1");
    require(ce_dd_rounds >= 1, "ce_dd_rounds must be at least 1");

    if (scenario == Scenario::ofdm) {
        require(detector == Detector::ofdm_svm, "scenario ofdm requires detector ofdm_svm");
        require(estimator == Estimator::svm || estimator == Estimator::perfect_csi,
                "scenario ofdm supports estimators svm and perfect_csi");
        require(ofdm_data_symbols >= 0, "ofdm_data_symbols must be non-negative");
        try {
            OfdmConfig{subcarriers, cyclic_prefix, taps, modulation}.validate();
        } catch (const InvalidInput& e) {
            throw ConfigError(e.what());
        }
        require(subcarriers >= users * taps, "Nc must be at least K*L for tap estimation");
        return;
    }

    require(detector != Detector::ofdm_svm, "detector ofdm_svm requires scenario ofdm");
    require(pilot_slots >= 1, "T_t must be at least 1");
    require(data_slot_count() >= 1, "T_d must be at least 1");
    require(!data_slots || block_length == pilot_slots + *data_slots, "T_t + T_d must equal block_length");
    require(estimator != Estimator::svm_correlated || scenario == Scenario::flat_correlated,
            "estimator svm_correlated requires scenario flat_correlated");
    if (scenario == Scenario::flat_correlated) {
        require(angle_spread_deg > 0.0, "angle_spread_deg must be positive");
        require(element_spacing > 0.0, "element_spacing must be positive");
        require(mean_angle_limit_deg >= 0.0 && mean_angle_limit_deg <= 90.0,
                "mean_angle_limit_deg must lie in [0, 90]");
    }
    if (detector == Detector::ml) {
        const double count = std::pow(static_cast<double>(Constellation::make(modulation).size()), users);
        require(count <= static_cast<double>(1 << 20), "ml detector: M^K exceeds the enumeration limit 2^20");
    }
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig c;
    std::map<std::string, std::string, std::less<>> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (!seen.emplace(key, value).second) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
    }

    bool block_given = false;
    for (const auto& [key, v] : seen) {
        if (key == "scenario") c.scenario = parse_scenario(v);
        else if (key == "K") c.users = to_integer<int>(key, v);
        else if (key == "N") c.antennas = to_integer<int>(key, v);
        else if (key == "T_t") c.pilot_slots = to_integer<int>(key, v);
        else if (key == "T_d") c.data_slots = to_integer<int>(key, v);
        else if (key == "block_length") { c.block_length = to_integer<int>(key, v); block_given = true; }
        else if (key == "constellation") {
            try {
                c.modulation = parse_modulation(v);
            } catch (const InvalidInput& e) {
                throw ConfigError(e.what());
            }
        }
        else if (key == "snr_grid_dB") c.snr_grid_db = to_list(key, v);
        else if (key == "estimator") c.estimator = parse_estimator(v);
        else if (key == "detector") c.detector = parse_detector(v);
        else if (key == "trials") c.trials = to_integer<int>(key, v);
        else if (key == "master_seed") c.master_seed = to_integer<std::uint64_t>(key, v);
        else if (key == "C") c.penalty = to_double(key, v);
        else if (key == "tol") c.tol = to_double(key, v);
        else if (key == "max_epochs") c.max_epochs = to_integer<int>(key, v);
        else if (key == "gamma_override") c.gamma_override = to_double(key, v);
        else if (key == "hamming_weights") {
            try {
                c.hamming_weights = parse_hamming_weights(v);
            } catch (const InvalidInput& e) {
                throw ConfigError(e.what());
            }
        }
        else if (key == "ml_log_cdf") {
            try {
                c.ml_log_cdf = parse_log_cdf_mode(v);
            } catch (const InvalidInput& e) {
                throw ConfigError(e.what());
            }
        }
        else if (key == "ce_dd_rounds") c.ce_dd_rounds = to_integer<int>(key, v);
        else if (key == "angle_spread_deg") c.angle_spread_deg = to_double(key, v);
        else if (key == "element_spacing") c.element_spacing = to_double(key, v);
        else if (key == "mean_angle_limit_deg") c.mean_angle_limit_deg = to_double(key, v);
        else if (key == "Nc") c.subcarriers = to_integer<int>(key, v);
        else if (key == "Ncp") c.cyclic_prefix = to_integer<int>(key, v);
        else if (key == "L") c.taps = to_integer<int>(key, v);
        else if (key == "ofdm_data_symbols") c.ofdm_data_symbols = to_integer<int>(key, v);
        else throw ConfigError("unknown key '" + key + "'");
    }
    if (c.data_slots && !block_given) {
        c.block_length = c.pilot_slots + *c.data_slots;
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string emit_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "scenario = " << to_string(c.scenario) << '\n'
        << "K = " << c.users << '\n'
        << "N = " << c.antennas << '\n'
        << "T_t = " << c.pilot_slots << '\n';
    if (c.data_slots) {
        out << "T_d = " << *c.data_slots << '\n';
    }
    out << "block_length = " << c.block_length << '\n'
        << "constellation = " << to_string(c.modulation) << '\n'
        << "snr_grid_dB = ";
    for (std::size_t i = 0; i < c.snr_grid_db.size(); ++i) {
        out << (i ? ", " : "") << format_double(c.snr_grid_db[i]);
    }
    out << '\n'
        << "estimator = " << to_string(c.estimator) << '\n'
        << "detector = " << to_string(c.detector) << '\n'
        << "trials = " << c.trials << '\n'
        << "master_seed = " << c.master_seed << '\n'
        << "C = " << format_double(c.penalty) << '\n'
        << "tol = " << format_double(c.tol) << '\n'
        << "max_epochs = " << c.max_epochs << '\n';
    if (c.gamma_override) {
        out << "gamma_override = " << format_double(*c.gamma_override) << '\n';
    }
    out << "hamming_weights = " << to_string(c.hamming_weights) << '\n'
        << "ml_log_cdf = " << to_string(c.ml_log_cdf) << '\n'
        << "ce_dd_rounds = " << c.ce_dd_rounds << '\n'
        << "angle_spread_deg = " << format_double(c.angle_spread_deg) << '\n'
        << "element_spacing = " << format_double(c.element_spacing) << '\n'
        << "mean_angle_limit_deg = " << format_double(c.mean_angle_limit_deg) << '\n'
        << "Nc = " << c.subcarriers << '\n'
        << "Ncp = " << c.cyclic_prefix << '\n'
        << "L = " << c.taps << '\n'
        << "ofdm_data_symbols = " << c.ofdm_data_symbols << '\n';
    return out.str();
}

} // namespace onebit

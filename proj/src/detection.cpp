#include "onebit/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace onebit {

namespace {

void check_detection_shapes(const RealVector& y, FeaturesRef channel_rows) {
    if (y.size() != channel_rows.rows()) {
        throw InvalidInput("detection: " + std::to_string(y.size()) + " observations for a channel with " +
                           std::to_string(channel_rows.rows()) + " rows");
    }
    if (channel_rows.cols() % 2 != 0 || channel_rows.cols() == 0) {
        throw InvalidInput("detection: channel must have 2K columns");
    }
}

double hamming_weight(double t, double scale, HammingWeights weights, LogCdfMode mode) {
    if (weights == HammingWeights::unweighted) {
        return 1.0;
    }
    const double a = scale * std::abs(t);
    return log_normal_cdf(a, mode) - log_normal_cdf(-a, mode);
}

} // namespace

Stage1Result svm_detect_stage1(const RealVector& y, FeaturesRef channel_rows, double penalty,
                               const SolverOptions& options) {
    check_detection_shapes(y, channel_rows);
    SvmSolution sol = solve_soft_margin(channel_rows, y, penalty, options);
    Stage1Result out;
    out.converged = sol.converged;
    out.epochs = sol.iterations;
    const double norm = sol.weights.norm();
    const double users = static_cast<double>(channel_rows.cols() / 2);
    if (norm > 0.0) {
        out.soft = sol.weights * (std::sqrt(users) / norm);
    } else {
        out.soft = RealVector::Zero(channel_rows.cols());
        out.flagged = true;
    }
    return out;
}

SymbolVector symbol_decide(const RealVector& soft, const Constellation& constellation) {
    if (soft.size() % 2 != 0) {
        throw InvalidInput("symbol_decide: soft vector must have even length");
    }
    const Eigen::Index users = soft.size() / 2;
    SymbolVector out(static_cast<std::size_t>(users));
    for (Eigen::Index k = 0; k < users; ++k) {
        out[static_cast<std::size_t>(k)] = constellation.slice(Complex(soft[k], soft[k + users]));
    }
    return out;
}

CandidateSet::CandidateSet(std::vector<std::vector<int>> per_user) : per_user_(std::move(per_user)) {
    size_ = per_user_.empty() ? 0 : 1;
    for (const auto& list : per_user_) {
        if (list.empty()) {
            throw InvalidInput("candidate set: every user needs at least one symbol");
        }
        size_ *= list.size();
    }
}

SymbolVector CandidateSet::at(std::size_t l) const {
    SymbolVector out(per_user_.size());
    for (std::size_t k = per_user_.size(); k-- > 0;) {
        const std::size_t radix = per_user_[k].size();
        out[k] = per_user_[k][l % radix];
        l /= radix;
    }
    return out;
}

std::optional<std::size_t> CandidateSet::index_of(const SymbolVector& v) const {
    if (v.size() != per_user_.size()) {
        return std::nullopt;
    }
    std::size_t l = 0;
    for (std::size_t k = 0; k < per_user_.size(); ++k) {
        const auto& list = per_user_[k];
        const auto it = std::find(list.begin(), list.end(), v[k]);
        if (it == list.end()) {
            return std::nullopt;
        }
        l = l * list.size() + static_cast<std::size_t>(it - list.begin());
    }
    return l;
}

CandidateSet build_candidates(const RealVector& soft, const SymbolVector& sliced, double gamma,
                              const Constellation& constellation) {
    if (!(gamma >= 1.0)) {
        throw InvalidInput("build_candidates: gamma must be >= 1");
    }
    const Eigen::Index users = soft.size() / 2;
    if (soft.size() % 2 != 0 || static_cast<Eigen::Index>(sliced.size()) != users) {
        throw InvalidInput("build_candidates: soft vector and sliced symbols disagree on K");
    }
    std::vector<std::vector<int>> lists(static_cast<std::size_t>(users));
    for (Eigen::Index k = 0; k < users; ++k) {
        const Complex s(soft[k], soft[k + users]);
        const int nearest = sliced[static_cast<std::size_t>(k)];
        const double reference = std::abs(s - constellation.point(nearest));
        auto& list = lists[static_cast<std::size_t>(k)];
        for (int m = 0; m < constellation.size(); ++m) {
            if (m == nearest || (reference > 0.0 && std::abs(s - constellation.point(m)) / reference < gamma)) {
                list.push_back(m);
            }
        }
    }
    return CandidateSet(std::move(lists));
}

double gamma_schedule(Snr snr, Modulation modulation) {
    switch (modulation) {
    case Modulation::qpsk:
        return std::min(snr.db() / 10.0 + 1.5, 3.0);
    case Modulation::qam16:
        return std::min(snr.db() / 10.0 + 1.3, 1.5);
    }
    return 1.0;
}

HammingWeights parse_hamming_weights(std::string_view name) {
    if (name == "llr") {
        return HammingWeights::llr;
    }
    if (name == "unweighted") {
        return HammingWeights::unweighted;
    }
    throw InvalidInput("unknown hamming weighting '" + std::string(name) + "'");
}

std::string_view to_string(HammingWeights w) {
    return w == HammingWeights::llr ? "llr" : "unweighted";
}

RealVector lift_symbols(const SymbolVector& v, const Constellation& constellation) {
    const auto users = static_cast<Eigen::Index>(v.size());
    RealVector x(2 * users);
    for (Eigen::Index k = 0; k < users; ++k) {
        const Complex p = constellation.point(v[static_cast<std::size_t>(k)]);
        x[k] = p.real();
        x[k + users] = p.imag();
    }
    return x;
}

double weighted_hamming_distance(const RealVector& y, FeaturesRef channel_rows, const RealVector& x,
                                 Snr snr, HammingWeights weights, LogCdfMode mode) {
    check_detection_shapes(y, channel_rows);
    const double scale = std::sqrt(2.0 * snr.linear());
    const RealVector t = channel_rows * x;
    double d = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        if (sign_of(t[i]) != y[i]) {
            d += hamming_weight(t[i], scale, weights, mode);
        }
    }
    return d;
}

SymbolVector weighted_hamming_select(const CandidateSet& candidates, const RealVector& y,
                                     FeaturesRef channel_rows, Snr snr,
                                     const SymbolVector& stage1, const Constellation& constellation,
                                     HammingWeights weights) {
    if (candidates.size() == 0) {
        throw InvalidInput("weighted_hamming_select: empty candidate set");
    }
    if (candidates.size() == 1) {
        return candidates.at(0);
    }
    const std::optional<std::size_t> anchor = candidates.index_of(stage1);
    std::size_t best = anchor.value_or(0);
    double best_d = weighted_hamming_distance(y, channel_rows, lift_symbols(candidates.at(best), constellation),
                                              snr, weights);
    for (std::size_t l = 0; l < candidates.size(); ++l) {
        if (anchor && l == *anchor) {
            continue;
        }
        const SymbolVector v = candidates.at(l);
        const double d =
            weighted_hamming_distance(y, channel_rows, lift_symbols(v, constellation), snr, weights);
        if (d < best_d) {
            best_d = d;
            best = l;
        }
    }
    return candidates.at(best);
}

double one_bit_log_likelihood(const RealVector& y, FeaturesRef channel_rows, const RealVector& x,
                              Snr snr, LogCdfMode mode) {
    check_detection_shapes(y, channel_rows);
    const double scale = std::sqrt(2.0 * snr.linear());
    const RealVector t = channel_rows * x;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        sum += log_normal_cdf(scale * y[i] * t[i], mode);
    }
    return sum;
}

SymbolVector ml_detect(const RealVector& y, FeaturesRef channel_rows, Snr snr,
                       const Constellation& constellation, LogCdfMode mode,
                       std::size_t max_candidates) {
    check_detection_shapes(y, channel_rows);
    const auto users = static_cast<int>(channel_rows.cols() / 2);
    const int m = constellation.size();
    double total = 1.0;
    for (int k = 0; k < users; ++k) {
        total *= m;
    }
    if (total > static_cast<double>(max_candidates)) {
        throw InvalidInput("ml_detect: M^K = " + std::to_string(total) + " exceeds the enumeration limit");
    }

    const Eigen::Index rows = channel_rows.rows();
    const double scale = std::sqrt(2.0 * snr.linear());
    // contribution[k][s] = y .* (H x) restricted to user k sending symbol s, pre-scaled.
    std::vector<std::vector<RealVector>> contribution(static_cast<std::size_t>(users));
    for (int k = 0; k < users; ++k) {
        auto& per_symbol = contribution[static_cast<std::size_t>(k)];
        for (int s = 0; s < m; ++s) {
            const Complex p = constellation.point(s);
            per_symbol.push_back(scale * y.cwiseProduct(p.real() * channel_rows.col(k) +
                                                        p.imag() * channel_rows.col(k + users)));
        }
    }

    // partial[k] holds the sum of the first k users' contributions.
    std::vector<RealVector> partial(static_cast<std::size_t>(users) + 1, RealVector::Zero(rows));
    SymbolVector digits(static_cast<std::size_t>(users), 0);
    for (int k = 0; k < users; ++k) {
        partial[static_cast<std::size_t>(k) + 1] =
            partial[static_cast<std::size_t>(k)] + contribution[static_cast<std::size_t>(k)][0];
    }

    SymbolVector best = digits;
    double best_score = -std::numeric_limits<double>::infinity();
    bool first = true;
    while (true) {
        const RealVector& t = partial[static_cast<std::size_t>(users)];
        double score = 0.0;
        for (Eigen::Index i = 0; i < rows; ++i) {
            score += log_normal_cdf(t[i], mode);
        }
        if (first || score > best_score) {
            best_score = score;
            best = digits;
            first = false;
        }
        int k = users - 1;
        while (k >= 0 && digits[static_cast<std::size_t>(k)] == m - 1) {
            digits[static_cast<std::size_t>(k)] = 0;
            --k;
        }
        if (k < 0) {
            break;
        }
        ++digits[static_cast<std::size_t>(k)];
        for (int j = k; j < users; ++j) {
            const auto uj = static_cast<std::size_t>(j);
            partial[uj + 1] = partial[uj] + contribution[uj][static_cast<std::size_t>(digits[uj])];
        }
    }
    return best;
}

DetectionResult detect_vector(const RealVector& y, FeaturesRef channel_rows,
                              const Constellation& constellation, Snr snr,
                              const TwoStageOptions& options) {
    DetectionResult out;
    out.stage1 = svm_detect_stage1(y, channel_rows, options.penalty, options.solver);
    if (out.stage1.flagged) {
        out.stage1_hard.assign(static_cast<std::size_t>(channel_rows.cols() / 2), 0);
    } else {
        out.stage1_hard = symbol_decide(out.stage1.soft, constellation);
    }
    if (!options.second_stage || out.stage1.flagged) {
        out.final = out.stage1_hard;
        out.candidate_cardinality = 1;
        return out;
    }
    const double gamma = options.gamma_override.value_or(gamma_schedule(snr, constellation.modulation()));
    out.candidates = build_candidates(out.stage1.soft, out.stage1_hard, gamma, constellation);
    out.candidate_cardinality = out.candidates->size();
    out.final = weighted_hamming_select(*out.candidates, y, channel_rows, snr, out.stage1_hard,
                                        constellation, options.weights);
    return out;
}

ComplexMatrix BlockDetection::symbols(const Constellation& constellation) const {
    ComplexMatrix out(indices.rows(), indices.cols());
    for (Eigen::Index c = 0; c < indices.cols(); ++c) {
        for (Eigen::Index r = 0; r < indices.rows(); ++r) {
            out(r, c) = constellation.point(indices(r, c));
        }
    }
    return out;
}

double BlockDetection::mean_cardinality() const {
    if (cardinalities.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const std::size_t c : cardinalities) {
        sum += static_cast<double>(c);
    }
    return sum / static_cast<double>(cardinalities.size());
}

BlockDetection two_stage_detect(const QuantizedMatrix& y, const ComplexMatrix& channel,
                                const Constellation& constellation, Snr snr,
                                const TwoStageOptions& options) {
    const DetRealForms forms = realify_det(y, channel);
    const RowMatrix rows = forms.H;
    BlockDetection out;
    out.indices.resize(channel.cols(), y.cols());
    out.cardinalities.reserve(static_cast<std::size_t>(y.cols()));
    for (Eigen::Index m = 0; m < y.cols(); ++m) {
        const RealVector column = forms.Y.col(m);
        const DetectionResult r = detect_vector(column, rows, constellation, snr, options);
        for (Eigen::Index k = 0; k < channel.cols(); ++k) {
            out.indices(k, m) = r.final[static_cast<std::size_t>(k)];
        }
        out.cardinalities.push_back(r.candidate_cardinality);
        out.flagged += r.stage1.flagged ? 1 : 0;
        out.unconverged += r.stage1.converged ? 0 : 1;
    }
    return out;
}

BlockDetection ml_detect_block(const QuantizedMatrix& y, const ComplexMatrix& channel,
                               const Constellation& constellation, Snr snr, LogCdfMode mode) {
    const DetRealForms forms = realify_det(y, channel);
    const RowMatrix rows = forms.H;
    BlockDetection out;
    out.indices.resize(channel.cols(), y.cols());
    for (Eigen::Index m = 0; m < y.cols(); ++m) {
        const RealVector column = forms.Y.col(m);
        const SymbolVector v = ml_detect(column, rows, snr, constellation, mode);
        for (Eigen::Index k = 0; k < channel.cols(); ++k) {
            out.indices(k, m) = v[static_cast<std::size_t>(k)];
        }
    }
    return out;
}

long count_bit_errors(const Eigen::MatrixXi& sent, const Eigen::MatrixXi& detected) {
    if (sent.rows() != detected.rows() || sent.cols() != detected.cols()) {
        throw InvalidInput("count_bit_errors: shapes differ");
    }
    long errors = 0;
    for (Eigen::Index c = 0; c < sent.cols(); ++c) {
        for (Eigen::Index r = 0; r < sent.rows(); ++r) {
            errors += Constellation::bit_errors(sent(r, c), detected(r, c));
        }
    }
    return errors;
}

} // namespace onebit

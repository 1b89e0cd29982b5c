#pragma once

// Data detection from one-bit observations.
//
// Per received slot the observation is y in {+-1}^{2N} (real parts over
// imaginary parts) and the channel is the 2N x 2K block lifting of H. The
// first stage solves a no-bias SVM whose weight vector is the transmitted
// real vector, rescales it to power K and slices each user independently.
// The second stage shortlists nearby symbols per user and searches their
// Cartesian product for the minimum weighted Hamming distance between y and
// the predicted sign pattern.

#include <cstddef>
#include <optional>
#include <vector>

#include "onebit/constellation.hpp"
#include "onebit/gaussian.hpp"
#include "onebit/lifting.hpp"
#include "onebit/svm.hpp"

namespace onebit {

/// Constellation indices, one per user.
using SymbolVector = std::vector<int>;

struct Stage1Result {
    RealVector soft;        // 2K, |soft|^2 = K unless flagged
    bool flagged = false;   // SVM returned the zero vector
    bool converged = true;
    int epochs = 0;
};

/// `channel_rows` is the 2N x 2K lifted channel estimate (rows are training points).
Stage1Result svm_detect_stage1(const RealVector& y, FeaturesRef channel_rows, double penalty = 1.0,
                               const SolverOptions& options = {});

/// Nearest symbol per user from the soft pairs (soft_k, soft_{k+K}).
SymbolVector symbol_decide(const RealVector& soft, const Constellation& constellation);

/// Cartesian product of per-user shortlists, enumerated in mixed radix with
/// user 0 as the most significant digit.
class CandidateSet {
public:
    explicit CandidateSet(std::vector<std::vector<int>> per_user);

    const std::vector<std::vector<int>>& per_user() const noexcept { return per_user_; }
    std::size_t size() const noexcept { return size_; }
    SymbolVector at(std::size_t l) const;
    /// Position of `v` in the enumeration, or nullopt if it is not a member.
    std::optional<std::size_t> index_of(const SymbolVector& v) const;

private:
    std::vector<std::vector<int>> per_user_;
    std::size_t size_ = 0;
};

/// Shortlist X_k = {x : |s_k - x| / |s_k - xcheck_k| < gamma} plus the sliced
/// symbol itself; s_k = soft_k + j soft_{k+K}. When s_k sits exactly on the
/// sliced symbol the shortlist is just that symbol.
CandidateSet build_candidates(const RealVector& soft, const SymbolVector& sliced, double gamma,
                              const Constellation& constellation);

/// gamma = min(rho_dB/10 + 1.5, 3) for QPSK, min(rho_dB/10 + 1.3, 1.5) for 16-QAM.
double gamma_schedule(Snr snr, Modulation modulation);

enum class HammingWeights { llr, unweighted };

HammingWeights parse_hamming_weights(std::string_view name);
std::string_view to_string(HammingWeights w);

/// Real 2K vector [Re x; Im x] for a vector of constellation indices.
RealVector lift_symbols(const SymbolVector& v, const Constellation& constellation);

/// Weighted Hamming distance between y and sign(H x) for the real vector x.
/// LLR weights: w_i = log Phi(s|t_i|) - log Phi(-s|t_i|), t = H x, s = sqrt(2 rho).
double weighted_hamming_distance(const RealVector& y, FeaturesRef channel_rows, const RealVector& x,
                                 Snr snr, HammingWeights weights,
                                 LogCdfMode mode = LogCdfMode::safeguarded);

/// argmin of the weighted Hamming distance over the candidate set. Ties go to
/// `stage1` when it attains the minimum, otherwise to the lowest index.
SymbolVector weighted_hamming_select(const CandidateSet& candidates, const RealVector& y,
                                     FeaturesRef channel_rows, Snr snr,
                                     const SymbolVector& stage1, const Constellation& constellation,
                                     HammingWeights weights = HammingWeights::llr);

/// One-bit log-likelihood sum_i log Phi(sqrt(2 rho) y_i h_i'x).
double one_bit_log_likelihood(const RealVector& y, FeaturesRef channel_rows, const RealVector& x,
                              Snr snr, LogCdfMode mode = LogCdfMode::safeguarded);

/// Exhaustive maximum-likelihood search over all M^K vectors (ties resolve to
/// the first vector in enumeration order). Throws InvalidInput if M^K exceeds
/// `max_candidates`.
SymbolVector ml_detect(const RealVector& y, FeaturesRef channel_rows, Snr snr,
                       const Constellation& constellation, LogCdfMode mode = LogCdfMode::safeguarded,
                       std::size_t max_candidates = std::size_t{1} << 20);

struct DetectionResult {
    Stage1Result stage1;
    SymbolVector stage1_hard;
    std::optional<CandidateSet> candidates;   // absent for stage-1-only detection
    SymbolVector final;
    std::size_t candidate_cardinality = 1;
};

struct TwoStageOptions {
    double penalty = 1.0;
    SolverOptions solver;
    std::optional<double> gamma_override;
    HammingWeights weights = HammingWeights::llr;
    bool second_stage = true;
};

/// Full pipeline for one received slot.
DetectionResult detect_vector(const RealVector& y, FeaturesRef channel_rows,
                              const Constellation& constellation, Snr snr,
                              const TwoStageOptions& options = {});

struct BlockDetection {
    Eigen::MatrixXi indices;                 // K x T detected constellation indices
    std::vector<std::size_t> cardinalities;  // |X| per slot
    int flagged = 0;                         // slots whose stage-1 solution was zero
    int unconverged = 0;

    ComplexMatrix symbols(const Constellation& constellation) const;
    double mean_cardinality() const;
};

/// Detects every column of the N x T quantized block with channel estimate H.
BlockDetection two_stage_detect(const QuantizedMatrix& y, const ComplexMatrix& channel,
                                const Constellation& constellation, Snr snr,
                                const TwoStageOptions& options = {});

BlockDetection ml_detect_block(const QuantizedMatrix& y, const ComplexMatrix& channel,
                               const Constellation& constellation, Snr snr,
                               LogCdfMode mode = LogCdfMode::safeguarded);

/// Bit errors between two K x T index blocks under the Gray labelling.
long count_bit_errors(const Eigen::MatrixXi& sent, const Eigen::MatrixXi& detected);

} // namespace onebit

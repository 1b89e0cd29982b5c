#pragma once

// SVM channel estimators for one-bit observations.
//
// Inputs use the side-by-side real forms produced by realify_ce(): Y is
// N x 2T (row i holds the labels seen by antenna i) and X is 2K x 2T (column
// n is a training point). The channel magnitude is not identifiable from
// signs, so every estimate is rescaled to the prior's expected power.

#include <vector>

#include "onebit/svm.hpp"
#include "onebit/types.hpp"

namespace onebit {

enum class NormConvention {
    per_row_sqrtK,   // |h_i|^2 = K for every antenna row
    global_sqrtKN,   // |H|_F^2 = K N
};

struct ChannelEstimate {
    ComplexMatrix H;                    // N x K
    std::vector<bool> converged;        // per antenna row
    std::vector<bool> flagged;          // row solution was zero; row left at zero
    NormConvention convention = NormConvention::per_row_sqrtK;
    std::vector<RealVector> row_duals;  // per-row dual variables (per-row solves only)
    long epochs = 0;                    // solver epochs summed over all solves

    int flagged_count() const;
    bool all_converged() const;
};

/// One independent no-bias SVM per antenna, each solution scaled to |h_i|^2 = K.
ChannelEstimate svm_ce_uncorrelated(const RealMatrix& y, const RealMatrix& x, double penalty = 1.0,
                                    const SolverOptions& options = {});

/// Real 2N x 2N lifting [Re C, -Im C; Im C, Re C] of each complex covariance.
std::vector<RealMatrix> lift_covariances(const std::vector<ComplexMatrix>& covariances);

/// Joint Mahalanobis-margin estimate of the whole channel, scaled to
/// |H|_F = sqrt(K N). `covariances` are the real 2N x 2N per-user blocks.
ChannelEstimate svm_ce_correlated(const RealMatrix& y, const RealMatrix& x,
                                  const MahalanobisSpec& covariances, double penalty = 1.0,
                                  const SolverOptions& options = {});

/// Re-estimates every antenna row from the pilot constraints plus the
/// detected-data constraints (y_data N x 2Td, x_data 2K x 2Td in the same
/// side-by-side layout). When `pilot_estimate` carries row duals they seed the
/// pilot part of the warm start; data duals start at zero.
ChannelEstimate joint_ce_dd_refine(const RealMatrix& y_pilot, const RealMatrix& x_pilot,
                                   const RealMatrix& y_data, const RealMatrix& x_data,
                                   double penalty = 1.0, const SolverOptions& options = {},
                                   const ChannelEstimate* pilot_estimate = nullptr);

/// |H_hat - H|_F^2 / (K N).
double normalized_squared_error(const ComplexMatrix& estimate, const ComplexMatrix& truth);

} // namespace onebit

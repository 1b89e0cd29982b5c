#pragma once

// Soft-margin linear SVM without a bias term.
//
//   minimize_w  1/2 |w|^2 + C sum_q max(0, 1 - y_q w'x_q)
//
// Solved in the dual (box constraints 0 <= a_q <= C, no equality constraint)
// by cyclic coordinate descent with a per-epoch permutation. The duality gap
// is evaluated after every epoch and the solve stops once it drops to `tol`.
//
// When more duals are free than there are features the coordinate steps
// crawl along the flat directions of the dual. Every few epochs the solver
// therefore takes a Newton step restricted to the current free set (conjugate
// gradients on its Gram matrix, shortened to stay inside the box) and keeps it
// only if the dual objective improves.

#include <cstdint>
#include <span>
#include <vector>

#include "onebit/types.hpp"

namespace onebit {

struct SolverOptions {
    double tol = 1e-6;          // duality-gap target
    int max_epochs = 10000;
    std::uint64_t seed = 0x9e3779b97f4a7c15ULL;  // drives the epoch permutations
    int polish_every = 10;      // epochs between free-set Newton steps; 0 disables them
};

struct SvmProblem {
    RowMatrix features;   // P x D, one training point per row
    RealVector labels;    // P entries in {-1, +1}
    double penalty = 1.0; // C

    /// Throws InvalidInput if labels are not +-1, C <= 0 or shapes disagree.
    void validate() const;
};

struct SvmSolution {
    RealVector weights;       // D
    RealVector duals;         // P, each in [0, C]
    double objective = 0.0;   // primal objective at `weights`
    double dual_objective = 0.0;
    double gap = 0.0;         // objective - dual_objective, always >= 0 up to rounding
    int iterations = 0;       // completed epochs
    bool converged = false;
};

using FeaturesRef = Eigen::Ref<const RowMatrix>;
using LabelsRef = Eigen::Ref<const RealVector>;

SvmSolution solve_soft_margin(const SvmProblem& problem, const SolverOptions& options = {});

/// Same solve over borrowed storage. `initial_duals`, when non-empty, must
/// hold P values; they are clipped into [0, C] and used as the starting point.
SvmSolution solve_soft_margin(FeaturesRef features, LabelsRef labels, double penalty,
                              const SolverOptions& options = {},
                              std::span<const double> initial_duals = {});

double primal_objective(FeaturesRef features, LabelsRef labels, double penalty,
                        const RealVector& weights);

/// Dual objective sum(a) - 1/2 |sum_q a_q y_q x_q|^2.
double dual_objective(FeaturesRef features, LabelsRef labels, const RealVector& duals);

// ---------------------------------------------------------------------------
// Mahalanobis-margin joint problem
//
// The unknown is a complex N x K matrix. Column k, stacked as [Re; Im] (2N
// reals), is penalized by h_k' C_k^-1 h_k, while each hinge constraint acts on
// one row i of the matrix: y (Re h_i)'x_re + (Im h_i)'x_im style products with
// a 2K-dimensional point x. Whitening u_k = C_k^{-1/2} h_k turns the problem
// into a standard no-bias SVM in the 2NK joint coordinates.

class MahalanobisSpec {
public:
    /// Each block must be a symmetric positive (semi)definite 2N x 2N matrix.
    /// Eigenvalues below 1e-10 * lambda_max are floored to that level; blocks
    /// that are asymmetric or have materially negative eigenvalues throw.
    static MahalanobisSpec from_covariances(std::vector<RealMatrix> blocks);

    int users() const noexcept { return static_cast<int>(covariances_.size()); }
    int antennas() const noexcept { return antennas_; }

    const RealMatrix& covariance(int k) const { return covariances_.at(k); }
    /// Symmetric square root of the (floored) covariance of user k.
    const RealMatrix& whitening(int k) const { return roots_.at(k); }

    /// Position of (user k, real-or-imaginary antenna index r) in the joint
    /// weight vector; r < N addresses Re h_{r,k}, r >= N addresses Im h_{r-N,k}.
    Eigen::Index joint_index(int k, int r) const noexcept {
        return static_cast<Eigen::Index>(k) * 2 * antennas_ + r;
    }

private:
    std::vector<RealMatrix> covariances_;
    std::vector<RealMatrix> roots_;
    int antennas_ = 0;
};

/// Hinge constraints y_q * h_{antenna_q}' x_q >= 1 - xi_q, where h_i is the
/// side-by-side real form [Re H(i,:), Im H(i,:)] of row i.
struct MahalanobisConstraints {
    RowMatrix points;               // P x 2K
    RealVector labels;              // P
    std::vector<int> antennas;      // P row indices into H
};

struct MahalanobisSolution {
    ComplexMatrix channel;  // N x K minimizer
    RealVector joint;       // 2NK, column blocks [Re h_k; Im h_k]
    SvmSolution whitened;   // solver report in whitened coordinates
};

MahalanobisSolution solve_mahalanobis_margin(const MahalanobisConstraints& constraints,
                                             const MahalanobisSpec& spec, double penalty,
                                             const SolverOptions& options = {});

} // namespace onebit

#include "onebit/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "onebit/lifting.hpp"

namespace onebit {

namespace {

// Returns false (and leaves `row` untouched) for a zero solution.
bool scale_to_norm(RealVector& row, double squared_norm) {
    const double norm = row.norm();
    if (!(norm > 0.0)) {
        return false;
    }
    row *= std::sqrt(squared_norm) / norm;
    return true;
}

void check_ce_shapes(const RealMatrix& y, const RealMatrix& x, const char* what) {
    if (y.cols() != x.cols()) {
        throw InvalidInput(std::string(what) + ": labels have " + std::to_string(y.cols()) +
                           " columns but there are " + std::to_string(x.cols()) + " points");
    }
    if (x.rows() % 2 != 0 || x.rows() == 0) {
        throw InvalidInput(std::string(what) + ": points must have 2K rows");
    }
}

ChannelEstimate per_row_estimate(const RowMatrix& points, const RealMatrix& labels, double penalty,
                                 const SolverOptions& options, const ChannelEstimate* warm,
                                 Eigen::Index warm_length) {
    const Eigen::Index n = labels.rows();
    const Eigen::Index dim = points.cols();
    const double users = static_cast<double>(dim / 2);

    ChannelEstimate out;
    out.convention = NormConvention::per_row_sqrtK;
    out.converged.assign(static_cast<std::size_t>(n), false);
    out.flagged.assign(static_cast<std::size_t>(n), false);
    out.row_duals.resize(static_cast<std::size_t>(n));
    RealMatrix rows(n, dim);

    const bool use_warm = warm != nullptr && static_cast<Eigen::Index>(warm->row_duals.size()) == n;
    RealVector start;
    for (Eigen::Index i = 0; i < n; ++i) {
        const RealVector label_row = labels.row(i).transpose();
        std::span<const double> init;
        if (use_warm) {
            const RealVector& prev = warm->row_duals[static_cast<std::size_t>(i)];
            start = RealVector::Zero(points.rows());
            start.head(std::min(warm_length, prev.size())) = prev.head(std::min(warm_length, prev.size()));
            init = std::span<const double>(start.data(), static_cast<std::size_t>(start.size()));
        }
        SvmSolution sol = solve_soft_margin(points, label_row, penalty, options, init);
        const auto idx = static_cast<std::size_t>(i);
        out.converged[idx] = sol.converged;
        out.epochs += sol.iterations;
        if (!scale_to_norm(sol.weights, users)) {
            out.flagged[idx] = true;
            sol.weights.setZero();
        }
        rows.row(i) = sol.weights.transpose();
        out.row_duals[idx] = std::move(sol.duals);
    }
    out.H = from_side_by_side(rows);
    return out;
}

} // namespace

int ChannelEstimate::flagged_count() const {
    return static_cast<int>(std::count(flagged.begin(), flagged.end(), true));
}

bool ChannelEstimate::all_converged() const {
    return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
}

ChannelEstimate svm_ce_uncorrelated(const RealMatrix& y, const RealMatrix& x, double penalty,
                                    const SolverOptions& options) {
    check_ce_shapes(y, x, "svm_ce_uncorrelated");
    const RowMatrix points = x.transpose();
    return per_row_estimate(points, y, penalty, options, nullptr, 0);
}

std::vector<RealMatrix> lift_covariances(const std::vector<ComplexMatrix>& covariances) {
    std::vector<RealMatrix> out;
    out.reserve(covariances.size());
    for (const auto& c : covariances) {
        out.push_back(block_lift(c));
    }
    return out;
}

ChannelEstimate svm_ce_correlated(const RealMatrix& y, const RealMatrix& x,
                                  const MahalanobisSpec& covariances, double penalty,
                                  const SolverOptions& options) {
    check_ce_shapes(y, x, "svm_ce_correlated");
    const Eigen::Index n = y.rows();
    const Eigen::Index count = x.cols();
    if (covariances.antennas() != n || 2 * covariances.users() != x.rows()) {
        throw InvalidInput("svm_ce_correlated: covariance blocks do not match N and K");
    }

    MahalanobisConstraints constraints;
    constraints.points.resize(n * count, x.rows());
    constraints.labels.resize(n * count);
    constraints.antennas.resize(static_cast<std::size_t>(n * count));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index q = 0; q < count; ++q) {
            const Eigen::Index row = i * count + q;
            constraints.points.row(row) = x.col(q).transpose();
            constraints.labels[row] = y(i, q);
            constraints.antennas[static_cast<std::size_t>(row)] = static_cast<int>(i);
        }
    }

    MahalanobisSolution sol = solve_mahalanobis_margin(constraints, covariances, penalty, options);

    ChannelEstimate out;
    out.convention = NormConvention::global_sqrtKN;
    out.converged.assign(static_cast<std::size_t>(n), sol.whitened.converged);
    out.flagged.assign(static_cast<std::size_t>(n), false);
    out.epochs = sol.whitened.iterations;
    const double norm = sol.channel.norm();
    if (norm > 0.0) {
        const double target = std::sqrt(static_cast<double>(n * covariances.users()));
        out.H = sol.channel * (target / norm);
    } else {
        out.H = ComplexMatrix::Zero(n, covariances.users());
        out.flagged.assign(static_cast<std::size_t>(n), true);
    }
    return out;
}

ChannelEstimate joint_ce_dd_refine(const RealMatrix& y_pilot, const RealMatrix& x_pilot,
                                   const RealMatrix& y_data, const RealMatrix& x_data,
                                   double penalty, const SolverOptions& options,
                                   const ChannelEstimate* pilot_estimate) {
    check_ce_shapes(y_pilot, x_pilot, "joint_ce_dd_refine");
    check_ce_shapes(y_data, x_data, "joint_ce_dd_refine");
    if (y_pilot.rows() != y_data.rows() || x_pilot.rows() != x_data.rows()) {
        throw InvalidInput("joint_ce_dd_refine: pilot and data blocks disagree on N or K");
    }
    const Eigen::Index pilots = x_pilot.cols();
    RowMatrix points(pilots + x_data.cols(), x_pilot.rows());
    points.topRows(pilots) = x_pilot.transpose();
    points.bottomRows(x_data.cols()) = x_data.transpose();

    RealMatrix labels(y_pilot.rows(), pilots + y_data.cols());
    labels << y_pilot, y_data;
    return per_row_estimate(points, labels, penalty, options, pilot_estimate, pilots);
}

double normalized_squared_error(const ComplexMatrix& estimate, const ComplexMatrix& truth) {
    if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
        throw InvalidInput("nmse: shapes differ");
    }
    return (estimate - truth).squaredNorm() / static_cast<double>(truth.size());
}

} // namespace onebit

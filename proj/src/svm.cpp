#include "onebit/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

namespace onebit {

namespace {

void check_inputs(FeaturesRef features, LabelsRef labels, double penalty) {
    if (features.rows() != labels.size()) {
        throw InvalidInput("svm: " + std::to_string(features.rows()) + " points but " +
                           std::to_string(labels.size()) + " labels");
    }
    if (!(penalty > 0.0) || !std::isfinite(penalty)) {
        throw InvalidInput("svm: penalty C must be positive and finite");
    }
    for (Eigen::Index q = 0; q < labels.size(); ++q) {
        if (labels[q] != 1.0 && labels[q] != -1.0) {
            throw InvalidInput("svm: label " + std::to_string(q) + " is not +-1");
        }
    }
}

inline double dot(const double* a, const double* b, Eigen::Index n) {
    return Eigen::Map<const RealVector>(a, n).dot(Eigen::Map<const RealVector>(b, n));
}

inline void axpy(double alpha, const double* x, double* y, Eigen::Index n) {
    Eigen::Map<RealVector>(y, n) += alpha * Eigen::Map<const RealVector>(x, n);
}

RealVector weights_from_duals(FeaturesRef features, LabelsRef labels, const RealVector& duals) {
    RealVector w = RealVector::Zero(features.cols());
    for (Eigen::Index q = 0; q < features.rows(); ++q) {
        if (duals[q] != 0.0) {
            axpy(duals[q] * labels[q], features.row(q).data(), w.data(), features.cols());
        }
    }
    return w;
}

struct GapReport {
    double primal;
    double dual;
};

GapReport evaluate(FeaturesRef features, LabelsRef labels, double penalty, const RealVector& w,
                   const RealVector& duals, RealVector* margins = nullptr) {
    const Eigen::Index dim = features.cols();
    double hinge = 0.0;
    for (Eigen::Index q = 0; q < features.rows(); ++q) {
        const double margin = labels[q] * dot(features.row(q).data(), w.data(), dim);
        hinge += std::max(0.0, 1.0 - margin);
        if (margins) {
            (*margins)[q] = margin;
        }
    }
    const double half_norm = 0.5 * w.squaredNorm();
    return {half_norm + penalty * hinge, duals.sum() - half_norm};
}

// Newton step on the face {a_q free}: solves Q_FF d = r (r_q = 1 - y_q w'x_q)
// by conjugate gradients from d = 0, which for a consistent singular system
// yields the minimum-norm solution. Returns true if the duals moved.
bool polish_free_set(FeaturesRef features, LabelsRef labels, double penalty, RealVector& duals,
                     RealVector& w) {
    const Eigen::Index dim = features.cols();
    std::vector<Eigen::Index> free;
    for (Eigen::Index q = 0; q < duals.size(); ++q) {
        if (duals[q] > 0.0 && duals[q] < penalty) {
            free.push_back(q);
        }
    }
    if (free.empty()) {
        return false;
    }
    const auto f = static_cast<Eigen::Index>(free.size());

    // A_F' v and A_F z with rows y_q x_q.
    auto spread = [&](const RealVector& v, RealVector& z) {
        z.setZero(dim);
        for (Eigen::Index j = 0; j < f; ++j) {
            axpy(v[j] * labels[free[j]], features.row(free[j]).data(), z.data(), dim);
        }
    };
    auto gather = [&](const RealVector& z, RealVector& out) {
        for (Eigen::Index j = 0; j < f; ++j) {
            out[j] = labels[free[j]] * dot(features.row(free[j]).data(), z.data(), dim);
        }
    };

    RealVector r(f);
    gather(w, r);
    r = RealVector::Ones(f) - r;

    RealVector step = RealVector::Zero(f);
    RealVector res = r;
    RealVector dir = r;
    RealVector z(dim);
    RealVector q_dir(f);
    double rs = res.squaredNorm();
    const double rs0 = rs;
    if (!(rs0 > 0.0)) {
        return false;
    }
    // Partial CG iterates still improve the face quadratic, so the cap only
    // trades step quality for cost on large free sets.
    const Eigen::Index max_iter = std::min<Eigen::Index>({f, dim, Eigen::Index{50}}) + 10;
    for (Eigen::Index it = 0; it < max_iter; ++it) {
        spread(dir, z);
        gather(z, q_dir);
        const double curvature = dir.dot(q_dir);
        if (!(curvature > 1e-300)) {
            break;
        }
        const double a = rs / curvature;
        step += a * dir;
        res -= a * q_dir;
        const double next = res.squaredNorm();
        if (next <= 1e-28 * rs0) {
            break;
        }
        dir = res + (next / rs) * dir;
        rs = next;
    }

    double t = 1.0;
    for (Eigen::Index j = 0; j < f; ++j) {
        const double a = duals[free[j]];
        if (step[j] > 0.0) {
            t = std::min(t, (penalty - a) / step[j]);
        } else if (step[j] < 0.0) {
            t = std::min(t, -a / step[j]);
        }
    }
    if (!(t > 0.0)) {
        return false;
    }
    step *= t;
    spread(step, z);
    // Change of the dual objective along the step; reject non-improving ones.
    if (!(step.dot(r) - 0.5 * z.squaredNorm() > 0.0)) {
        return false;
    }
    for (Eigen::Index j = 0; j < f; ++j) {
        duals[free[j]] = std::clamp(duals[free[j]] + step[j], 0.0, penalty);
    }
    w = weights_from_duals(features, labels, duals);
    return true;
}

} // namespace

void SvmProblem::validate() const {
    check_inputs(features, labels, penalty);
}

double primal_objective(FeaturesRef features, LabelsRef labels, double penalty,
                        const RealVector& weights) {
    check_inputs(features, labels, penalty);
    double hinge = 0.0;
    for (Eigen::Index q = 0; q < features.rows(); ++q) {
        hinge += std::max(0.0, 1.0 - labels[q] * features.row(q).dot(weights));
    }
    return 0.5 * weights.squaredNorm() + penalty * hinge;
}

double dual_objective(FeaturesRef features, LabelsRef labels, const RealVector& duals) {
    const RealVector w = weights_from_duals(features, labels, duals);
    return duals.sum() - 0.5 * w.squaredNorm();
}

SvmSolution solve_soft_margin(const SvmProblem& problem, const SolverOptions& options) {
    return solve_soft_margin(problem.features, problem.labels, problem.penalty, options);
}

SvmSolution solve_soft_margin(FeaturesRef features, LabelsRef labels, double penalty,
                              const SolverOptions& options,
                              std::span<const double> initial_duals) {
    check_inputs(features, labels, penalty);
    if (!(options.tol > 0.0)) {
        throw InvalidInput("svm: tolerance must be positive");
    }
    const Eigen::Index count = features.rows();
    const Eigen::Index dim = features.cols();

    RealVector duals = RealVector::Zero(count);
    if (!initial_duals.empty()) {
        if (static_cast<Eigen::Index>(initial_duals.size()) != count) {
            throw InvalidInput("svm: warm start has " + std::to_string(initial_duals.size()) +
                               " duals for " + std::to_string(count) + " points");
        }
        for (Eigen::Index q = 0; q < count; ++q) {
            duals[q] = std::clamp(initial_duals[q], 0.0, penalty);
        }
    }

    RealVector diag(count);
    for (Eigen::Index q = 0; q < count; ++q) {
        diag[q] = features.row(q).squaredNorm();
    }

    RealVector w = weights_from_duals(features, labels, duals);
    SvmSolution out;

    RealVector margins(count);
    GapReport report = evaluate(features, labels, penalty, w, duals, &margins);
    out.converged = report.primal - report.dual <= options.tol;

    std::vector<Eigen::Index> order;
    order.reserve(static_cast<std::size_t>(count));
    std::mt19937_64 rng(options.seed);

    int epoch = 0;
    while (!out.converged && epoch < options.max_epochs) {
        // A dual held at its bound by the current margin would take a zero
        // step, so the epoch visits only the remaining points.
        order.clear();
        for (Eigen::Index q = 0; q < count; ++q) {
            const bool idle = (duals[q] == 0.0 && margins[q] > 1.0) ||
                              (duals[q] == penalty && margins[q] < 1.0);
            if (!idle) {
                order.push_back(q);
            }
        }
        std::shuffle(order.begin(), order.end(), rng);
        for (const Eigen::Index q : order) {
            const double* x = features.row(q).data();
            const double grad = labels[q] * dot(x, w.data(), dim) - 1.0;
            const double next = diag[q] > 0.0
                                    ? std::clamp(duals[q] - grad / diag[q], 0.0, penalty)
                                    : penalty;
            const double step = next - duals[q];
            if (step != 0.0) {
                duals[q] = next;
                axpy(step * labels[q], x, w.data(), dim);
            }
        }
        ++epoch;
        report = evaluate(features, labels, penalty, w, duals, &margins);
        out.converged = report.primal - report.dual <= options.tol;
        if (!out.converged && options.polish_every > 0 && epoch % options.polish_every == 0 &&
            polish_free_set(features, labels, penalty, duals, w)) {
            report = evaluate(features, labels, penalty, w, duals, &margins);
            out.converged = report.primal - report.dual <= options.tol;
        }
    }

    // Rebuild w from the duals so that stationarity holds exactly on output.
    w = weights_from_duals(features, labels, duals);
    report = evaluate(features, labels, penalty, w, duals);

    out.weights = std::move(w);
    out.duals = std::move(duals);
    out.objective = report.primal;
    out.dual_objective = report.dual;
    out.gap = report.primal - report.dual;
    out.iterations = epoch;
    return out;
}

MahalanobisSpec MahalanobisSpec::from_covariances(std::vector<RealMatrix> blocks) {
    if (blocks.empty()) {
        throw InvalidInput("mahalanobis: need at least one covariance block");
    }
    const Eigen::Index size = blocks.front().rows();
    if (size == 0 || size % 2 != 0) {
        throw InvalidInput("mahalanobis: covariance blocks must be 2N x 2N");
    }

    MahalanobisSpec spec;
    spec.antennas_ = static_cast<int>(size / 2);
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const RealMatrix& c = blocks[k];
        const std::string tag = "mahalanobis: block " + std::to_string(k);
        if (c.rows() != size || c.cols() != size) {
            throw InvalidInput(tag + " has the wrong shape");
        }
        const double scale = c.cwiseAbs().maxCoeff();
        if (!(scale > 0.0) || (c - c.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
            throw InvalidInput(tag + " is not symmetric");
        }
        Eigen::SelfAdjointEigenSolver<RealMatrix> eig(0.5 * (c + c.transpose()));
        RealVector lambda = eig.eigenvalues();
        const double top = lambda.maxCoeff();
        if (!(top > 0.0) || lambda.minCoeff() < -1e-8 * top) {
            throw InvalidInput(tag + " is not positive semidefinite");
        }
        const double floor = 1e-10 * top;
        lambda = lambda.cwiseMax(floor);
        RealMatrix root = eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal() *
                          eig.eigenvectors().transpose();
        spec.roots_.push_back(0.5 * (root + root.transpose()));
        spec.covariances_.push_back(c);
    }
    return spec;
}

MahalanobisSolution solve_mahalanobis_margin(const MahalanobisConstraints& constraints,
                                             const MahalanobisSpec& spec, double penalty,
                                             const SolverOptions& options) {
    const int users = spec.users();
    const int n = spec.antennas();
    const Eigen::Index count = constraints.points.rows();
    if (constraints.points.cols() != 2 * users) {
        throw InvalidInput("mahalanobis: points must have 2K = " + std::to_string(2 * users) +
                           " columns");
    }
    if (static_cast<Eigen::Index>(constraints.antennas.size()) != count ||
        constraints.labels.size() != count) {
        throw InvalidInput("mahalanobis: points, labels and antenna indices disagree in length");
    }

    const Eigen::Index joint_dim = static_cast<Eigen::Index>(2) * n * users;
    RowMatrix whitened(count, joint_dim);
    for (Eigen::Index q = 0; q < count; ++q) {
        const int i = constraints.antennas[static_cast<std::size_t>(q)];
        if (i < 0 || i >= n) {
            throw InvalidInput("mahalanobis: antenna index " + std::to_string(i) + " out of range");
        }
        for (int k = 0; k < users; ++k) {
            const RealMatrix& root = spec.whitening(k);
            const double re = constraints.points(q, k);
            const double im = constraints.points(q, users + k);
            whitened.row(q).segment(spec.joint_index(k, 0), 2 * n) =
                (re * root.col(i) + im * root.col(n + i)).transpose();
        }
    }

    MahalanobisSolution out;
    out.whitened = solve_soft_margin(whitened, constraints.labels, penalty, options);

    out.joint.resize(joint_dim);
    out.channel.resize(n, users);
    for (int k = 0; k < users; ++k) {
        const auto u = out.whitened.weights.segment(spec.joint_index(k, 0), 2 * n);
        const RealVector h = spec.whitening(k) * u;
        out.joint.segment(spec.joint_index(k, 0), 2 * n) = h;
        out.channel.col(k).real() = h.head(n);
        out.channel.col(k).imag() = h.tail(n);
    }
    return out;
}

} // namespace onebit

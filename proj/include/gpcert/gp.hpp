#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpcert/dataset.hpp"
#include "gpcert/errors.hpp"
#include "gpcert/kernel.hpp"

namespace gpcert {

/// Gaussian predictive law at a query point.
struct PredictiveDistribution {
    double mean{0.0};
    double variance{0.0}; ///< clamped to [0, theta1]
};

inline double default_jitter(const KernelSpec& kernel) {
    return 1e-10 * kernel.theta1;
}

namespace detail {

/// In-place lower Cholesky of a symmetric matrix. Hand-rolled so a failed
/// pivot can be reported by index; Eigen's LLT only reports success/failure.
inline Matrix cholesky_lower(const Matrix& a) {
    const Eigen::Index n = a.rows();
    Matrix l = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (Eigen::Index k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > 0.0) || !std::isfinite(diag))
            throw SingularGramError("gram matrix not positive definite at pivot " +
                                        std::to_string(j),
                                    static_cast<int>(j));
        l(j, j) = std::sqrt(diag);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double v = a(i, j);
            for (Eigen::Index k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v / l(j, j);
        }
    }
    return l;
}

inline Matrix gram_matrix(const Matrix& points, const KernelSpec& kernel) {
    const Eigen::Index n = points.rows();
    Matrix k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = kernel.theta1;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = kernel_eval(kernel, points.row(i).transpose(),
                                         points.row(j).transpose());
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

} // namespace detail

/// Noise-free GP regressor fitted on a labeled dataset. Immutable after
/// construction; predict() is const and safe to call concurrently.
class GpModel {
public:
    GpModel(LabeledDataset dataset, KernelSpec kernel, double jitter)
        : dataset_(std::move(dataset)), kernel_(kernel), jitter_(jitter) {
        dataset_.validate();
        if (jitter_ < 0.0 || !std::isfinite(jitter_))
            throw DomainError("jitter must be nonnegative");
        Matrix k = detail::gram_matrix(dataset_.points, kernel_);
        k.diagonal().array() += jitter_;
        chol_ = detail::cholesky_lower(k);
        Vector y(dataset_.size());
        for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = dataset_.labels[i];
        // alpha = (K + jitter I)^-1 y via two triangular solves; no inverse formed.
        alpha_ = chol_.triangularView<Eigen::Lower>().solve(y);
        chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(alpha_);
    }

    GpModel(const GpModel& other)
        : dataset_(other.dataset_), kernel_(other.kernel_), jitter_(other.jitter_),
          chol_(other.chol_), alpha_(other.alpha_),
          clamp_events_(other.clamp_events_.load()) {}

    GpModel& operator=(const GpModel& other) {
        if (this != &other) {
            dataset_ = other.dataset_;
            kernel_ = other.kernel_;
            jitter_ = other.jitter_;
            chol_ = other.chol_;
            alpha_ = other.alpha_;
            clamp_events_.store(other.clamp_events_.load());
        }
        return *this;
    }

    const LabeledDataset& dataset() const { return dataset_; }
    const KernelSpec& kernel() const { return kernel_; }
    double jitter() const { return jitter_; }
    const Matrix& cholesky_factor() const { return chol_; }

    /// Number of predictions whose raw variance fell outside [0, theta1]
    /// and was clamped.
    std::uint64_t clamp_events() const { return clamp_events_.load(); }

    PredictiveDistribution predict(const Vector& query) const {
        if (query.size() != dataset_.dim())
            throw DimensionError("query dimension " + std::to_string(query.size()) +
                                 " does not match dataset dimension " +
                                 std::to_string(dataset_.dim()));
        const Eigen::Index n = dataset_.size();
        Vector kvec(n);
        for (Eigen::Index i = 0; i < n; ++i)
            kvec[i] = kernel_eval(kernel_, dataset_.point(i), query);
        PredictiveDistribution out;
        out.mean = kvec.dot(alpha_);
        const Vector v = chol_.triangularView<Eigen::Lower>().solve(kvec);
        double var = kernel_.theta1 - v.squaredNorm();
        if (var < 0.0 || var > kernel_.theta1) {
            clamp_events_.fetch_add(1, std::memory_order_relaxed);
            var = std::clamp(var, 0.0, kernel_.theta1);
        }
        out.variance = var;
        return out;
    }

private:
    LabeledDataset dataset_;
    KernelSpec kernel_;
    double jitter_;
    Matrix chol_;
    Vector alpha_;
    mutable std::atomic<std::uint64_t> clamp_events_{0};
};

inline GpModel fit(LabeledDataset dataset, const KernelSpec& kernel, double jitter) {
    return GpModel(std::move(dataset), kernel, jitter);
}

/// Closed-form predictive law of the regressor trained on just
/// {(x_plus,+1), (x_minus,-1)}, evaluated without any matrix solve:
///   mean = (k(x+,q) - k(x-,q)) / (theta1 - k(x+,x-))
///   var  = theta1 - [theta1 (a^2 + b^2) - 2 s a b] / (theta1^2 - s^2)
/// with a = k(x+,q), b = k(x-,q), s = k(x+,x-).
inline PredictiveDistribution two_point_predict(const Vector& x_plus,
                                                const Vector& x_minus,
                                                const Vector& query,
                                                const KernelSpec& kernel) {
    const double s = kernel_eval(kernel, x_plus, x_minus);
    const double t1 = kernel.theta1;
    if (!(s < t1))
        throw DegeneratePairError("two-point pair coincides (k(x+,x-) = theta1)");
    const double a = kernel_eval(kernel, x_plus, query);
    const double b = kernel_eval(kernel, x_minus, query);
    PredictiveDistribution out;
    out.mean = (a - b) / (t1 - s);
    double var = t1 - (t1 * (a * a + b * b) - 2.0 * s * a * b) / (t1 * t1 - s * s);
    out.variance = std::clamp(var, 0.0, t1);
    return out;
}

/// Predictive variance at `query` using the first n points, for n = 1..N,
/// with jitter 0. Each prefix strictly shrinks the variance; the property
/// suites check the sequence is decreasing.
inline std::vector<double> variance_monotonicity_probe(const LabeledDataset& dataset,
                                                       const KernelSpec& kernel,
                                                       const Vector& query) {
    dataset.validate();
    if (query.size() != dataset.dim())
        throw DimensionError("query dimension does not match dataset");
    std::vector<double> variances;
    variances.reserve(static_cast<std::size_t>(dataset.size()));
    for (Eigen::Index n = 1; n <= dataset.size(); ++n) {
        Matrix k = detail::gram_matrix(dataset.points.topRows(n), kernel);
        Matrix l = detail::cholesky_lower(k);
        Vector kvec(n);
        for (Eigen::Index i = 0; i < n; ++i)
            kvec[i] = kernel_eval(kernel, dataset.point(i), query);
        const Vector v = l.triangularView<Eigen::Lower>().solve(kvec);
        variances.push_back(std::clamp(kernel.theta1 - v.squaredNorm(), 0.0, kernel.theta1));
    }
    return variances;
}

} // namespace gpcert

#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "gpcert/errors.hpp"

namespace gpcert {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Supported radial kernel families. Deliberately an enumeration rather than
/// a plugin interface: the worst-case construction in bounds.hpp is derived
/// per family, and a new family must ship its own radial inverse and
/// maximizer rule before certificates for it can be trusted.
enum class KernelFamily {
    gaussian,
};

/// Translation-invariant radial kernel with k(x,x) = theta1 for every x and
/// value strictly decreasing in the distance between the inputs.
struct KernelSpec {
    KernelFamily family{KernelFamily::gaussian};
    double theta1{1.0}; ///< output scale; the kernel's self-similarity
    double theta2{1.0}; ///< squared length scale in input-distance units
};

inline KernelSpec make_gaussian_kernel(double theta1, double theta2) {
    if (!(theta1 > 0.0) || !std::isfinite(theta1))
        throw DomainError("theta1 must be positive, got " + std::to_string(theta1));
    if (!(theta2 > 0.0) || !std::isfinite(theta2))
        throw DomainError("theta2 must be positive, got " + std::to_string(theta2));
    return KernelSpec{KernelFamily::gaussian, theta1, theta2};
}

/// Squared Euclidean distance with Neumaier-compensated accumulation so the
/// coordinate sum stays accurate in very high dimensions. The bound is
/// exponentially sensitive to this quantity.
inline double squared_distance(const Vector& x, const Vector& y) {
    if (x.size() != y.size())
        throw DimensionError("point dimensions differ: " + std::to_string(x.size()) +
                             " vs " + std::to_string(y.size()));
    double sum = 0.0;
    double comp = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        const double term = d * d;
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    return sum + comp;
}

inline double point_distance(const Vector& x, const Vector& y) {
    return std::sqrt(squared_distance(x, y));
}

/// Kernel value as a function of squared distance only (radial form).
inline double kernel_at_squared_distance(const KernelSpec& spec, double d2) {
    return spec.theta1 * std::exp(-d2 / spec.theta2);
}

inline double kernel_at_distance(const KernelSpec& spec, double d) {
    return kernel_at_squared_distance(spec, d * d);
}

/// k(x,y) = theta1 * exp(-||x-y||^2 / theta2).
inline double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& y) {
    return kernel_at_squared_distance(spec, squared_distance(x, y));
}

/// Radial inverse: the distance d at which the kernel takes `value`.
/// Defined for value in (0, theta1]; d = sqrt(theta2 * ln(theta1 / value)).
inline double kernel_inverse_distance(const KernelSpec& spec, double value) {
    if (!(value > 0.0) || value > spec.theta1 || !std::isfinite(value))
        throw DomainError("kernel value " + std::to_string(value) +
                          " outside (0, theta1] with theta1 = " + std::to_string(spec.theta1));
    return std::sqrt(spec.theta2 * std::log(spec.theta1 / value));
}

} // namespace gpcert

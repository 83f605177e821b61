#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gpcert/dataset.hpp"
#include "gpcert/errors.hpp"
#include "gpcert/kernel.hpp"
#include "gpcert/normal.hpp"

namespace gpcert {

/// One +1-labeled and one -1-labeled training point, with their kernel
/// similarity s and Euclidean distance. Indices are carried when the pair
/// came out of a dataset scan, -1 otherwise.
struct CrossPair {
    Vector x_plus;
    Vector x_minus;
    double s{0.0};        ///< k(x_plus, x_minus)
    double distance{0.0}; ///< ||x_plus - x_minus||
    int index_plus{-1};
    int index_minus{-1};
};

inline CrossPair make_cross_pair(Vector x_plus, Vector x_minus, const KernelSpec& kernel,
                                 int index_plus = -1, int index_minus = -1) {
    CrossPair pair;
    pair.distance = point_distance(x_plus, x_minus);
    if (!(pair.distance > 0.0))
        throw DegeneratePairError("cross pair points coincide");
    pair.s = kernel_at_distance(kernel, pair.distance);
    // Gram positivity for distinct points: k(x,x) k(x',x') > k(x,x')^2.
    if (!(pair.s < kernel.theta1))
        throw DegeneratePairError("cross pair similarity reached theta1; points not distinct");
    pair.x_plus = std::move(x_plus);
    pair.x_minus = std::move(x_minus);
    pair.index_plus = index_plus;
    pair.index_minus = index_minus;
    return pair;
}

/// Largest value k(x_minus, x) can take over the sphere { x : k(x_plus,x) = r }.
/// For a radial, strictly decreasing kernel the maximizer is collinear with
/// the pair, so the extremal distance from x_minus is |d_s - d_r| where
/// d_r is the sphere radius and d_s the pair distance. At d_r = d_s the
/// sphere passes through x_minus and the value caps at theta1.
inline double worst_case_enemy_similarity(const CrossPair& pair, double r,
                                          const KernelSpec& kernel) {
    if (!(r > 0.0) || !(r < kernel.theta1) || !std::isfinite(r))
        throw DomainError("r must lie in (0, theta1), got " + std::to_string(r));
    const double d_r = kernel_inverse_distance(kernel, r);
    return kernel_at_distance(kernel, std::abs(pair.distance - d_r));
}

/// Certificate for perturbations of x_plus at kernel similarity r: the exact
/// Gaussian tail and its exponential relaxation, both computed against the
/// worst-case point on the r-sphere. `valid` records the applicability
/// conditions (perturbation smaller than the pair distance, positive mean);
/// when it is false the probabilities are still reported but do not certify.
struct MspCertificate {
    double r{0.0};
    double epsilon{0.0};
    double theta1{0.0};
    double theta_s{0.0};
    double theta_r1{0.0};
    double theta_r2{0.0};
    double mu{0.0};
    double sigma2{0.0};
    bool sigma_floored{false};
    double exact_tail{0.0}; ///< Phi(-mu / sigma)
    double phi_bound{0.0};  ///< (1/2) exp(-mu^2 / (2 sigma^2))
    bool valid{false};
    int index_plus{-1};
    int index_minus{-1};
    double pair_distance{0.0};
};

namespace detail {

/// Two-point worst-case variance from the closed form. Values within
/// round-off of zero are floored to a tiny positive number so downstream
/// tails degrade to 0/1 instead of dividing by zero; anything more negative
/// signals an inconsistent similarity triple.
inline std::pair<double, bool> certificate_sigma2(double theta1, double theta_s,
                                                  double theta_r1, double theta_r2) {
    const double quad = (theta1 * (theta_r1 * theta_r1 + theta_r2 * theta_r2) -
                         2.0 * theta_s * theta_r1 * theta_r2) /
                        (theta1 * theta1 - theta_s * theta_s);
    double sigma2 = theta1 - quad;
    bool floored = false;
    if (!(sigma2 > 0.0)) {
        if (sigma2 < -1e-12)
            throw NonPositiveSigmaError("certificate variance " + std::to_string(sigma2) +
                                        " is negative beyond round-off");
        sigma2 = 1e-300;
        floored = true;
    }
    return {sigma2, floored};
}

} // namespace detail

inline MspCertificate msp_certificate(const CrossPair& pair, double r, double epsilon,
                                      const KernelSpec& kernel) {
    if (epsilon < 0.0 || !std::isfinite(epsilon))
        throw DomainError("epsilon must be nonnegative");
    MspCertificate cert;
    cert.r = r;
    cert.epsilon = epsilon;
    cert.theta1 = kernel.theta1;
    cert.theta_s = pair.s;
    cert.theta_r1 = r;
    cert.theta_r2 = worst_case_enemy_similarity(pair, r, kernel);
    cert.index_plus = pair.index_plus;
    cert.index_minus = pair.index_minus;
    cert.pair_distance = pair.distance;

    cert.mu = (cert.theta_r1 - cert.theta_r2) / (cert.theta1 - cert.theta_s) - epsilon;
    auto [sigma2, floored] =
        detail::certificate_sigma2(cert.theta1, cert.theta_s, cert.theta_r1, cert.theta_r2);
    cert.sigma2 = sigma2;
    cert.sigma_floored = floored;

    const double sigma = std::sqrt(cert.sigma2);
    cert.exact_tail = std_normal_cdf(-cert.mu / sigma);
    cert.phi_bound = 0.5 * std::exp(-(cert.mu * cert.mu) / (2.0 * cert.sigma2));
    cert.valid = (r > pair.s) && (cert.mu > 0.0);
    return cert;
}

/// One evaluation of the bound as a function of the pair similarity s.
struct ScanRow {
    double s{0.0};
    double theta_r2{0.0};
    double mu{0.0};
    double sigma2{0.0};
    double phi_bound{0.0};
};

/// Discrete check that the bound grows with the pair similarity. The
/// dataset-level certificate is only transferable from the closest pair to
/// the rest of the dataset when this holds.
struct MonotonicityReport {
    bool passed{false};
    std::vector<ScanRow> table;
};

/// Evaluates phi(r | s) at fixed r over an ascending grid of pair
/// similarities, each in (r, theta1), and reports whether the sequence is
/// non-decreasing within 1e-12.
inline MonotonicityReport monotonicity_scan(const KernelSpec& kernel, double r,
                                            const std::vector<double>& s_grid) {
    if (!(r > 0.0) || !(r < kernel.theta1))
        throw DomainError("r must lie in (0, theta1)");
    if (s_grid.empty()) throw DomainError("monotonicity scan grid is empty");
    const double d_r = kernel_inverse_distance(kernel, r);
    MonotonicityReport report;
    report.table.reserve(s_grid.size());
    double prev = -std::numeric_limits<double>::infinity();
    report.passed = true;
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        const double s = s_grid[i];
        if (!(s > r) || !(s < kernel.theta1))
            throw DomainError("scan grid value " + std::to_string(s) +
                              " outside (r, theta1)");
        if (i > 0 && !(s > s_grid[i - 1]))
            throw DomainError("scan grid must be strictly ascending");
        ScanRow row;
        row.s = s;
        const double d_s = kernel_inverse_distance(kernel, s);
        row.theta_r2 = kernel_at_distance(kernel, std::abs(d_s - d_r));
        row.mu = (r - row.theta_r2) / (kernel.theta1 - s);
        auto [sigma2, floored] =
            detail::certificate_sigma2(kernel.theta1, s, r, row.theta_r2);
        (void)floored;
        row.sigma2 = sigma2;
        row.phi_bound = 0.5 * std::exp(-(row.mu * row.mu) / (2.0 * row.sigma2));
        if (row.phi_bound < prev - 1e-12) report.passed = false;
        prev = row.phi_bound;
        report.table.push_back(row);
    }
    return report;
}

inline std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
    std::vector<double> grid;
    grid.reserve(count);
    if (count == 1) {
        grid.push_back(0.5 * (lo + hi));
        return grid;
    }
    for (std::size_t i = 0; i < count; ++i)
        grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    return grid;
}

/// Dataset-level certificate plus the discrete monotonicity evidence.
struct DatasetCertificate {
    MspCertificate certificate;
    MonotonicityReport scan;
    double scan_lo{0.0};
    double scan_hi{0.0};
};

/// Finds the cross pair with maximum similarity by exhaustive scan over all
/// (+1, -1) index pairs (ties broken toward the lowest index pair), computes
/// its certificate, and attaches a monotonicity scan. The scan covers the
/// observed range of cross-pair similarities clipped to the legal window
/// (r, theta1); if no observed similarity falls in the window the full
/// window is scanned instead.
inline DatasetCertificate dataset_certificate(const LabeledDataset& dataset, double r,
                                              double epsilon, const KernelSpec& kernel,
                                              std::size_t scan_points = 100) {
    dataset.validate();
    const std::vector<int> plus = dataset.indices_with_label(1);
    const std::vector<int> minus = dataset.indices_with_label(-1);

    int best_i = -1, best_j = -1;
    double best_s = -1.0;
    double s_min = std::numeric_limits<double>::infinity();
    double s_max = -std::numeric_limits<double>::infinity();
    for (int i : plus) {
        for (int j : minus) {
            const double s = kernel_eval(kernel, dataset.point(i), dataset.point(j));
            s_min = std::min(s_min, s);
            s_max = std::max(s_max, s);
            if (s > best_s) {
                best_s = s;
                best_i = i;
                best_j = j;
            }
        }
    }

    DatasetCertificate out;
    const CrossPair pair =
        make_cross_pair(dataset.point(best_i), dataset.point(best_j), kernel, best_i, best_j);
    out.certificate = msp_certificate(pair, r, epsilon, kernel);

    // Keep grid endpoints strictly inside the admissible open interval.
    const double window_lo = r + 1e-9 * (kernel.theta1 - r);
    const double window_hi = kernel.theta1 - 1e-9 * (kernel.theta1 - r);
    double lo = std::max(s_min, window_lo);
    double hi = std::min(s_max, window_hi);
    if (!(lo < hi)) {
        lo = window_lo;
        hi = window_hi;
    }
    out.scan_lo = lo;
    out.scan_hi = hi;
    out.scan = monotonicity_scan(kernel, r, linear_grid(lo, hi, scan_points));
    return out;
}

} // namespace gpcert

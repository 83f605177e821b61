#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "gpcert/dataset.hpp"
#include "gpcert/errors.hpp"

namespace gpcert {

namespace detail {

/// Uniform in [0,1) from explicit mt19937_64 output; the double construction
/// is spelled out so the stream does not depend on library-specific
/// distribution internals.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// One standard normal draw by Box-Muller over the portable uniform stream.
inline double standard_normal(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    while (u1 == 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace detail

/// Two isotropic Gaussian clouds with centers `separation` apart along the
/// first axis: rows 0..n-1 are the +1 class, rows n..2n-1 the -1 class.
/// The seed fully determines the sample.
inline LabeledDataset generate_blobs(int n_per_class, int dim, double separation,
                                     double spread, std::uint64_t seed) {
    if (n_per_class < 1) throw ConfigError("n_per_class must be at least 1");
    if (dim < 1) throw ConfigError("dim must be at least 1");
    if (!(spread > 0.0)) throw ConfigError("spread must be positive");
    if (separation < 0.0 || !std::isfinite(separation))
        throw ConfigError("separation must be nonnegative");

    std::mt19937_64 rng(seed);
    LabeledDataset dataset;
    dataset.points.resize(2 * n_per_class, dim);
    dataset.labels.resize(2 * n_per_class);
    for (int i = 0; i < 2 * n_per_class; ++i) {
        const bool plus = i < n_per_class;
        const double center0 = plus ? separation / 2.0 : -separation / 2.0;
        for (int d = 0; d < dim; ++d)
            dataset.points(i, d) = (d == 0 ? center0 : 0.0) +
                                   spread * detail::standard_normal(rng);
        dataset.labels[i] = plus ? 1 : -1;
    }
    return dataset;
}

} // namespace gpcert

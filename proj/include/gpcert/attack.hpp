#pragma once

#include <cmath>
#include <vector>

#include "gpcert/bounds.hpp"
#include "gpcert/dataset.hpp"
#include "gpcert/errors.hpp"
#include "gpcert/gp.hpp"
#include "gpcert/kernel.hpp"
#include "gpcert/normal.hpp"

namespace gpcert {

/// Which class supplies the attack origins. The certificate math treats the
/// origin as the +1 class regardless of its stored label; success always
/// means the predictive mass lands on the opposite side of 0.
enum class OriginClass {
    plus,
    minus,
    both,
};

/// Per-origin outcome: the crafted point, the model's misclassification
/// probability there, and the matching certificate values.
struct AttackRecord {
    int origin_index{-1};
    int origin_label{0};
    int nearest_enemy_index{-1};
    double distance_to_enemy{0.0};
    double perturbation_norm{0.0};
    Vector adversarial_point;
    double empirical_prob{0.0};
    double theoretical_exact{0.0};
    double theoretical_phi{0.0};
    bool valid{false};
    bool follows_theorem{false};
};

/// origin + norm * (enemy - origin) / ||enemy - origin||. Overshooting the
/// enemy is permitted; collinearity is exact by construction.
inline Vector craft_ae(const Vector& origin, const Vector& enemy, double norm) {
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw DomainError("perturbation norm must be positive");
    const double dist = point_distance(origin, enemy);
    if (!(dist > 0.0))
        throw DegeneratePairError("attack origin coincides with its enemy");
    return origin + (norm / dist) * (enemy - origin);
}

/// Probability that a sample from the predictive law at `point` falls on the
/// wrong side of 0 for a point whose true class is `origin_label`. With zero
/// variance the classifier is deterministic and the probability collapses to
/// 0, 1, or 1/2 at an exactly zero mean.
inline double empirical_success_prob(const GpModel& model, const Vector& point,
                                     int origin_label) {
    if (origin_label != 1 && origin_label != -1)
        throw DomainError("origin label must be +1 or -1");
    const PredictiveDistribution pred = model.predict(point);
    if (pred.variance == 0.0) {
        if (pred.mean == 0.0) return 0.5;
        const bool classified_minus = pred.mean < 0.0;
        return (origin_label == 1) == classified_minus ? 1.0 : 0.0;
    }
    const double sigma = std::sqrt(pred.variance);
    const double mass_below = std_normal_cdf((0.0 - pred.mean) / sigma);
    return origin_label == 1 ? mass_below : 1.0 - mass_below;
}

/// Fits one model on the full dataset, then for every origin point crafts
/// the perturbation toward its nearest enemy (maximum kernel value among
/// opposite-label points, lowest index on ties) and fills one record.
/// Records whose certificate is not applicable are kept and flagged.
inline std::vector<AttackRecord> run_attack_sweep(const LabeledDataset& dataset,
                                                  const KernelSpec& kernel, double norm,
                                                  double epsilon, double jitter,
                                                  OriginClass origins = OriginClass::plus) {
    dataset.validate();
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw DomainError("perturbation norm must be positive");
    const GpModel model = fit(dataset, kernel, jitter);
    const double r = kernel_at_distance(kernel, norm);
    if (!(r < kernel.theta1))
        throw DomainError("perturbation norm too small: kernel similarity rounds to theta1");

    std::vector<AttackRecord> records;
    for (Eigen::Index i = 0; i < dataset.size(); ++i) {
        const int label = dataset.labels[i];
        if (origins == OriginClass::plus && label != 1) continue;
        if (origins == OriginClass::minus && label != -1) continue;

        const Vector origin = dataset.point(i);
        int enemy = -1;
        double best_k = -1.0;
        for (Eigen::Index j = 0; j < dataset.size(); ++j) {
            if (dataset.labels[j] == label) continue;
            const double kv = kernel_eval(kernel, origin, dataset.point(j));
            if (kv > best_k) {
                best_k = kv;
                enemy = static_cast<int>(j);
            }
        }

        AttackRecord rec;
        rec.origin_index = static_cast<int>(i);
        rec.origin_label = label;
        rec.nearest_enemy_index = enemy;
        rec.perturbation_norm = norm;
        const Vector enemy_point = dataset.point(enemy);
        rec.distance_to_enemy = point_distance(origin, enemy_point);
        rec.adversarial_point = craft_ae(origin, enemy_point, norm);
        rec.empirical_prob = empirical_success_prob(model, rec.adversarial_point, label);

        const CrossPair pair = make_cross_pair(origin, enemy_point, kernel,
                                               static_cast<int>(i), enemy);
        const MspCertificate cert = msp_certificate(pair, r, epsilon, kernel);
        rec.theoretical_exact = cert.exact_tail;
        rec.theoretical_phi = cert.phi_bound;
        rec.valid = cert.valid;
        rec.follows_theorem = rec.empirical_prob <= rec.theoretical_exact;
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace gpcert

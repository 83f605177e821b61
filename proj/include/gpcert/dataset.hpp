#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpcert/errors.hpp"
#include "gpcert/kernel.hpp"

namespace gpcert {

/// Binary-labeled point cloud: N rows of D coordinates with labels in {+1,-1}.
struct LabeledDataset {
    Matrix points;          ///< N x D, one point per row
    Eigen::VectorXi labels; ///< entries +1 or -1

    Eigen::Index size() const { return points.rows(); }
    Eigen::Index dim() const { return points.cols(); }

    Vector point(Eigen::Index i) const { return points.row(i).transpose(); }

    std::vector<int> indices_with_label(int label) const {
        std::vector<int> out;
        for (Eigen::Index i = 0; i < labels.size(); ++i)
            if (labels[i] == label) out.push_back(static_cast<int>(i));
        return out;
    }

    /// Structural invariants: at least two points, every label +1 or -1,
    /// and both classes populated. Duplicate points are not screened here;
    /// a conflicting duplicate surfaces as a singular gram matrix in fit().
    void validate() const {
        if (points.rows() != labels.size())
            throw ConfigError("dataset has " + std::to_string(points.rows()) +
                              " points but " + std::to_string(labels.size()) + " labels");
        if (points.rows() < 2)
            throw ConfigError("dataset needs at least 2 points");
        bool has_plus = false, has_minus = false;
        for (Eigen::Index i = 0; i < labels.size(); ++i) {
            if (labels[i] == 1) has_plus = true;
            else if (labels[i] == -1) has_minus = true;
            else
                throw ConfigError("label at row " + std::to_string(i) +
                                  " must be +1 or -1, got " + std::to_string(labels[i]));
        }
        if (!has_plus || !has_minus)
            throw ConfigError("dataset must contain both a +1 and a -1 point");
    }
};

} // namespace gpcert

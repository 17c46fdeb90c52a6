#pragma once

#include <functional>
#include <span>

#include "relpose/nn/tensor.hpp"

namespace relpose::nn {

struct GradCheckEntry {
    std::string name;
    double max_rel_err = 0.0;
    int coords_checked = 0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    double max_rel_err = 0.0;

    bool pass(double tol) const { return max_rel_err < tol; }
};

// Compares analytic gradients of a scalar-valued graph against central finite
// differences. `build_scalar` must rebuild the graph from the live parameter
// nodes on every call. Relative error uses max(|analytic|, |numeric|, 1e-6)
// as denominator. When coords_per_tensor > 0, only that many coordinates per
// parameter are probed (chosen deterministically from `seed`); 0 probes all.
GradCheckReport grad_check(const std::function<NodePtr()>& build_scalar,
                           std::span<const NodePtr> params,
                           double step = 1e-5,
                           int coords_per_tensor = 0,
                           std::uint64_t seed = 0);

}  // namespace relpose::nn

#include "relpose/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "relpose/prng.hpp"

namespace relpose::nn {

GradCheckReport grad_check(const std::function<NodePtr()>& build_scalar,
                           std::span<const NodePtr> params,
                           double step, int coords_per_tensor, std::uint64_t seed) {
    NodePtr root = build_scalar();
    backward(root);

    std::vector<Tensor> analytic;
    analytic.reserve(params.size());
    for (const NodePtr& p : params) analytic.push_back(p->grad);

    SplitRng rng = SplitRng(seed).split(0x6772616463686b);  // "gradchk" stream

    GradCheckReport report;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        const NodePtr& p = params[pi];
        const std::size_t n = p->value.size();

        std::vector<std::size_t> coords;
        if (coords_per_tensor <= 0 || static_cast<std::size_t>(coords_per_tensor) >= n) {
            coords.resize(n);
            for (std::size_t i = 0; i < n; ++i) coords[i] = i;
        } else {
            for (int i = 0; i < coords_per_tensor; ++i) coords.push_back(rng.below(n));
            std::sort(coords.begin(), coords.end());
            coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
        }

        GradCheckEntry entry;
        entry.name = p->name.empty() ? "param" + std::to_string(pi) : p->name;
        entry.coords_checked = static_cast<int>(coords.size());
        for (std::size_t ci : coords) {
            double* slot = p->value.data() + ci;
            const double saved = *slot;
            *slot = saved + step;
            const double up = build_scalar()->value[0];
            *slot = saved - step;
            const double down = build_scalar()->value[0];
            *slot = saved;

            const double numeric = (up - down) / (2.0 * step);
            const double a = analytic[pi][ci];
            const double rel = std::abs(a - numeric) /
                               std::max({std::abs(a), std::abs(numeric), 1e-6});
            entry.max_rel_err = std::max(entry.max_rel_err, rel);
        }
        report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
        report.entries.push_back(std::move(entry));
    }
    return report;
}

}  // namespace relpose::nn

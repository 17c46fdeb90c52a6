#include "relpose/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace relpose::nn {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw ShapeMismatch("nnet: " + msg);
}

// Valid output ranges for a given kernel offset, so inner conv loops stay in
// bounds without per-element checks.
int conv_lo(int kk, int s, int p) {
    return p - kk > 0 ? (p - kk + s - 1) / s : 0;
}
int conv_hi(int kk, int in_extent, int out_extent, int s, int p) {
    const int top = in_extent - 1 - kk + p;
    return top < 0 ? -1 : std::min(out_extent - 1, top / s);
}

// Whether gradient flowing into this node can reach a parameter.
bool needs_grad(const NodePtr& n) {
    return n->requires_grad || !n->parents.empty();
}

NodePtr make_node(Tensor value, std::vector<NodePtr> parents) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->parents = std::move(parents);
    return n;
}

}  // namespace

int conv_output_extent(int extent, int window, int stride, int pad) {
    return (extent + 2 * pad - window) / stride + 1;
}

int SppSpec::bins_per_channel() const {
    int total = 0;
    for (int n : levels) total += n * n;
    return total;
}

SppWindow spp_window(int extent, int bins, int index) {
    const int size = (extent + bins - 1) / bins;  // ceil(extent / bins)
    const int stride = extent / bins;             // floor(extent / bins)
    return SppWindow{index * stride, size};
}

NodePtr conv2d(const NodePtr& x, const NodePtr& weights, const NodePtr& bias,
               const ConvSpec& spec) {
    const Tensor& xv = x->value;
    const Tensor& wv = weights->value;
    const Tensor& bv = bias->value;
    require(xv.rank() == 4, "conv2d input must be [N,C,H,W], got " + shape_str(xv.shape()));
    require(wv.rank() == 4, "conv2d weights must be [Cout,Cin,k,k], got " + shape_str(wv.shape()));
    require(bv.rank() == 1, "conv2d bias must be rank 1");
    require(spec.kernel >= 1 && spec.stride >= 1 && spec.pad >= 0, "conv2d spec invalid");
    require(wv.dim(0) == spec.filters && wv.dim(2) == spec.kernel && wv.dim(3) == spec.kernel,
            "conv2d weight shape disagrees with spec");
    require(wv.dim(1) == xv.dim(1), "conv2d channel mismatch: input " + shape_str(xv.shape()) +
                                        " vs weights " + shape_str(wv.shape()));
    require(bv.dim(0) == spec.filters, "conv2d bias length disagrees with filter count");

    const int n_batch = xv.dim(0), cin = xv.dim(1), h = xv.dim(2), w = xv.dim(3);
    const int cout = spec.filters, k = spec.kernel, s = spec.stride, p = spec.pad;
    const int ho = conv_output_extent(h, k, s, p);
    const int wo = conv_output_extent(w, k, s, p);
    require(ho >= 1 && wo >= 1, "conv2d input spatial size below kernel after padding");

    Tensor out(Shape{n_batch, cout, ho, wo});
    const double* xd = xv.data();
    const double* wd = wv.data();
    double* od = out.data();

    for (int n = 0; n < n_batch; ++n) {
        for (int oc = 0; oc < cout; ++oc) {
            double* oplane = od + (static_cast<std::size_t>(n) * cout + oc) * ho * wo;
            const double bb = bv[static_cast<std::size_t>(oc)];
            for (int i = 0; i < ho * wo; ++i) oplane[i] = bb;
            for (int ic = 0; ic < cin; ++ic) {
                const double* xplane = xd + (static_cast<std::size_t>(n) * cin + ic) * h * w;
                const double* wplane = wd + (static_cast<std::size_t>(oc) * cin + ic) * k * k;
                for (int kh = 0; kh < k; ++kh) {
                    const int oh_lo = conv_lo(kh, s, p), oh_hi = conv_hi(kh, h, ho, s, p);
                    for (int kw = 0; kw < k; ++kw) {
                        const double wval = wplane[kh * k + kw];
                        const int ow_lo = conv_lo(kw, s, p), ow_hi = conv_hi(kw, w, wo, s, p);
                        for (int oh = oh_lo; oh <= oh_hi; ++oh) {
                            const double* xrow = xplane + (oh * s + kh - p) * w + (kw - p);
                            double* orow = oplane + oh * wo;
                            for (int ow = ow_lo; ow <= ow_hi; ++ow)
                                orow[ow] += wval * xrow[ow * s];
                        }
                    }
                }
            }
        }
    }

    NodePtr node = make_node(std::move(out), {x, weights, bias});
    Node* self = node.get();
    NodePtr xp = x, wp = weights, bp = bias;
    node->backprop = [self, xp, wp, bp, n_batch, cin, h, w, cout, k, s, p, ho, wo]() {
        const double* gd = self->grad.data();
        const double* xd = xp->value.data();
        const double* wd = wp->value.data();
        const bool want_x = needs_grad(xp);

        double* gb = bp->grad.data();
        for (int n = 0; n < n_batch; ++n)
            for (int oc = 0; oc < cout; ++oc) {
                const double* gplane = gd + (static_cast<std::size_t>(n) * cout + oc) * ho * wo;
                double acc = 0.0;
                for (int i = 0; i < ho * wo; ++i) acc += gplane[i];
                gb[oc] += acc;
            }

        double* gw = wp->grad.data();
        double* gx = xp->grad.data();
        for (int n = 0; n < n_batch; ++n) {
            for (int oc = 0; oc < cout; ++oc) {
                const double* gplane = gd + (static_cast<std::size_t>(n) * cout + oc) * ho * wo;
                for (int ic = 0; ic < cin; ++ic) {
                    const std::size_t xoff = (static_cast<std::size_t>(n) * cin + ic) * h * w;
                    const double* xplane = xd + xoff;
                    double* gxplane = gx + xoff;
                    const std::size_t woff = (static_cast<std::size_t>(oc) * cin + ic) * k * k;
                    for (int kh = 0; kh < k; ++kh) {
                        const int oh_lo = conv_lo(kh, s, p), oh_hi = conv_hi(kh, h, ho, s, p);
                        for (int kw = 0; kw < k; ++kw) {
                            const double wval = wd[woff + kh * k + kw];
                            const int ow_lo = conv_lo(kw, s, p), ow_hi = conv_hi(kw, w, wo, s, p);
                            double gwacc = 0.0;
                            for (int oh = oh_lo; oh <= oh_hi; ++oh) {
                                const int row = (oh * s + kh - p) * w + (kw - p);
                                const double* grow = gplane + oh * wo;
                                const double* xrow = xplane + row;
                                if (want_x) {
                                    double* gxrow = gxplane + row;
                                    for (int ow = ow_lo; ow <= ow_hi; ++ow) {
                                        const double g = grow[ow];
                                        gwacc += g * xrow[ow * s];
                                        gxrow[ow * s] += g * wval;
                                    }
                                } else {
                                    for (int ow = ow_lo; ow <= ow_hi; ++ow)
                                        gwacc += grow[ow] * xrow[ow * s];
                                }
                            }
                            gw[woff + kh * k + kw] += gwacc;
                        }
                    }
                }
            }
        }
    };
    return node;
}

NodePtr maxpool2d(const NodePtr& x, const PoolSpec& spec) {
    const Tensor& xv = x->value;
    require(xv.rank() == 4, "maxpool2d input must be [N,C,H,W]");
    require(spec.window >= 1 && spec.stride >= 1, "maxpool2d spec invalid");
    const int n_batch = xv.dim(0), c = xv.dim(1), h = xv.dim(2), w = xv.dim(3);
    require(h >= spec.window && w >= spec.window,
            "maxpool2d spatial size below window " + shape_str(xv.shape()));
    const int k = spec.window, s = spec.stride;
    const int ho = (h - k) / s + 1, wo = (w - k) / s + 1;

    Tensor out(Shape{n_batch, c, ho, wo});
    auto argmax = std::make_shared<std::vector<std::size_t>>(out.size());
    const double* xd = xv.data();
    double* od = out.data();

    std::size_t oi = 0;
    for (int n = 0; n < n_batch; ++n)
        for (int ch = 0; ch < c; ++ch) {
            const std::size_t plane = (static_cast<std::size_t>(n) * c + ch) * h * w;
            for (int oh = 0; oh < ho; ++oh)
                for (int ow = 0; ow < wo; ++ow, ++oi) {
                    double best = -std::numeric_limits<double>::infinity();
                    std::size_t best_idx = 0;
                    for (int kh = 0; kh < k; ++kh) {
                        const std::size_t row = plane + (oh * s + kh) * w + ow * s;
                        for (int kw = 0; kw < k; ++kw)
                            if (xd[row + kw] > best) {  // ties keep the first seen
                                best = xd[row + kw];
                                best_idx = row + kw;
                            }
                    }
                    od[oi] = best;
                    (*argmax)[oi] = best_idx;
                }
        }

    NodePtr node = make_node(std::move(out), {x});
    Node* self = node.get();
    NodePtr xp = x;
    node->backprop = [self, xp, argmax]() {
        const double* gd = self->grad.data();
        double* gx = xp->grad.data();
        for (std::size_t i = 0; i < argmax->size(); ++i) gx[(*argmax)[i]] += gd[i];
    };
    return node;
}

NodePtr relu(const NodePtr& x) {
    Tensor out = Tensor::zeros_like(x->value);
    const double* xd = x->value.data();
    double* od = out.data();
    for (std::size_t i = 0; i < out.size(); ++i) od[i] = xd[i] > 0.0 ? xd[i] : 0.0;

    NodePtr node = make_node(std::move(out), {x});
    Node* self = node.get();
    NodePtr xp = x;
    node->backprop = [self, xp]() {
        const double* gd = self->grad.data();
        const double* xd = xp->value.data();
        double* gx = xp->grad.data();
        for (std::size_t i = 0; i < self->grad.size(); ++i)
            if (xd[i] > 0.0) gx[i] += gd[i];
    };
    return node;
}

NodePtr linear(const NodePtr& x, const NodePtr& weights, const NodePtr& bias) {
    const Tensor& xv = x->value;
    const Tensor& wv = weights->value;
    const Tensor& bv = bias->value;
    require(xv.rank() == 2, "linear input must be [N,D], got " + shape_str(xv.shape()));
    require(wv.rank() == 2 && bv.rank() == 1, "linear weights must be [O,D], bias [O]");
    require(wv.dim(1) == xv.dim(1), "linear width mismatch: input " + shape_str(xv.shape()) +
                                        " vs weights " + shape_str(wv.shape()));
    require(bv.dim(0) == wv.dim(0), "linear bias length disagrees with output width");

    const int n_batch = xv.dim(0), d = xv.dim(1), o = wv.dim(0);
    Tensor out(Shape{n_batch, o});
    const double* xd = xv.data();
    const double* wd = wv.data();
    double* od = out.data();
    for (int n = 0; n < n_batch; ++n)
        for (int j = 0; j < o; ++j) {
            const double* xrow = xd + static_cast<std::size_t>(n) * d;
            const double* wrow = wd + static_cast<std::size_t>(j) * d;
            double acc = bv[static_cast<std::size_t>(j)];
            for (int i = 0; i < d; ++i) acc += xrow[i] * wrow[i];
            od[static_cast<std::size_t>(n) * o + j] = acc;
        }

    NodePtr node = make_node(std::move(out), {x, weights, bias});
    Node* self = node.get();
    NodePtr xp = x, wp = weights, bp = bias;
    node->backprop = [self, xp, wp, bp, n_batch, d, o]() {
        const double* gd = self->grad.data();
        const double* xd = xp->value.data();
        const double* wd = wp->value.data();
        double* gx = xp->grad.data();
        double* gw = wp->grad.data();
        double* gb = bp->grad.data();
        const bool want_x = needs_grad(xp);
        for (int n = 0; n < n_batch; ++n) {
            const double* grow = gd + static_cast<std::size_t>(n) * o;
            const double* xrow = xd + static_cast<std::size_t>(n) * d;
            double* gxrow = gx + static_cast<std::size_t>(n) * d;
            for (int j = 0; j < o; ++j) {
                const double g = grow[j];
                if (g == 0.0) continue;
                gb[j] += g;
                const double* wrow = wd + static_cast<std::size_t>(j) * d;
                double* gwrow = gw + static_cast<std::size_t>(j) * d;
                for (int i = 0; i < d; ++i) gwrow[i] += g * xrow[i];
                if (want_x)
                    for (int i = 0; i < d; ++i) gxrow[i] += g * wrow[i];
            }
        }
    };
    return node;
}

NodePtr concat(const NodePtr& a, const NodePtr& b) {
    const Tensor& av = a->value;
    const Tensor& bv = b->value;
    require(av.rank() == bv.rank() && av.rank() >= 2, "concat inputs must share rank >= 2");
    Shape shape = av.shape();
    for (int i = 0; i < av.rank(); ++i)
        if (i != 1)
            require(av.dim(i) == bv.dim(i), "concat inputs disagree outside axis 1: " +
                                                shape_str(av.shape()) + " vs " + shape_str(bv.shape()));
    shape[1] = av.dim(1) + bv.dim(1);

    std::size_t inner = 1;
    for (int i = 2; i < av.rank(); ++i) inner *= static_cast<std::size_t>(av.dim(i));
    const std::size_t block_a = static_cast<std::size_t>(av.dim(1)) * inner;
    const std::size_t block_b = static_cast<std::size_t>(bv.dim(1)) * inner;
    const int n_batch = av.dim(0);

    Tensor out(shape);
    double* od = out.data();
    for (int n = 0; n < n_batch; ++n) {
        std::copy_n(av.data() + n * block_a, block_a, od + n * (block_a + block_b));
        std::copy_n(bv.data() + n * block_b, block_b, od + n * (block_a + block_b) + block_a);
    }

    NodePtr node = make_node(std::move(out), {a, b});
    Node* self = node.get();
    NodePtr ap = a, bp = b;
    node->backprop = [self, ap, bp, n_batch, block_a, block_b]() {
        const double* gd = self->grad.data();
        double* ga = ap->grad.data();
        double* gb = bp->grad.data();
        for (int n = 0; n < n_batch; ++n) {
            const double* src = gd + n * (block_a + block_b);
            for (std::size_t i = 0; i < block_a; ++i) ga[n * block_a + i] += src[i];
            for (std::size_t i = 0; i < block_b; ++i) gb[n * block_b + i] += src[block_a + i];
        }
    };
    return node;
}

NodePtr flatten_rows(const NodePtr& x) {
    const Tensor& xv = x->value;
    require(xv.rank() >= 2, "flatten_rows input must have rank >= 2");
    int cols = 1;
    for (int i = 1; i < xv.rank(); ++i) cols *= xv.dim(i);

    Tensor out(Shape{xv.dim(0), cols});
    std::copy_n(xv.data(), xv.size(), out.data());

    NodePtr node = make_node(std::move(out), {x});
    Node* self = node.get();
    NodePtr xp = x;
    node->backprop = [self, xp]() {
        const double* gd = self->grad.data();
        double* gx = xp->grad.data();
        for (std::size_t i = 0; i < self->grad.size(); ++i) gx[i] += gd[i];
    };
    return node;
}

NodePtr spp(const NodePtr& x, const SppSpec& spec) {
    const Tensor& xv = x->value;
    require(xv.rank() == 4, "spp input must be [N,C,H,W]");
    require(!spec.levels.empty(), "spp needs at least one level");
    for (std::size_t i = 0; i < spec.levels.size(); ++i) {
        require(spec.levels[i] >= 1, "spp level must be >= 1");
        if (i) require(spec.levels[i] > spec.levels[i - 1], "spp levels must be strictly increasing");
    }
    const int n_batch = xv.dim(0), c = xv.dim(1), h = xv.dim(2), w = xv.dim(3);
    const int max_level = spec.levels.back();
    if (h < max_level || w < max_level)
        throw InputTooSmall("nnet: spp feature map " + shape_str(xv.shape()) +
                            " smaller than level " + std::to_string(max_level));

    const int bins = spec.bins_per_channel();
    Tensor out(Shape{n_batch, c * bins});
    auto argmax = std::make_shared<std::vector<std::size_t>>(out.size());
    const double* xd = xv.data();
    double* od = out.data();

    for (int n = 0; n < n_batch; ++n) {
        std::size_t oi = static_cast<std::size_t>(n) * c * bins;
        int level_off = 0;
        for (int lvl : spec.levels) {
            for (int ch = 0; ch < c; ++ch) {
                const std::size_t plane = (static_cast<std::size_t>(n) * c + ch) * h * w;
                for (int i = 0; i < lvl; ++i) {
                    const SppWindow wh = spp_window(h, lvl, i);
                    for (int j = 0; j < lvl; ++j) {
                        const SppWindow ww = spp_window(w, lvl, j);
                        double best = -std::numeric_limits<double>::infinity();
                        std::size_t best_idx = 0;
                        for (int r = wh.origin; r < wh.origin + wh.size; ++r) {
                            const std::size_t row = plane + static_cast<std::size_t>(r) * w;
                            for (int col = ww.origin; col < ww.origin + ww.size; ++col)
                                if (xd[row + col] > best) {
                                    best = xd[row + col];
                                    best_idx = row + col;
                                }
                        }
                        const std::size_t slot = oi + static_cast<std::size_t>(level_off) * c +
                                                 static_cast<std::size_t>(ch) * lvl * lvl + i * lvl + j;
                        od[slot] = best;
                        (*argmax)[slot] = best_idx;
                    }
                }
            }
            level_off += lvl * lvl;
        }
    }

    NodePtr node = make_node(std::move(out), {x});
    Node* self = node.get();
    NodePtr xp = x;
    node->backprop = [self, xp, argmax]() {
        const double* gd = self->grad.data();
        double* gx = xp->grad.data();
        for (std::size_t i = 0; i < argmax->size(); ++i) gx[(*argmax)[i]] += gd[i];
    };
    return node;
}

NodePtr euclidean_loss(const NodePtr& pred, const NodePtr& target) {
    const Tensor& pv = pred->value;
    const Tensor& tv = target->value;
    require(pv.same_shape(tv), "euclidean_loss shapes differ: " + shape_str(pv.shape()) +
                                   " vs " + shape_str(tv.shape()));
    double sq = 0.0;
    for (std::size_t i = 0; i < pv.size(); ++i) {
        const double d = pv[i] - tv[i];
        sq += d * d;
    }
    const double norm = std::sqrt(sq);

    NodePtr node = make_node(Tensor::scalar(norm), {pred, target});
    Node* self = node.get();
    NodePtr pp = pred, tp = target;
    node->backprop = [self, pp, tp, norm]() {
        if (norm < 1e-12) return;
        const double g = self->grad[0] / norm;
        const double* pd = pp->value.data();
        const double* td = tp->value.data();
        double* gp = pp->grad.data();
        double* gt = tp->grad.data();
        const bool want_t = needs_grad(tp);
        for (std::size_t i = 0; i < pp->value.size(); ++i) {
            const double d = g * (pd[i] - td[i]);
            gp[i] += d;
            if (want_t) gt[i] -= d;
        }
    };
    return node;
}

NodePtr pair_pose_loss(const NodePtr& pred, const NodePtr& target, double beta) {
    const Tensor& pv = pred->value;
    const Tensor& tv = target->value;
    require(pv.rank() == 2 && pv.dim(1) == 7, "pair_pose_loss input must be [N,7]");
    require(pv.same_shape(tv), "pair_pose_loss shapes differ");
    const int n_batch = pv.dim(0);

    auto row_norms = std::make_shared<std::vector<double>>(2 * n_batch);
    double total = 0.0;
    for (int n = 0; n < n_batch; ++n) {
        const double* p = pv.data() + static_cast<std::size_t>(n) * 7;
        const double* t = tv.data() + static_cast<std::size_t>(n) * 7;
        double q_sq = 0.0, t_sq = 0.0;
        for (int i = 0; i < 4; ++i) q_sq += (p[i] - t[i]) * (p[i] - t[i]);
        for (int i = 4; i < 7; ++i) t_sq += (p[i] - t[i]) * (p[i] - t[i]);
        const double qn = std::sqrt(q_sq), tn = std::sqrt(t_sq);
        (*row_norms)[2 * n] = qn;
        (*row_norms)[2 * n + 1] = tn;
        total += tn + beta * qn;
    }
    total /= n_batch;

    NodePtr node = make_node(Tensor::scalar(total), {pred, target});
    Node* self = node.get();
    NodePtr pp = pred, tp = target;
    node->backprop = [self, pp, tp, beta, n_batch, row_norms]() {
        const double g = self->grad[0] / n_batch;
        const double* pd = pp->value.data();
        const double* td = tp->value.data();
        double* gp = pp->grad.data();
        for (int n = 0; n < n_batch; ++n) {
            const double* p = pd + static_cast<std::size_t>(n) * 7;
            const double* t = td + static_cast<std::size_t>(n) * 7;
            double* gr = gp + static_cast<std::size_t>(n) * 7;
            const double qn = (*row_norms)[2 * n], tn = (*row_norms)[2 * n + 1];
            if (qn >= 1e-12)
                for (int i = 0; i < 4; ++i) gr[i] += g * beta * (p[i] - t[i]) / qn;
            if (tn >= 1e-12)
                for (int i = 4; i < 7; ++i) gr[i] += g * (p[i] - t[i]) / tn;
        }
    };
    return node;
}

}  // namespace relpose::nn

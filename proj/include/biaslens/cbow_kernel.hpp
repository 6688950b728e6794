#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace biaslens::cbow {

/// -log(sigmoid(x)), stable for large |x|.
inline double neg_log_sigmoid(double x) {
    return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

/// One negative-sampling CBOW update on row-major matrices with `dim` columns.
///
/// h is the mean of the context rows of `input`. The loss is
///   -log s(h . out[target]) - sum_neg log s(-h . out[neg])
/// evaluated before any row changes. Every touched output row and every
/// context input row moves by -lr times its gradient at that point, so
/// duplicate ids accumulate exactly. Returns the pre-update loss.
///
/// `scratch` is resized to 2*dim; reuse it across calls.
template <class Real>
double update(std::span<Real> input, std::span<Real> output, std::size_t dim,
              std::span<const std::uint32_t> context, std::uint32_t target,
              std::span<const std::uint32_t> negatives, double lr, std::vector<Real>& scratch) {
    scratch.assign(2 * dim, Real(0));
    Real* h = scratch.data();
    Real* grad_h = scratch.data() + dim;

    for (std::uint32_t c : context) {
        const Real* row = input.data() + std::size_t(c) * dim;
        for (std::size_t d = 0; d < dim; ++d) h[d] += row[d];
    }
    const Real inv_n = Real(1) / Real(context.size());
    for (std::size_t d = 0; d < dim; ++d) h[d] *= inv_n;

    auto score = [&](std::uint32_t id) {
        const Real* row = output.data() + std::size_t(id) * dim;
        Real s = 0;
        for (std::size_t d = 0; d < dim; ++d) s += h[d] * row[d];
        return static_cast<double>(s);
    };

    // Coefficients are computed against the untouched output rows first.
    const std::size_t n_out = 1 + negatives.size();
    Real coeff_stack[17];
    std::vector<Real> coeff_heap;
    Real* coeff = coeff_stack;
    if (n_out > 17) {
        coeff_heap.resize(n_out);
        coeff = coeff_heap.data();
    }
    double loss = 0;
    {
        double s = score(target);
        loss += neg_log_sigmoid(s);
        coeff[0] = static_cast<Real>(sigmoid(s) - 1.0);
    }
    for (std::size_t k = 0; k < negatives.size(); ++k) {
        double s = score(negatives[k]);
        loss += neg_log_sigmoid(-s);
        coeff[k + 1] = static_cast<Real>(sigmoid(s));
    }
    if (lr == 0) return loss;

    for (std::size_t k = 0; k < n_out; ++k) {
        const Real* row = output.data() + std::size_t(k == 0 ? target : negatives[k - 1]) * dim;
        const Real g = coeff[k];
        for (std::size_t d = 0; d < dim; ++d) grad_h[d] += g * row[d];
    }
    const Real step = static_cast<Real>(lr);
    for (std::size_t k = 0; k < n_out; ++k) {
        Real* row = output.data() + std::size_t(k == 0 ? target : negatives[k - 1]) * dim;
        const Real g = step * coeff[k];
        for (std::size_t d = 0; d < dim; ++d) row[d] -= g * h[d];
    }
    const Real in_step = step * inv_n;
    for (std::uint32_t c : context) {
        Real* row = input.data() + std::size_t(c) * dim;
        for (std::size_t d = 0; d < dim; ++d) row[d] -= in_step * grad_h[d];
    }
    return loss;
}

}  // namespace biaslens::cbow

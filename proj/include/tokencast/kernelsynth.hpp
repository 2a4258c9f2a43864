#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tokencast/common.hpp"
#include "tokencast/rng.hpp"

namespace tokencast {

enum class BaseKernel { Constant, WhiteNoise, Linear, Rbf, RationalQuadratic, Periodic };
enum class KernelOp { Add, Mul };

/**
 * Immutable kernel expression: a base kernel with one hyperparameter,
 * or two subexpressions combined with + or *.
 */
class KernelExpr {
public:
    static KernelExpr leaf(BaseKernel kind, double param);
    static KernelExpr combine(KernelOp op, KernelExpr lhs, KernelExpr rhs);

    /// Covariance value k(t, u) following the kernel-bank formulas.
    double eval(double t, double u) const;

    /// Parenthesized rendering, e.g. "(RBF(1) + Periodic(24))".
    std::string to_string() const;

private:
    KernelExpr() = default;

    bool is_leaf_ = true;
    BaseKernel kind_ = BaseKernel::Constant;
    double param_ = 1.0;
    KernelOp op_ = KernelOp::Add;
    std::shared_ptr<const KernelExpr> lhs_;
    std::shared_ptr<const KernelExpr> rhs_;
};

/// One sampleable (kernel, hyperparameter) entry.
struct BankEntry {
    BaseKernel kind;
    double param;
};

/// The fixed bank: Constant(1); WhiteNoise {0.1, 1}; Linear {0, 1, 10};
/// RBF {0.1, 1, 10}; RationalQuadratic {0.1, 1, 10}; Periodic over the
/// 19 seasonality periods. 31 entries; leaves are drawn uniformly.
std::span<const BankEntry> default_kernel_bank();

struct KernelSynthConfig {
    int max_kernels = 5;   // J
    int length = 1024;     // points per generated series
    double jitter = 1e-6;  // initial diagonal jitter

    void validate() const;
};

/// Dense covariance matrix on the grid, jitter added to the diagonal.
/// Each unordered pair is evaluated once, so the result is exactly
/// symmetric.
Eigen::MatrixXd gram_matrix(const KernelExpr& spec, std::span<const double> grid,
                            double jitter);

struct GpSample {
    std::vector<double> values;
    double jitter_used = 0.0; // final diagonal jitter that factorized
};

/// Draws L * z with K = L * L^T on the grid t = 0, 1, ..., length-1.
/// If the Cholesky factorization fails, the jitter escalates by x10 up
/// to 1e-2 before giving up with a NumericalError naming the kernel.
GpSample sample_gp_detail(const KernelExpr& spec, const KernelSynthConfig& cfg, Rng& rng);

std::vector<double> sample_gp(const KernelExpr& spec, const KernelSynthConfig& cfg, Rng& rng);

struct SynthSeries {
    std::vector<double> values;
    KernelExpr spec;
};

/// One full generation step: j ~ U{1..J} leaves drawn i.i.d. from the
/// bank, composed left to right with a fresh uniform +/* operator per
/// step, then sampled from the zero-mean GP prior.
SynthSeries kernelsynth_generate(std::span<const BankEntry> bank,
                                 const KernelSynthConfig& cfg, Rng& rng);

/// count independent draws with per-index rng streams from (seed, i).
std::vector<SynthSeries> generate_kernelsynth_corpus(const KernelSynthConfig& cfg,
                                                     int count, std::uint64_t seed,
                                                     int threads = 1);

} // namespace tokencast

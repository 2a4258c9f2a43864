#include "tokencast/kernelsynth.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tokencast/parallel.hpp"

namespace tokencast {

KernelExpr KernelExpr::leaf(BaseKernel kind, double param) {
    KernelExpr e;
    e.is_leaf_ = true;
    e.kind_ = kind;
    e.param_ = param;
    return e;
}

KernelExpr KernelExpr::combine(KernelOp op, KernelExpr lhs, KernelExpr rhs) {
    KernelExpr e;
    e.is_leaf_ = false;
    e.op_ = op;
    e.lhs_ = std::make_shared<const KernelExpr>(std::move(lhs));
    e.rhs_ = std::make_shared<const KernelExpr>(std::move(rhs));
    return e;
}

double KernelExpr::eval(double t, double u) const {
    if (!is_leaf_) {
        const double a = lhs_->eval(t, u);
        const double b = rhs_->eval(t, u);
        return op_ == KernelOp::Add ? a + b : a * b;
    }
    switch (kind_) {
    case BaseKernel::Constant:
        return param_;
    case BaseKernel::WhiteNoise:
        return t == u ? param_ : 0.0;
    case BaseKernel::Linear:
        return param_ * param_ + t * u;
    case BaseKernel::Rbf: {
        const double d = t - u;
        return std::exp(-(d * d) / (2.0 * param_ * param_));
    }
    case BaseKernel::RationalQuadratic: {
        const double d = t - u;
        return std::pow(1.0 + (d * d) / (2.0 * param_), -param_);
    }
    case BaseKernel::Periodic: {
        const double s = std::sin(std::numbers::pi * std::abs(t - u) / param_);
        return std::exp(-2.0 * s * s);
    }
    }
    throw NumericalError("kernel eval: unknown base kernel");
}

namespace {

std::string format_param(double p) {
    std::ostringstream os;
    os << p;
    return os.str();
}

const char* kernel_name(BaseKernel k) {
    switch (k) {
    case BaseKernel::Constant: return "Const";
    case BaseKernel::WhiteNoise: return "White";
    case BaseKernel::Linear: return "Lin";
    case BaseKernel::Rbf: return "RBF";
    case BaseKernel::RationalQuadratic: return "RQ";
    case BaseKernel::Periodic: return "Per";
    }
    return "?";
}

} // namespace

std::string KernelExpr::to_string() const {
    if (is_leaf_)
        return std::string(kernel_name(kind_)) + "(" + format_param(param_) + ")";
    return "(" + lhs_->to_string() + (op_ == KernelOp::Add ? " + " : " * ") +
           rhs_->to_string() + ")";
}

std::span<const BankEntry> default_kernel_bank() {
    static const std::vector<BankEntry> bank = [] {
        std::vector<BankEntry> b;
        b.push_back({BaseKernel::Constant, 1.0});
        for (double p : {0.1, 1.0}) b.push_back({BaseKernel::WhiteNoise, p});
        for (double p : {0.0, 1.0, 10.0}) b.push_back({BaseKernel::Linear, p});
        for (double p : {0.1, 1.0, 10.0}) b.push_back({BaseKernel::Rbf, p});
        for (double p : {0.1, 1.0, 10.0}) b.push_back({BaseKernel::RationalQuadratic, p});
        for (double p : {24.0, 48.0, 96.0, 168.0, 336.0, 672.0, 7.0, 14.0, 30.0,
                         60.0, 365.0, 730.0, 4.0, 26.0, 52.0, 6.0, 12.0, 40.0, 10.0})
            b.push_back({BaseKernel::Periodic, p});
        return b;
    }();
    return bank;
}

void KernelSynthConfig::validate() const {
    if (max_kernels < 1) throw ConfigError("kernelsynth: max_kernels must be >= 1");
    if (length < 2) throw ConfigError("kernelsynth: length must be >= 2");
    if (!(jitter > 0.0)) throw ConfigError("kernelsynth: jitter must be > 0");
}

Eigen::MatrixXd gram_matrix(const KernelExpr& spec, std::span<const double> grid,
                            double jitter) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = spec.eval(grid[static_cast<std::size_t>(i)],
                                       grid[static_cast<std::size_t>(j)]);
            gram(i, j) = v;
            gram(j, i) = v;
        }
        gram(i, i) += jitter;
    }
    return gram;
}

GpSample sample_gp_detail(const KernelExpr& spec, const KernelSynthConfig& cfg,
                          Rng& rng) {
    cfg.validate();
    const std::size_t n = static_cast<std::size_t>(cfg.length);
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) grid[i] = static_cast<double>(i);

    constexpr double kMaxJitter = 1e-2;
    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = cfg.jitter;
    for (;;) {
        llt.compute(gram_matrix(spec, grid, jitter));
        if (llt.info() == Eigen::Success) break;
        if (jitter >= kMaxJitter)
            throw NumericalError("kernelsynth: Cholesky failed at jitter " +
                                 std::to_string(jitter) + " for kernel " +
                                 spec.to_string());
        jitter *= 10.0;
    }

    Eigen::VectorXd z(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
    const Eigen::VectorXd sample = llt.matrixL() * z;

    GpSample out;
    out.jitter_used = jitter;
    out.values.assign(sample.data(), sample.data() + sample.size());
    return out;
}

std::vector<double> sample_gp(const KernelExpr& spec, const KernelSynthConfig& cfg,
                              Rng& rng) {
    return sample_gp_detail(spec, cfg, rng).values;
}

SynthSeries kernelsynth_generate(std::span<const BankEntry> bank,
                                 const KernelSynthConfig& cfg, Rng& rng) {
    cfg.validate();
    if (bank.empty()) throw ConfigError("kernelsynth: empty kernel bank");
    // Draw order follows the generation recipe literally: the kernel
    // count, then all leaves i.i.d., then one operator per fold step.
    const int count = static_cast<int>(rng.uniform_int(1, cfg.max_kernels));
    std::vector<KernelExpr> leaves;
    leaves.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const BankEntry& e =
            bank[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(bank.size()) - 1))];
        leaves.push_back(KernelExpr::leaf(e.kind, e.param));
    }
    KernelExpr spec = std::move(leaves.front());
    for (std::size_t i = 1; i < leaves.size(); ++i) {
        const KernelOp op = rng.uniform_int(0, 1) == 0 ? KernelOp::Add : KernelOp::Mul;
        spec = KernelExpr::combine(op, std::move(spec), std::move(leaves[i]));
    }
    std::vector<double> values = sample_gp(spec, cfg, rng);
    return SynthSeries{std::move(values), std::move(spec)};
}

std::vector<SynthSeries> generate_kernelsynth_corpus(const KernelSynthConfig& cfg,
                                                     int count, std::uint64_t seed,
                                                     int threads) {
    cfg.validate();
    if (count < 0) throw ConfigError("kernelsynth: count must be >= 0");
    const std::span<const BankEntry> bank = default_kernel_bank();
    std::vector<SynthSeries> corpus;
    corpus.resize(static_cast<std::size_t>(count),
                  SynthSeries{{}, KernelExpr::leaf(BaseKernel::Constant, 1.0)});
    parallel_for(corpus.size(), threads, [&](std::size_t i) {
        Rng rng = Rng::derive(seed, i);
        corpus[i] = kernelsynth_generate(bank, cfg, rng);
    });
    return corpus;
}

} // namespace tokencast

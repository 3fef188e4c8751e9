#include "drrl/neural.hpp"

#include "drrl/errors.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace drrl {

namespace {
constexpr const char* kCheckpointMagic = "drrl-mlp";
constexpr int kCheckpointVersion = 1;
} // namespace

Mlp::Mlp(int in, int h1, int h2, int out, OutputHead head)
    : in_(in), h1_(h1), h2_(h2), out_(out), head_(head) {
    if (in <= 0 || h1 <= 0 || h2 <= 0 || out <= 0) throw DimensionError("layer widths must be positive");
    if (head.bounded && !(head.g_max > 0.0)) throw DomainError("bounded head needs g_max > 0");
    theta_ = Eigen::VectorXd::Zero(offset_b(2) + out);
}

Mlp::Mlp(int in, int h1, int h2, int out, OutputHead head, Rng& rng) : Mlp(in, h1, h2, out, head) {
    for (int layer = 0; layer < 3; ++layer) {
        const double limit = std::sqrt(6.0 / (rows(layer) + cols(layer)));
        const Eigen::Index off = offset_w(layer);
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(rows(layer)) * cols(layer); ++i)
            theta_[off + i] = rng.uniform(-limit, limit);
    }
}

int Mlp::rows(int layer) const { return layer == 0 ? h1_ : layer == 1 ? h2_ : out_; }
int Mlp::cols(int layer) const { return layer == 0 ? in_ : layer == 1 ? h1_ : h2_; }

Eigen::Index Mlp::offset_w(int layer) const {
    Eigen::Index off = 0;
    for (int l = 0; l < layer; ++l) off += static_cast<Eigen::Index>(rows(l)) * cols(l) + rows(l);
    return off;
}

Eigen::Index Mlp::offset_b(int layer) const {
    return offset_w(layer) + static_cast<Eigen::Index>(rows(layer)) * cols(layer);
}

Mlp::MatMap Mlp::w(int layer) const { return MatMap(theta_.data() + offset_w(layer), rows(layer), cols(layer)); }
Mlp::VecMap Mlp::b(int layer) const { return VecMap(theta_.data() + offset_b(layer), rows(layer)); }

void Mlp::set_params(const Eigen::VectorXd& theta) {
    if (theta.size() != theta_.size()) throw DimensionError("parameter vector size mismatch");
    theta_ = theta;
    ++version_;
}

Eigen::VectorXd& Mlp::params_mut() {
    ++version_;
    return theta_;
}

bool Mlp::same_shape(const Mlp& o) const {
    return in_ == o.in_ && h1_ == o.h1_ && h2_ == o.h2_ && out_ == o.out_ && head_.bounded == o.head_.bounded &&
           head_.g_max == o.head_.g_max;
}

void Mlp::check_input(const Eigen::MatrixXd& x) const {
    if (x.rows() != in_) throw DimensionError("input has " + std::to_string(x.rows()) + " rows, network expects " +
                                              std::to_string(in_));
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
    check_input(x);
    Eigen::MatrixXd a1 = ((w(0) * x).colwise() + b(0)).cwiseMax(0.0);
    Eigen::MatrixXd a2 = ((w(1) * a1).colwise() + b(1)).cwiseMax(0.0);
    Eigen::MatrixXd z3 = (w(2) * a2).colwise() + b(2);
    if (!head_.bounded) return z3;
    return z3.unaryExpr([g = head_.g_max](double z) { return g / (1.0 + std::exp(-z)); });
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, MlpTape& t) const {
    check_input(x);
    t.x = x;
    t.z1 = (w(0) * x).colwise() + b(0);
    t.a1 = t.z1.cwiseMax(0.0);
    t.z2 = (w(1) * t.a1).colwise() + b(1);
    t.a2 = t.z2.cwiseMax(0.0);
    t.z3 = (w(2) * t.a2).colwise() + b(2);
    t.y = head_.bounded ? t.z3.unaryExpr([g = head_.g_max](double z) { return g / (1.0 + std::exp(-z)); })
                        : t.z3;
    t.version = version_;
    return t.y;
}

Eigen::VectorXd Mlp::backward(const MlpTape& t, const Eigen::MatrixXd& d_out) const {
    if (t.version != version_) throw ValidationError("stale tape: parameters changed after the forward pass");
    if (d_out.rows() != t.y.rows() || d_out.cols() != t.y.cols())
        throw DimensionError("output gradient shape does not match the forward pass");
    Eigen::MatrixXd dz3 = d_out;
    if (head_.bounded) {
        // dy/dz = y (1 - y / g_max)
        dz3 = d_out.cwiseProduct(t.y.cwiseProduct((1.0 - t.y.array() / head_.g_max).matrix()));
    }
    Eigen::VectorXd grad(theta_.size());
    auto put = [&](int layer, const Eigen::MatrixXd& dw, const Eigen::VectorXd& db) {
        Eigen::Map<Eigen::MatrixXd>(grad.data() + offset_w(layer), rows(layer), cols(layer)) = dw;
        Eigen::Map<Eigen::VectorXd>(grad.data() + offset_b(layer), rows(layer)) = db;
    };
    put(2, dz3 * t.a2.transpose(), dz3.rowwise().sum());
    Eigen::MatrixXd dz2 = (w(2).transpose() * dz3).cwiseProduct((t.z2.array() > 0.0).cast<double>().matrix());
    put(1, dz2 * t.a1.transpose(), dz2.rowwise().sum());
    Eigen::MatrixXd dz1 = (w(1).transpose() * dz2).cwiseProduct((t.z1.array() > 0.0).cast<double>().matrix());
    put(0, dz1 * t.x.transpose(), dz1.rowwise().sum());
    return grad;
}

void Mlp::save(std::ostream& out) const {
    out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n'
        << in_ << ' ' << h1_ << ' ' << h2_ << ' ' << out_ << ' ' << (head_.bounded ? 1 : 0) << ' ';
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", head_.g_max);
    out << buf << '\n' << theta_.size() << '\n';
    for (Eigen::Index i = 0; i < theta_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", theta_[i]);
        out << buf << '\n';
    }
}

Mlp Mlp::load(std::istream& in) {
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != kCheckpointMagic)
        throw ValidationError("not an mlp checkpoint");
    if (version != kCheckpointVersion)
        throw ValidationError("unsupported checkpoint version " + std::to_string(version));
    int i = 0, h1 = 0, h2 = 0, o = 0, bounded = 0;
    double g_max = 0.0;
    Eigen::Index n = 0;
    if (!(in >> i >> h1 >> h2 >> o >> bounded >> g_max >> n)) throw ValidationError("truncated checkpoint header");
    Mlp net(i, h1, h2, o, bounded ? OutputHead::sigmoid_scaled(g_max) : OutputHead::linear());
    if (n != net.num_params()) throw ValidationError("checkpoint parameter count does not match its shape header");
    Eigen::VectorXd theta(n);
    for (Eigen::Index k = 0; k < n; ++k)
        if (!(in >> theta[k])) throw ValidationError("truncated checkpoint parameters");
    net.set_params(theta);
    return net;
}

Adam::Adam(Eigen::Index n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(Eigen::VectorXd::Zero(n)), v_(Eigen::VectorXd::Zero(n)) {
    if (!(lr > 0.0) || !(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(eps > 0.0))
        throw DomainError("invalid Adam hyper-parameters");
}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
    if (grad.size() != m_.size() || params.size() != m_.size()) throw DimensionError("Adam size mismatch");
    if (!grad.allFinite()) {
        Eigen::Index bad = 0;
        for (; bad < grad.size() && std::isfinite(grad[bad]); ++bad) {}
        throw NumericFault("non-finite gradient at parameter " + std::to_string(bad) + " on Adam step " +
                           std::to_string(t_ + 1));
    }
    ++t_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
    v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

void Adam::step(Mlp& net, const Eigen::VectorXd& grad) { step(net.params_mut(), grad); }

void soft_update(Mlp& target, const Mlp& online, double tau) {
    if (!target.same_shape(online)) throw DimensionError("soft update between networks of different shapes");
    if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("tau must lie in [0, 1]");
    auto& t = target.params_mut();
    t = (1.0 - tau) * t + tau * online.params();
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, int obs_dim)
    : capacity_(capacity), obs_dim_(obs_dim) {
    if (capacity == 0 || obs_dim <= 0) throw DimensionError("buffer capacity and observation width must be positive");
    const std::size_t d = static_cast<std::size_t>(obs_dim);
    s_.resize(capacity * d);
    s_next_.resize(capacity * d);
    r_.resize(capacity);
    done_.resize(capacity);
    a_.resize(capacity);
}

void ReplayBuffer::push(const std::vector<double>& s, int a, double r, const std::vector<double>& s_next, bool done) {
    const auto d = static_cast<std::size_t>(obs_dim_);
    if (s.size() != d || s_next.size() != d) throw DimensionError("observation width mismatch");
    std::copy(s.begin(), s.end(), s_.begin() + static_cast<std::ptrdiff_t>(head_ * d));
    std::copy(s_next.begin(), s_next.end(), s_next_.begin() + static_cast<std::ptrdiff_t>(head_ * d));
    a_[head_] = a;
    r_[head_] = r;
    done_[head_] = done ? 1.0 : 0.0;
    head_ = (head_ + 1) % capacity_;
    if (size_ < capacity_) ++size_;
}

ReplayBatch ReplayBuffer::sample(std::size_t n, Rng& rng) const {
    if (size_ == 0) throw DomainError("cannot sample from an empty replay buffer");
    const auto d = static_cast<Eigen::Index>(obs_dim_);
    ReplayBatch b;
    b.s.resize(d, static_cast<Eigen::Index>(n));
    b.s_next.resize(d, static_cast<Eigen::Index>(n));
    b.a.resize(n);
    b.r.resize(static_cast<Eigen::Index>(n));
    b.done.resize(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = slot(static_cast<std::size_t>(rng.uniform_int(size_)));
        const auto col = static_cast<Eigen::Index>(j);
        for (Eigen::Index i = 0; i < d; ++i) {
            b.s(i, col) = s_[k * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)];
            b.s_next(i, col) = s_next_[k * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)];
        }
        b.a[j] = a_[k];
        b.r[col] = r_[k];
        b.done[col] = done_[k];
    }
    return b;
}

double ReplayBuffer::reward_at(std::size_t i) const {
    if (i >= size_) throw DomainError("buffer index out of range");
    return r_[slot(i)];
}

} // namespace drrl

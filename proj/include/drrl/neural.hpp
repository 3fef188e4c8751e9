#pragma once

#include "drrl/rng.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace drrl {

/// Output head of an Mlp. Bounded heads squash with g_max * logistic(z).
struct OutputHead {
    bool bounded = false;
    double g_max = 10.0;

    static OutputHead linear() { return {}; }
    static OutputHead sigmoid_scaled(double g_max) { return {true, g_max}; }
};

/// Cached activations of one forward pass; tied to the parameter version that produced it.
struct MlpTape {
    Eigen::MatrixXd x, z1, a1, z2, a2, z3, y;
    std::uint64_t version = 0;
};

/**
 * in -> ReLU(h1) -> ReLU(h2) -> out, optionally bounded. Batches are columns.
 *
 * All parameters live in one flat vector ordered W1, b1, W2, b2, W3, b3 with
 * column-major weights, so gradients and optimizer moments share its layout.
 */
class Mlp {
public:
    Mlp() = default;
    Mlp(int in, int h1, int h2, int out, OutputHead head = OutputHead::linear());
    /// Xavier-uniform weights, zero biases.
    Mlp(int in, int h1, int h2, int out, OutputHead head, Rng& rng);

    int input_dim() const noexcept { return in_; }
    int output_dim() const noexcept { return out_; }
    int hidden1() const noexcept { return h1_; }
    int hidden2() const noexcept { return h2_; }
    const OutputHead& head() const noexcept { return head_; }

    Eigen::Index num_params() const noexcept { return theta_.size(); }
    const Eigen::VectorXd& params() const noexcept { return theta_; }
    void set_params(const Eigen::VectorXd& theta);
    /// Mutable access; invalidates existing tapes.
    Eigen::VectorXd& params_mut();
    std::uint64_t version() const noexcept { return version_; }

    Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
    Eigen::MatrixXd forward(const Eigen::MatrixXd& x, MlpTape& tape) const;
    /// Gradient of sum(d_out .* y) w.r.t. the parameters. Throws on a stale tape.
    Eigen::VectorXd backward(const MlpTape& tape, const Eigen::MatrixXd& d_out) const;

    void save(std::ostream& out) const;
    static Mlp load(std::istream& in);

    bool same_shape(const Mlp& other) const;

private:
    using MatMap = Eigen::Map<const Eigen::MatrixXd>;
    using VecMap = Eigen::Map<const Eigen::VectorXd>;
    MatMap w(int layer) const;
    VecMap b(int layer) const;
    Eigen::Index offset_w(int layer) const;
    Eigen::Index offset_b(int layer) const;
    int rows(int layer) const;
    int cols(int layer) const;
    void check_input(const Eigen::MatrixXd& x) const;

    int in_ = 0, h1_ = 0, h2_ = 0, out_ = 0;
    OutputHead head_;
    Eigen::VectorXd theta_;
    std::uint64_t version_ = 1;
};

class Adam {
public:
    explicit Adam(Eigen::Index num_params, double lr = 3e-4, double beta1 = 0.9, double beta2 = 0.999,
                  double eps = 1e-8);

    /// One bias-corrected step. Throws NumericFault on a non-finite gradient.
    void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
    void step(Mlp& net, const Eigen::VectorXd& grad);

    std::uint64_t steps() const noexcept { return t_; }
    const Eigen::VectorXd& first_moment() const noexcept { return m_; }
    const Eigen::VectorXd& second_moment() const noexcept { return v_; }
    double learning_rate() const noexcept { return lr_; }

private:
    double lr_, beta1_, beta2_, eps_;
    Eigen::VectorXd m_, v_;
    std::uint64_t t_ = 0;
};

/// target <- (1 - tau) target + tau online.
void soft_update(Mlp& target, const Mlp& online, double tau);

struct ReplayBatch {
    Eigen::MatrixXd s;      ///< obs_dim x B
    std::vector<int> a;
    Eigen::VectorXd r;
    Eigen::MatrixXd s_next; ///< obs_dim x B
    Eigen::VectorXd done;   ///< 1 for terminal transitions
};

/// FIFO ring of (s, a, r, s', done); uniform sampling with replacement.
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, int obs_dim);

    void push(const std::vector<double>& s, int a, double r, const std::vector<double>& s_next, bool done);
    ReplayBatch sample(std::size_t batch_size, Rng& rng) const;

    std::size_t size() const noexcept { return size_; }
    std::size_t capacity() const noexcept { return capacity_; }
    int obs_dim() const noexcept { return obs_dim_; }
    /// i-th stored transition in insertion order among current contents (0 = oldest).
    double reward_at(std::size_t i) const;

private:
    std::size_t slot(std::size_t i) const { return (head_ + capacity_ - size_ + i) % capacity_; }

    std::size_t capacity_;
    int obs_dim_;
    std::vector<double> s_, s_next_, r_, done_;
    std::vector<int> a_;
    std::size_t head_ = 0; // next write position
    std::size_t size_ = 0;
};

} // namespace drrl

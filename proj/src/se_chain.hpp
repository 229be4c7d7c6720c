#pragma once

// Composed denoiser chains shared by the state evolution and the auxiliary AMP.
//   G_s = z_s + nu_s V* - alpha beta_s V_{s-1} + sum_{i<s} B_{s,i} V_i,   V_s = v_s(G_s)
//   F_s = y_s + mu_s U* - abar_s U_s + sum_{i<=s} A_{s,i} U_i,           U_{s+1} = u_{s+1}(F_s)
// together with the Jacobians dV_s/dz_j and dU_s/dy_j by the chain rule.

#include <vector>

#include "spikebench/denoisers.hpp"
#include "spikebench/matrix.hpp"

namespace spikebench::detail {

// Random variables as sample vectors (Monte Carlo, or coordinates of an iterate).
struct SampleBackend {
  using Var = Vec;
  Eigen::Index len;
  Var one() const { return Vec::Ones(len); }
  Var zero() const { return Vec::Zero(len); }
  double E(const Var& a, const Var& b) const { return spikebench::dot(a, b) / static_cast<double>(len); }
  Var hadamard(const Var& d, const Var& x) const { return d.cwiseProduct(x); }
  void apply_v(const Denoisers& den, int t, const Var& x, Var& out, Var& d) const { den.apply_v(t, x, out, &d); }
  void apply_u(const Denoisers& den, int t, const Var& x, Var& out, Var& d) const { den.apply_u(t, x, out, &d); }
};

// Random variables as coefficient vectors over a Gaussian basis with covariance K.
// Index 0 is the constant 1, so derivatives of linear maps are multiples of it.
struct LinearBackend {
  using Var = Vec;
  SmallMat K;
  Var one() const {
    Var v = Vec::Zero(K.rows());
    v[0] = 1;
    return v;
  }
  Var zero() const { return Vec::Zero(K.rows()); }
  double E(const Var& a, const Var& b) const { return a.dot(K * b); }
  Var hadamard(const Var& d, const Var& x) const { return d[0] * x; }
  void apply_v(const Denoisers& den, int t, const Var& x, Var& out, Var& d) const {
    const double c = den.coef_v(t);
    out = c * x;
    d = c * one();
  }
  void apply_u(const Denoisers& den, int t, const Var& x, Var& out, Var& d) const {
    const double c = den.coef_u(t);
    out = c * x;
    d = c * one();
  }
};

template <class BE>
class Chain {
 public:
  using Var = typename BE::Var;

  // bu works on u-side variables, bv on v-side ones (they differ for finite-n iterates).
  Chain(const BE& bu, const BE& bv, const Denoisers& den, double alpha) : bu_(bu), bv_(bv), den_(den), alpha_(alpha) {}

  void reset_u(const Var& u1, const Var& ustar) {
    ustar_ = ustar;
    U_.assign(1, u1);
    dU_.assign(1, {});
  }
  void reset_v(const Var& vstar) {
    vstar_ = vstar;
    V_.clear();
    dV_.clear();
  }

  struct Pushed {
    double mean_deriv;
    Var pre;
  };

  // Appends V_s, s = size()+1. Brow has length >= s-1 (row s of B).
  Pushed push_v(const Var& z, double nu, double beta, const double* Brow) {
    const int s = static_cast<int>(V_.size()) + 1;
    Var G = z;
    G += nu * vstar_;
    std::vector<Var> dG(static_cast<std::size_t>(s), bv_.zero());
    dG[s - 1] = bv_.one();
    if (s > 1 && beta != 0.0) {
      G -= alpha_ * beta * V_[s - 2];
      for (int j = 0; j < s - 1; ++j) dG[j] -= alpha_ * beta * dV_[s - 2][j];
    }
    for (int i = 0; i < s - 1; ++i) {
      if (Brow[i] == 0.0) continue;
      G += Brow[i] * V_[i];
      for (int j = 0; j <= i; ++j) dG[j] += Brow[i] * dV_[i][j];
    }
    Var out, d;
    bv_.apply_v(den_, s, G, out, d);
    std::vector<Var> row(static_cast<std::size_t>(s));
    for (int j = 0; j < s; ++j) row[j] = bv_.hadamard(d, dG[j]);
    V_.push_back(std::move(out));
    dV_.push_back(std::move(row));
    return {bv_.E(d, bv_.one()), std::move(G)};
  }

  // Appends U_{s+1} with s = number of U's so far. Arow has length >= s.
  Pushed push_u(const Var& y, double mu, double abar, const double* Arow) {
    const int s = static_cast<int>(U_.size());
    Var F = y;
    F += mu * ustar_;
    std::vector<Var> dF(static_cast<std::size_t>(s), bu_.zero());
    dF[s - 1] = bu_.one();
    // U_s depends on y_1..y_{s-1}
    F -= abar * U_[s - 1];
    for (int j = 0; j < s - 1; ++j) dF[j] -= abar * dU_[s - 1][j];
    for (int i = 0; i < s; ++i) {
      if (Arow[i] == 0.0) continue;
      F += Arow[i] * U_[i];
      for (int j = 0; j < i; ++j) dF[j] += Arow[i] * dU_[i][j];
    }
    Var out, d;
    bu_.apply_u(den_, s + 1, F, out, d);
    std::vector<Var> row(static_cast<std::size_t>(s));
    for (int j = 0; j < s; ++j) row[j] = bu_.hadamard(d, dF[j]);
    U_.push_back(std::move(out));
    dU_.push_back(std::move(row));
    return {bu_.E(d, bu_.one()), std::move(F)};
  }

  int nu() const { return static_cast<int>(U_.size()); }
  int nv() const { return static_cast<int>(V_.size()); }
  const Var& U(int i) const { return U_[i - 1]; }
  const Var& V(int i) const { return V_[i - 1]; }
  const Var& ustar() const { return ustar_; }
  const Var& vstar() const { return vstar_; }

  // k x k blocks, zero-padded beyond the variables that exist.
  SmallMat Delta(int k) const { return gram(bu_, U_, k); }
  SmallMat Gamma(int k) const { return gram(bv_, V_, k); }
  SmallMat Phi(int k) const { return jac(bu_, dU_, k); }
  SmallMat Psi(int k) const { return jac(bv_, dV_, k); }

 private:
  static SmallMat gram(const BE& be_, const std::vector<Var>& X, int k) {
    SmallMat M = SmallMat::Zero(k, k);
    const int have = std::min<int>(k, static_cast<int>(X.size()));
    for (int i = 0; i < have; ++i)
      for (int j = 0; j <= i; ++j) M(i, j) = M(j, i) = be_.E(X[i], X[j]);
    return M;
  }
  static SmallMat jac(const BE& be_, const std::vector<std::vector<Var>>& D, int k) {
    SmallMat M = SmallMat::Zero(k, k);
    const int have = std::min<int>(k, static_cast<int>(D.size()));
    const Var one = be_.one();
    for (int i = 0; i < have; ++i)
      for (int j = 0; j < std::min<int>(k, static_cast<int>(D[i].size())); ++j) M(i, j) = be_.E(D[i][j], one);
    return M;
  }

  const BE& bu_;
  const BE& bv_;
  const Denoisers& den_;
  double alpha_;
  Var ustar_, vstar_;
  std::vector<Var> U_, V_;
  std::vector<std::vector<Var>> dU_, dV_;
};

}  // namespace spikebench::detail

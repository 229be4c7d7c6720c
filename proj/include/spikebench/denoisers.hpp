#pragma once

#include <functional>
#include <vector>

#include "spikebench/matrix.hpp"

namespace spikebench {

enum class DenoiserKind { LinearAssumedModel, SphereProjection, Custom };

// Separable scalar maps with exact derivatives. v(t, x) is v_t; u(t, x) is u_t for t >= 2.
struct CustomDenoiser {
  std::function<double(int, double)> v, dv, u, du;
};

struct DenoiserSpec {
  DenoiserKind kind = DenoiserKind::LinearAssumedModel;
  CustomDenoiser custom;
};

// Coefficients of the Gaussian-believing statistician: v_t(x) = c[t-1] x, u_{t+1}(x) = d[t-1] x.
struct LinearSchedule {
  std::vector<double> c;
  std::vector<double> d;
};

// Scalar state evolution of the assumed rectangular Gaussian model at SNR lambda,
// started from overlap eps and unit second moment.
LinearSchedule assumed_model_schedule(double lambda, double alpha, double eps, int t_max);

class Denoisers {
 public:
  static Denoisers make(const DenoiserSpec& spec, double lambda, double alpha, double eps, int t_max);

  DenoiserKind kind() const { return kind_; }
  bool separable() const { return kind_ != DenoiserKind::SphereProjection; }
  bool linear() const { return kind_ == DenoiserKind::LinearAssumedModel; }
  int t_max() const { return t_max_; }

  // out = v_t(x); deriv (if given) receives v_t'(x) entrywise.
  void apply_v(int t, const Vec& x, Vec& out, Vec* deriv) const;
  // out = u_t(x) for t >= 2.
  void apply_u(int t, const Vec& x, Vec& out, Vec* deriv) const;
  // Linear coefficients (LinearAssumedModel only).
  double coef_v(int t) const;
  double coef_u(int t) const;

 private:
  DenoiserKind kind_ = DenoiserKind::LinearAssumedModel;
  LinearSchedule sched_;
  CustomDenoiser custom_;
  int t_max_ = 0;
};

}  // namespace spikebench

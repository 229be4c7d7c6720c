#include "spikebench/denoisers.hpp"

#include <cmath>
#include <string>

#include "spikebench/error.hpp"

namespace spikebench {

LinearSchedule assumed_model_schedule(double lambda, double alpha, double eps, int t_max) {
  if (t_max < 1) throw DomainError("t_max must be >= 1");
  LinearSchedule s;
  double qu = eps, su = 1.0;
  for (int t = 1; t <= t_max; ++t) {
    const double nu = std::sqrt(lambda * alpha) * qu;
    const double tau = alpha * su;
    const double c = (nu * nu + tau) > 0 ? nu / (nu * nu + tau) : 0.0;
    const double qv = (nu * nu + tau) > 0 ? nu * nu / (nu * nu + tau) : 0.0;
    const double mu = std::sqrt(lambda / alpha) * qv;
    const double sig = qv;
    const double d = (mu * mu + sig) > 0 ? mu / (mu * mu + sig) : 0.0;
    qu = su = (mu * mu + sig) > 0 ? mu * mu / (mu * mu + sig) : 0.0;
    s.c.push_back(c);
    s.d.push_back(d);
  }
  return s;
}

Denoisers Denoisers::make(const DenoiserSpec& spec, double lambda, double alpha, double eps, int t_max) {
  Denoisers d;
  d.kind_ = spec.kind;
  d.t_max_ = t_max;
  if (spec.kind == DenoiserKind::LinearAssumedModel) d.sched_ = assumed_model_schedule(lambda, alpha, eps, t_max);
  if (spec.kind == DenoiserKind::Custom) {
    const auto& c = spec.custom;
    if (!c.v || !c.dv || !c.u || !c.du) throw DomainError("custom denoiser needs v, dv, u and du");
    d.custom_ = c;
  }
  return d;
}

namespace {

void sphere(const Vec& x, Vec& out, Vec* deriv) {
  const double nrm = x.norm();
  const double c = nrm > 0 ? std::sqrt(static_cast<double>(x.size())) / nrm : 0.0;
  out = c * x;
  // Onsager proxy: the radial factor; the projection term is O(1/dim).
  if (deriv) deriv->setConstant(x.size(), c);
}

void scalar_map(const std::function<double(int, double)>& f, const std::function<double(int, double)>& df, int t,
                const Vec& x, Vec& out, Vec* deriv) {
  out.resize(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = f(t, x[i]);
  if (deriv) {
    deriv->resize(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) (*deriv)[i] = df(t, x[i]);
  }
}

}  // namespace

double Denoisers::coef_v(int t) const {
  if (!linear()) throw DomainError("coef_v needs a linear denoiser");
  if (t < 1 || t > static_cast<int>(sched_.c.size())) throw DomainError("v_t index out of schedule");
  return sched_.c[t - 1];
}

double Denoisers::coef_u(int t) const {
  if (!linear()) throw DomainError("coef_u needs a linear denoiser");
  if (t < 2 || t - 1 > static_cast<int>(sched_.d.size())) throw DomainError("u_t index out of schedule");
  return sched_.d[t - 2];
}

void Denoisers::apply_v(int t, const Vec& x, Vec& out, Vec* deriv) const {
  switch (kind_) {
    case DenoiserKind::LinearAssumedModel: {
      const double c = coef_v(t);
      out = c * x;
      if (deriv) deriv->setConstant(x.size(), c);
      return;
    }
    case DenoiserKind::SphereProjection:
      sphere(x, out, deriv);
      return;
    case DenoiserKind::Custom:
      scalar_map(custom_.v, custom_.dv, t, x, out, deriv);
      return;
  }
}

void Denoisers::apply_u(int t, const Vec& x, Vec& out, Vec* deriv) const {
  switch (kind_) {
    case DenoiserKind::LinearAssumedModel: {
      const double d = coef_u(t);
      out = d * x;
      if (deriv) deriv->setConstant(x.size(), d);
      return;
    }
    case DenoiserKind::SphereProjection:
      sphere(x, out, deriv);
      return;
    case DenoiserKind::Custom:
      scalar_map(custom_.u, custom_.du, t, x, out, deriv);
      return;
  }
}

}  // namespace spikebench

#include "ltmopt/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "ltmopt/error.hpp"
#include "ltmopt/kernels.hpp"

namespace ltmopt {

MeanFieldCurve::MeanFieldCurve(const Statistics& p) {
  mean_d_ = moment(p, Moment::d);
  std::map<std::pair<std::int32_t, std::int32_t>, std::pair<double, double>> merged;
  for (std::size_t w = 0; w < p.size(); ++w) {
    const auto& t = p.types[w];
    auto& acc = merged[{t.k, t.r}];
    acc.first += p.mass[w];
    acc.second += p.mass[w] * t.d;
    total_mass_ += p.mass[w];
    if (p.mass[w] > 0.0 && t.r >= 1) positive_thresholds_ = true;
  }
  for (const auto& [kr, weights] : merged) {
    const double phi_w = mean_d_ > 0.0 ? weights.second / mean_d_ : 0.0;
    terms_.push_back({kr.first, kr.second, weights.first, phi_w});
  }
}

double MeanFieldCurve::psi(double z) const {
  double s = 0.0;
  for (const auto& t : terms_) {
    if (t.psi_weight != 0.0) s += t.psi_weight * binomial_tail(t.k, t.r, z);
  }
  return std::min(s, 1.0);
}

double MeanFieldCurve::phi(double z) const {
  if (!(mean_d_ > 0.0)) throw InvalidArgument("phi is undefined when <p, d> = 0");
  double s = 0.0;
  for (const auto& t : terms_) {
    if (t.phi_weight != 0.0) s += t.phi_weight * binomial_tail(t.k, t.r, z);
  }
  return std::min(s, 1.0);
}

void MeanFieldCurve::evaluate(std::span<const double> z, std::span<double> psi_out,
                              std::span<double> phi_out) const {
  if (!phi_out.empty() && !(mean_d_ > 0.0)) {
    throw InvalidArgument("phi is undefined when <p, d> = 0");
  }
  for (auto& v : psi_out) v = 0.0;
  for (auto& v : phi_out) v = 0.0;
  std::vector<double> tail(z.size());
  for (const auto& t : terms_) {
    for (std::size_t i = 0; i < z.size(); ++i) tail[i] = binomial_tail(t.k, t.r, z[i]);
    if (!psi_out.empty()) kernels::axpy(t.psi_weight, tail, psi_out);
    if (!phi_out.empty()) kernels::axpy(t.phi_weight, tail, phi_out);
  }
  for (auto& v : psi_out) v = std::min(v, 1.0);
  for (auto& v : phi_out) v = std::min(v, 1.0);
}

double psi(const Statistics& p, double z) { return MeanFieldCurve(p).psi(z); }

double phi(const Statistics& p, double z) { return MeanFieldCurve(p).phi(z); }

double coeff_a(const AgentType& w, std::int32_t eta, double z, double mean_d0) {
  if (eta < 1 || eta > w.r) {
    throw InvalidArgument("coefficient a_w(eta, z) needs 1 <= eta <= r_w");
  }
  if (!(mean_d0 > 0.0)) throw InvalidArgument("coefficient a_w(eta, z) needs <p0, d> > 0");
  const double diff = binomial_tail(w.k, w.r - eta, z) - binomial_tail(w.k, w.r, z);
  return w.d * (diff > 0.0 ? diff : 0.0) / mean_d0;
}

double coeff_a(const AgentType& w, std::int32_t eta, double z, const Statistics& p0) {
  return coeff_a(w, eta, z, moment(p0, Moment::d));
}

double phi_decomposed(const Statistics& p0, const StatIntervention& xi, double z) {
  xi.validate_against(p0);
  const double mean_d0 = moment(p0, Moment::d);
  double s = MeanFieldCurve(p0).phi(z);
  for (std::size_t w = 0; w < p0.size(); ++w) {
    const auto& t = p0.types[w];
    for (std::int32_t eta = 1; eta <= t.r; ++eta) {
      if (xi.xi[w][eta] != 0.0) s += coeff_a(t, eta, z, mean_d0) * xi.xi[w][eta];
    }
  }
  return s;
}

RecursionPath recursion(const Statistics& p, std::size_t t_max, double z0, double y0, double tol) {
  const MeanFieldCurve curve(p);
  RecursionPath path;
  path.z.push_back(z0);
  path.y.push_back(y0);
  for (std::size_t t = 0; t < t_max; ++t) {
    const double z = path.z.back();
    const double z_next = curve.phi(z);
    const double y_next = curve.psi(z);
    if (std::abs(z_next - z) < tol && std::abs(y_next - path.y.back()) < tol) {
      path.converged = true;
      break;
    }
    path.z.push_back(z_next);
    path.y.push_back(y_next);
  }
  return path;
}

double derivative_bound(const Statistics& p0) {
  const auto s = degree_summary(p0);
  const double mean_d0 = moment(p0, Moment::d);
  if (!(mean_d0 > 0.0)) return std::numeric_limits<double>::infinity();
  return s.d_max * std::ldexp(1.0, s.k_max + 1) * s.k_max / mean_d0 + 1.0;
}

double psi_inverse(const Statistics& p, double level) {
  const MeanFieldCurve curve(p);
  if (level <= 0.0) return 0.0;
  if (level > curve.psi_at_one() + 1e-12) {
    throw InvalidArgument("psi_inverse: level exceeds psi(1)");
  }
  if (curve.psi(0.0) >= level) return 0.0;
  // psi < 1 on [0, 1) as soon as some mass has a positive threshold.
  if (level >= 1.0) return curve.has_positive_thresholds() ? 1.0 : 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (curve.psi(mid) >= level) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::vector<CurveRow> curve_table(const Statistics& p, std::size_t resolution) {
  if (resolution == 0) throw InvalidArgument("curve resolution must be positive");
  std::vector<double> z(resolution + 1);
  for (std::size_t i = 0; i <= resolution; ++i) {
    z[i] = static_cast<double>(i) / static_cast<double>(resolution);
  }
  const MeanFieldCurve curve(p);
  std::vector<double> ps(z.size());
  std::vector<double> ph(z.size());
  curve.evaluate(z, ps, ph);
  std::vector<CurveRow> rows;
  rows.reserve(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) rows.push_back({z[i], ps[i], ph[i]});
  return rows;
}

}  // namespace ltmopt

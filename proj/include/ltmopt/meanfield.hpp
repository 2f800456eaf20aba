#pragma once

// Local mean-field maps of the threshold dynamics on configuration-model
// networks: psi_p(z) (fraction of active agents given that a fraction z of
// links point to active agents) and phi_p(z) (next fraction of such links).

#include <cstdint>
#include <span>
#include <vector>

#include "ltmopt/binomial.hpp"
#include "ltmopt/typestats.hpp"

namespace ltmopt {

inline double phi_kr(std::int64_t k, std::int64_t r, double z) { return binomial_tail(k, r, z); }

// psi and phi bound to one statistics. Types sharing (k, r) are merged, so an
// evaluation costs one binomial tail per distinct (k, r).
class MeanFieldCurve {
 public:
  explicit MeanFieldCurve(const Statistics& p);

  double psi(double z) const;
  // Throws InvalidArgument when <p, d> == 0.
  double phi(double z) const;

  // Grid evaluation; outputs must have z.size() entries. Either output may be empty.
  void evaluate(std::span<const double> z, std::span<double> psi_out,
                std::span<double> phi_out) const;

  double mean_in_degree() const { return mean_d_; }
  // psi(1) (the total mass; 1 up to rounding).
  double psi_at_one() const { return total_mass_; }
  // True when some positive mass has r >= 1 (psi < 1 on [0, 1)).
  bool has_positive_thresholds() const { return positive_thresholds_; }

 private:
  struct Term {
    std::int32_t k;
    std::int32_t r;
    double psi_weight;
    double phi_weight;
  };
  std::vector<Term> terms_;
  double mean_d_ = 0.0;
  double total_mass_ = 0.0;
  bool positive_thresholds_ = false;
};

double psi(const Statistics& p, double z);
double phi(const Statistics& p, double z);

// a_w(eta, z) = d_w (phi_{k, r-eta}(z) - phi_{k, r}(z)) / <p0, d>, for 1 <= eta <= r.
double coeff_a(const AgentType& w, std::int32_t eta, double z, double mean_d0);
double coeff_a(const AgentType& w, std::int32_t eta, double z, const Statistics& p0);

// phi_{p(xi)}(z) through the linear decomposition in xi.
double phi_decomposed(const Statistics& p0, const StatIntervention& xi, double z);

struct RecursionPath {
  std::vector<double> z;  // z(0..T)
  std::vector<double> y;  // y(0..T)
  bool converged = false;
};

// y(t+1) = psi(z(t)), z(t+1) = phi(z(t)) from (z0, y0). Stops once both
// increments fall below tol; the stationary step is not appended.
RecursionPath recursion(const Statistics& p, std::size_t t_max, double z0 = 0.0, double y0 = 0.0,
                        double tol = 1e-12);

// Uniform bound on |d/dz (phi_{p(xi)}(z) - z)| over every intervention xi
// consistent with p0: d_max 2^{k_max+1} k_max / <p0, d> + 1. +inf on overflow.
double derivative_bound(const Statistics& p0);

// inf { z in [0, 1] : psi_p(z) >= level }, to absolute accuracy 1e-12.
// Throws InvalidArgument when level > psi_p(1).
double psi_inverse(const Statistics& p, double level);

struct CurveRow {
  double z;
  double psi;
  double phi;
};

// resolution + 1 equally spaced points on [0, 1].
std::vector<CurveRow> curve_table(const Statistics& p, std::size_t resolution);

}  // namespace ltmopt

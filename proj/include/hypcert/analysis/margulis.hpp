#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "hypcert/analysis/classify.hpp"
#include "hypcert/error.hpp"

namespace hypcert {

struct membership {
  bool member = false;
  std::optional<long> witness_power;
  long cap_used = 0;  // powers 1..cap_used were examined (negative powers give the same distances)
};

/// Is x in the generalised domain: some 0 < |i| <= cap with d(x, g^i x) <= eps?
template <class Model>
membership margulis_membership(const Model& m, const isometry_profile<Model>& prof,
                               const typename Model::isometry& g, double eps, const typename Model::point& x,
                               long power_cap, double tol = default_tolerance) {
  if (!(eps > 0)) throw input_error("eps must be positive");
  if (power_cap < 1) throw input_error("power cap must be at least 1");
  membership out;
  out.cap_used = power_cap;
  if (prof.kind == isometry_kind::hyperbolic && prof.ell > 0)
    out.cap_used = std::min<long>(power_cap, std::max<long>(1, static_cast<long>(std::ceil(eps / prof.ell - tol))));
  auto y = x;
  for (long i = 1; i <= out.cap_used; ++i) {
    y = m.apply(g, y);
    if (static_cast<double>(m.distance(x, y)) <= eps + tol) {
      out.member = true;
      out.witness_power = i;
      return out;
    }
  }
  return out;
}

template <class Model>
membership margulis_membership(const Model& m, const typename Model::isometry& g, double eps,
                               const typename Model::point& x, long power_cap = 64) {
  return margulis_membership(m, classify(m, g), g, eps, x, power_cap);
}

template <class Model>
struct margulis_domain_sample {
  double eps = 0.0;
  long power_cap = 0;
  std::vector<typename Model::point> members;
  std::vector<long> witness_powers;
  std::vector<typename Model::point> boundary_shell;  // non-members adjacent (within shell_width) to members
};

template <class Model>
margulis_domain_sample<Model> margulis_domain(const Model& m, const typename Model::isometry& g, double eps,
                                              const std::vector<typename Model::point>& sample, long power_cap = 64,
                                              double shell_width = 0.25) {
  auto prof = classify(m, g);
  margulis_domain_sample<Model> out;
  out.eps = eps;
  out.power_cap = power_cap;
  std::vector<typename Model::point> outside;
  for (const auto& x : sample) {
    auto r = margulis_membership(m, prof, g, eps, x, power_cap);
    if (r.member) {
      out.members.push_back(x);
      out.witness_powers.push_back(*r.witness_power);
    } else {
      outside.push_back(x);
    }
  }
  for (const auto& x : outside)
    for (const auto& y : out.members)
      if (static_cast<double>(m.distance(x, y)) <= shell_width) {
        out.boundary_shell.push_back(x);
        break;
      }
  return out;
}

struct domain_gap_options {
  long power_cap = 64;
  std::optional<double> P0;
  std::optional<double> r0;
  double sampling_slack = 0.02;
};

struct domain_gap_report {
  double eps1 = 0.0, eps2 = 0.0;
  long power_cap = 0;
  std::size_t samples = 0;
  std::size_t inner_members = 0;
  std::size_t outer_members = 0;
  std::optional<double> min_gap_observed;     // over sampled x outside M_eps2
  double lower_bound_i = 0.0;                 // (eps2 - eps1)/2
  std::optional<double> lower_bound_ii;       // only when eps2 <= r0
  std::optional<double> upper_span_observed;  // empirical stand-in for K0
  std::optional<double> displacement_ratio_observed;  // empirical c(eps, delta)
  bool holds = true;                                  // min gap >= lower_bound_i - slack
};

/// log(2/eps1 - 1) / (2 log(1+P0)) * eps2 - 1/2.
inline double margulis_gap_bound_ii(double P0, double eps1, double eps2) {
  return std::log(2.0 / eps1 - 1.0) / (2.0 * std::log(1.0 + P0)) * eps2 - 0.5;
}

template <class Model>
domain_gap_report domain_gap(const Model& m, const typename Model::isometry& g, double eps1, double eps2,
                             const std::vector<typename Model::point>& sample, const domain_gap_options& opt = {}) {
  if (!(eps1 > 0) || eps2 < eps1) throw input_error("domain gap needs 0 < eps1 <= eps2");
  auto prof = classify(m, g);
  domain_gap_report rep;
  rep.eps1 = eps1;
  rep.eps2 = eps2;
  rep.power_cap = opt.power_cap;
  rep.samples = sample.size();
  rep.lower_bound_i = 0.5 * (eps2 - eps1);
  if (opt.r0 && opt.P0 && eps2 <= *opt.r0) rep.lower_bound_ii = margulis_gap_bound_ii(*opt.P0, eps1, eps2);

  std::vector<char> in1(sample.size()), in2(sample.size()), in_plain(sample.size());
  for (std::size_t k = 0; k < sample.size(); ++k) {
    in1[k] = margulis_membership(m, prof, g, eps1, sample[k], opt.power_cap).member;
    in2[k] = in1[k] || margulis_membership(m, prof, g, eps2, sample[k], opt.power_cap).member;
    in_plain[k] = static_cast<double>(m.distance(sample[k], m.apply(g, sample[k]))) <= eps1 + default_tolerance;
    rep.inner_members += in1[k];
    rep.outer_members += in2[k];
  }
  if (rep.inner_members == 0) throw precondition_error("inner Margulis domain is empty on the sample");

  auto dist_to = [&](std::size_t k, const std::vector<char>& in) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < sample.size(); ++j)
      if (in[j]) best = std::min(best, static_cast<double>(m.distance(sample[k], sample[j])));
    return best;
  };
  bool any_plain = false;
  for (char c : in_plain) any_plain = any_plain || c;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    if (!in2[k]) {
      double gap = dist_to(k, in1);
      rep.min_gap_observed = rep.min_gap_observed ? std::min(*rep.min_gap_observed, gap) : gap;
    } else {
      double span = dist_to(k, in1);
      rep.upper_span_observed = rep.upper_span_observed ? std::max(*rep.upper_span_observed, span) : span;
    }
    if (any_plain && !in_plain[k]) {
      double ratio = static_cast<double>(m.distance(sample[k], m.apply(g, sample[k]))) / dist_to(k, in_plain);
      rep.displacement_ratio_observed =
          rep.displacement_ratio_observed ? std::min(*rep.displacement_ratio_observed, ratio) : ratio;
    }
  }
  if (rep.min_gap_observed) rep.holds = *rep.min_gap_observed >= rep.lower_bound_i - opt.sampling_slack;
  return rep;
}

}  // namespace hypcert

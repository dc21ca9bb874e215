#include "dormhgt/equilibria.hpp"

#include <cmath>

namespace dormhgt {

void validate(const ModelParams& q) {
  auto bad = [](const char* msg) { throw std::invalid_argument(msg); };
  if (!(q.lambda1 > 0) || !std::isfinite(q.lambda1)) bad("lambda1 must be > 0");
  if (!(q.lambda2 > 0) || !std::isfinite(q.lambda2)) bad("lambda2 must be > 0");
  if (!(q.mu > 0) || !std::isfinite(q.mu)) bad("mu must be > 0");
  if (!(q.C > 0) || !std::isfinite(q.C)) bad("C must be > 0");
  if (!(q.sigma > 0) || !std::isfinite(q.sigma)) bad("sigma must be > 0");
  if (!(q.p >= 0 && q.p < 1)) bad("p must be in [0, 1)");
  if (!(q.kappa >= 0) || !std::isfinite(q.kappa)) bad("kappa must be >= 0");
  if (!(q.tau >= 0) || !std::isfinite(q.tau)) bad("tau must be >= 0");
}

double middle_expression(const ModelParams& q) {
  if (q.tau <= 0)
    throw AnalysisError(
        "HGT-free case (tau = 0): coexistence conditions undefined; use the "
        "tau = 0 classification");
  const double kms = q.kappa * q.mu + q.sigma;
  return q.C * q.p * q.sigma / (q.tau * kms) * (q.lambda2 - q.mu) +
         q.C / q.tau * (q.lambda1 - q.lambda2);
}

double trait2_equilibrium(const ModelParams& q) {
  return std::max(q.lambda2 - q.mu, 0.0) / q.C;
}

double trait2_equilibrium_signed(const ModelParams& q) {
  return (q.lambda2 - q.mu) / q.C;
}

std::array<double, 2> trait1_equilibrium(const ModelParams& q) {
  const double growth = std::max(q.lambda1 - q.mu, 0.0);
  const double kms = q.kappa * q.mu + q.sigma;
  const double denom = q.kappa * q.mu + (1.0 - q.p) * q.sigma;
  const double n1a = growth / q.C * kms / denom;
  const double n1d = growth * growth * q.p * kms / (q.C * denom * denom);
  return {n1a, n1d};
}

CoexistenceKind coexistence_kind(const ModelParams& q) {
  const double m = middle_expression(q);
  const double g1 = (q.lambda2 - q.mu) - m;
  const double g2 = m - (q.lambda1 - q.mu);
  if (std::abs(g1) <= kBoundaryTol || std::abs(g2) <= kBoundaryTol)
    return CoexistenceKind::Boundary;
  const bool founder_chain = g1 > 0 && g2 > 0;
  const bool stable_chain = g1 < 0 && g2 < 0;
  if (!founder_chain && !stable_chain) return CoexistenceKind::None;
  // A chain grants a positive triple only together with the matching sign of
  // C p sigma - tau (kappa mu + sigma); with a fit trait 1 the chain implies
  // it, but for lambda1 <= mu the chain alone can hold with the wrong sign.
  const double kms = q.kappa * q.mu + q.sigma;
  const double denom = q.C * q.p * q.sigma - kms * q.tau;
  if (std::abs(denom) <= 1e-12 * (q.C * q.p * q.sigma + kms * q.tau))
    return CoexistenceKind::Boundary;
  if (founder_chain && denom > 0) return CoexistenceKind::Unstable;
  if (stable_chain && denom < 0) return CoexistenceKind::Stable;
  return CoexistenceKind::None;
}

std::optional<State3> coexistence_equilibrium(const ModelParams& q) {
  const CoexistenceKind kind = coexistence_kind(q);
  if (kind == CoexistenceKind::Boundary) {
    const double kms = q.kappa * q.mu + q.sigma;
    const double denom = q.C * q.p * q.sigma - kms * q.tau;
    if (std::abs(denom) <= 1e-12 * (q.C * q.p * q.sigma + kms * q.tau))
      throw AnalysisError(
          "boundary case C p sigma = tau (kappa mu + sigma): no "
          "classification");
    throw AnalysisError(
        "coexistence chain holds with equality: boundary case");
  }
  if (kind == CoexistenceKind::None) return std::nullopt;

  const double kms = q.kappa * q.mu + q.sigma;
  const double denom = q.C * q.p * q.sigma - kms * q.tau;
  const double d21 = q.lambda2 - q.lambda1;
  const double num_a = q.C * kms * d21 + q.C * q.p * q.sigma * (q.mu - q.lambda2) +
                       kms * q.tau * (q.lambda2 - q.mu);
  const double num_2 = q.C * kms * d21 + q.C * q.p * q.sigma * (q.mu - q.lambda2) +
                       kms * q.tau * (q.lambda1 - q.mu);
  State3 eq;
  eq[0] = num_a / (q.tau * denom);
  eq[1] = q.p * q.C * d21 * num_a / (q.tau * denom * denom);
  eq[2] = num_2 / (-q.tau * denom);
  return eq;
}

EquilibriumReport equilibrium_report(const ModelParams& q) {
  EquilibriumReport r;
  const auto t1 = trait1_equilibrium(q);
  r.bar_n1a = t1[0];
  r.bar_n1d = t1[1];
  r.bar_n2 = trait2_equilibrium(q);
  r.tilde_n2 = trait2_equilibrium_signed(q);
  if (q.tau > 0) {
    r.which_condition = coexistence_kind(q);
    if (r.which_condition == CoexistenceKind::Unstable ||
        r.which_condition == CoexistenceKind::Stable) {
      r.coexistence = *coexistence_equilibrium(q);
      r.coexistence_exists = true;
    }
  }
  return r;
}

std::optional<std::array<double, 2>> coexistence_dormancy_free(
    const ModelParams& q) {
  if (q.tau <= 0) throw AnalysisError("dormancy-free coexistence needs tau > 0");
  const double mid = q.C / q.tau * (q.lambda1 - q.lambda2);
  if (!((q.lambda2 - q.mu) < mid && mid < (q.lambda1 - q.mu)))
    return std::nullopt;
  const double n2 = (q.lambda1 - q.mu - mid) / q.tau;
  const double n1 = (q.mu - q.lambda2 + mid) / q.tau;
  return std::array<double, 2>{n1, n2};
}

}  // namespace dormhgt

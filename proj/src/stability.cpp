#include "dormhgt/stability.hpp"

#include <algorithm>
#include <cmath>

namespace dormhgt {

Mat3 jacobian(const ModelParams& q, const State3& s) {
  const double n1a = s[0], n2 = s[2];
  Mat3 a;
  a[0] = {q.lambda1 - q.mu - 2.0 * q.C * n1a - (q.C + q.tau) * n2, q.sigma,
          (-q.C - q.tau) * n1a};
  a[1] = {2.0 * q.p * q.C * n1a + q.p * q.C * n2, -q.kappa * q.mu - q.sigma,
          q.p * q.C * n1a};
  a[2] = {(-q.C + q.tau) * n2, 0.0,
          q.lambda2 - q.mu - 2.0 * q.C * n2 - (q.C - q.tau) * n1a};
  return a;
}

double det3(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

double trace3(const Mat3& m) { return m[0][0] + m[1][1] + m[2][2]; }

namespace {

// One Newton step on p(x) = x^3 + b x^2 + c x + d.
std::complex<double> polish(std::complex<double> x, double b, double c,
                            double d) {
  const std::complex<double> px = ((x + b) * x + c) * x + d;
  const std::complex<double> dpx = (3.0 * x + 2.0 * b) * x + c;
  if (std::abs(dpx) > 0) x -= px / dpx;
  return x;
}

}  // namespace

std::array<std::complex<double>, 3> eigenvalues3(const Mat3& m) {
  // characteristic polynomial x^3 + b x^2 + c x + d
  const double b = -trace3(m);
  const double c = m[0][0] * m[1][1] - m[0][1] * m[1][0] +
                   m[0][0] * m[2][2] - m[0][2] * m[2][0] +
                   m[1][1] * m[2][2] - m[1][2] * m[2][1];
  const double d = -det3(m);

  // depressed cubic t^3 + pt + q with x = t - b/3
  const double shift = b / 3.0;
  const double p = c - b * b / 3.0;
  const double qq = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  const double disc = qq * qq / 4.0 + p * p * p / 27.0;

  std::array<std::complex<double>, 3> roots;
  if (disc > 0) {
    // one real root, one conjugate pair
    const double sq = std::sqrt(disc);
    const double u = std::cbrt(-qq / 2.0 + sq);
    const double v = std::cbrt(-qq / 2.0 - sq);
    const double t0 = u + v;
    const double re = -t0 / 2.0;
    const double im = std::sqrt(3.0) / 2.0 * std::abs(u - v);
    roots = {std::complex<double>(t0, 0), std::complex<double>(re, im),
             std::complex<double>(re, -im)};
  } else {
    // three real roots (trigonometric form)
    const double r = std::sqrt(std::max(-p / 3.0, 0.0));
    double cosphi = r > 0 ? (3.0 * qq) / (2.0 * p * r) : 0.0;
    cosphi = std::clamp(cosphi, -1.0, 1.0);
    const double phi = std::acos(cosphi) / 3.0;
    for (int k = 0; k < 3; ++k)
      roots[k] = 2.0 * r * std::cos(phi - 2.0 * M_PI * k / 3.0);
  }
  for (auto& x : roots) {
    x -= shift;
    x = polish(x, b, c, d);
  }
  std::sort(roots.begin(), roots.end(),
            [](const auto& x, const auto& y) { return x.real() > y.real(); });
  return roots;
}

const char* to_string(StabilityLabel label) {
  switch (label) {
    case StabilityLabel::AsymptoticallyStable: return "asymptotically-stable";
    case StabilityLabel::Unstable: return "unstable";
    case StabilityLabel::DegenerateCoincidesWithOrigin:
      return "degenerate-coincides-with-origin";
    case StabilityLabel::IndeterminateLocal: return "indeterminate-local";
    case StabilityLabel::Boundary: return "boundary";
  }
  return "?";
}

namespace {

StabilityLabel label_from_eigenvalues(
    const std::array<std::complex<double>, 3>& eig) {
  bool positive = false;
  for (const auto& e : eig) {
    if (std::abs(e.real()) < kEigenTol) return StabilityLabel::Boundary;
    if (e.real() > 0) positive = true;
  }
  return positive ? StabilityLabel::Unstable
                  : StabilityLabel::AsymptoticallyStable;
}

EquilibriumClassification classify_point(const ModelParams& q,
                                         const std::string& name,
                                         const State3& point) {
  EquilibriumClassification c;
  c.name = name;
  c.point = point;
  const Mat3 a = jacobian(q, point);
  c.eigenvalues = eigenvalues3(a);
  c.trace = trace3(a);
  c.det = det3(a);
  c.label = label_from_eigenvalues(c.eigenvalues);
  return c;
}

}  // namespace

std::vector<EquilibriumClassification> classify_equilibria(
    const ModelParams& q) {
  validate(q);
  if (!(q.lambda1 > q.mu) && !(q.lambda2 > q.mu))
    throw AnalysisError("max(lambda1, lambda2) <= mu: no classification");

  std::vector<EquilibriumClassification> out;
  out.push_back(classify_point(q, "origin", State3{0, 0, 0}));

  {
    const double tilde = trait2_equilibrium_signed(q);
    auto c = classify_point(q, "trait2", State3{0, 0, tilde});
    if (std::abs(q.lambda2 - q.mu) <= kBoundaryTol)
      c.label = StabilityLabel::DegenerateCoincidesWithOrigin;
    else if (tilde < 0)
      c.negative_coordinate = true;
    out.push_back(c);
  }

  {
    const auto t1 = trait1_equilibrium(q);
    auto c = classify_point(q, "trait1", State3{t1[0], t1[1], 0});
    if (std::abs(q.lambda1 - q.mu) <= kBoundaryTol)
      c.label = StabilityLabel::DegenerateCoincidesWithOrigin;
    out.push_back(c);
  }

  if (q.tau > 0) {
    const CoexistenceKind kind = coexistence_kind(q);
    if (kind == CoexistenceKind::Unstable || kind == CoexistenceKind::Stable) {
      auto c = classify_point(q, "coexistence", *coexistence_equilibrium(q));
      if (kind == CoexistenceKind::Stable)
        c.label = StabilityLabel::IndeterminateLocal;
      out.push_back(c);
    }
  }
  return out;
}

const char* to_string(RegimeLabel label) {
  switch (label) {
    case RegimeLabel::I: return "I";
    case RegimeLabel::II: return "II";
    case RegimeLabel::IIp: return "II'";
    case RegimeLabel::IIpp: return "II''";
    case RegimeLabel::III: return "III";
    case RegimeLabel::IIIp: return "III'";
    case RegimeLabel::IV: return "IV";
    case RegimeLabel::IVp: return "IV'";
    case RegimeLabel::StableCoexistence: return "stable-coexistence";
    case RegimeLabel::Fixation1: return "fixation-1";
    case RegimeLabel::Fixation2: return "fixation-2";
    case RegimeLabel::FounderControlNoCoexistence:
      return "founder-control-no-coexistence-eq";
    case RegimeLabel::Boundary: return "boundary";
    case RegimeLabel::ResidentUnfit: return "resident-unfit";
  }
  return "?";
}

RegimeLabel regime(const ModelParams& q) {
  validate(q);
  if (q.tau == 0) return hgt_free_regime(q);
  if (q.p == 0) return dormancy_free_regime(q);
  if (std::abs(q.lambda1 - q.mu) <= kBoundaryTol) return RegimeLabel::Boundary;
  if (q.lambda1 < q.mu) return RegimeLabel::ResidentUnfit;

  const double m = middle_expression(q);
  const double g1 = (q.lambda2 - q.mu) - m;  // >0: first fitter inequality
  const double g2 = m - (q.lambda1 - q.mu);  // >0: second fitter inequality
  if (std::abs(g1) <= kBoundaryTol || std::abs(g2) <= kBoundaryTol)
    return RegimeLabel::Boundary;

  if (g1 > 0 && g2 > 0) return RegimeLabel::I;
  if (g1 < 0 && g2 > 0) {
    // fixation of trait 1; sub-label by the lambda orderings
    if (q.lambda2 >= q.lambda1 - kBoundaryTol) return RegimeLabel::II;
    return q.lambda2 >= q.mu - kBoundaryTol ? RegimeLabel::IIp
                                            : RegimeLabel::IIpp;
  }
  if (g1 < 0 && g2 < 0) {
    return q.lambda2 >= q.mu - kBoundaryTol ? RegimeLabel::III
                                            : RegimeLabel::IIIp;
  }
  // g1 > 0 && g2 < 0: fixation of trait 2
  return q.lambda2 >= q.lambda1 - kBoundaryTol ? RegimeLabel::IV
                                               : RegimeLabel::IVp;
}

RegimeLabel dormancy_free_regime(const ModelParams& q) {
  validate(q);
  if (q.p != 0)
    throw std::invalid_argument("dormancy_free_regime requires p = 0");
  if (q.tau <= 0)
    throw std::invalid_argument("dormancy_free_regime requires tau > 0");
  if (!(q.lambda1 > q.mu) && !(q.lambda2 > q.mu))
    return RegimeLabel::ResidentUnfit;

  const double mid = q.C / q.tau * (q.lambda1 - q.lambda2);
  const double g1 = (q.lambda2 - q.mu) - mid;
  const double g2 = mid - (q.lambda1 - q.mu);
  if (std::abs(g1) <= kBoundaryTol || std::abs(g2) <= kBoundaryTol)
    return RegimeLabel::Boundary;
  if (g1 < 0 && g2 < 0) return RegimeLabel::StableCoexistence;
  if (g1 > 0 && g2 > 0) return RegimeLabel::FounderControlNoCoexistence;
  if (g1 < 0 && g2 > 0) return RegimeLabel::Fixation1;
  return RegimeLabel::Fixation2;
}

RegimeLabel hgt_free_regime(const ModelParams& q) {
  validate(q);
  if (q.tau != 0)
    throw std::invalid_argument("hgt_free_regime requires tau = 0");
  if (std::abs(q.lambda1 - q.mu) <= kBoundaryTol ||
      std::abs(q.lambda2 - q.mu) <= kBoundaryTol)
    return RegimeLabel::Boundary;
  // an individually unfit trait goes extinct on its own without HGT
  if (!(q.lambda1 > q.mu) || !(q.lambda2 > q.mu))
    return RegimeLabel::ResidentUnfit;

  const double diff = (q.lambda2 - q.lambda1) -
                      q.p * (q.lambda2 - q.mu) * q.sigma /
                          (q.kappa * q.mu + q.sigma);
  if (std::abs(diff) <= kBoundaryTol) return RegimeLabel::Boundary;
  return diff < 0 ? RegimeLabel::Fixation1 : RegimeLabel::Fixation2;
}

CriticalLines critical_lines(const ModelParams& q) {
  validate(q);
  if (q.tau <= 0) throw AnalysisError("critical lines require tau > 0");
  const double kms = q.kappa * q.mu + q.sigma;
  const double aprime = q.C * q.p * q.sigma / (q.tau * kms);
  const double bprime = q.C / q.tau;
  if (std::abs(q.C * q.p * q.sigma - q.tau * kms) <=
      1e-12 * (q.C * q.p * q.sigma + q.tau * kms))
    throw AnalysisError(
        "degenerate case C p sigma = tau (kappa mu + sigma): both critical "
        "lines coincide with lambda1 = lambda2");

  CriticalLines lines;
  // lambda1 - mu = M  <=>  (1-b') l1 + (b'-a') l2 = mu (1-a')
  lines.trait2_boundary = {1.0 - bprime, bprime - aprime,
                           q.mu * (1.0 - aprime),
                           (1.0 - bprime) / (aprime - bprime)};
  // lambda2 - mu = M  <=>  -b' l1 + (1-a'+b') l2 = mu (1-a')
  lines.trait1_boundary = {-bprime, 1.0 - aprime + bprime,
                           q.mu * (1.0 - aprime),
                           bprime / (1.0 - aprime + bprime)};
  return lines;
}

RegimeGrid regime_map(const ModelParams& fixed, double l1_min, double l1_max,
                      int n1, double l2_min, double l2_max, int n2) {
  if (n1 < 1 || n2 < 1)
    throw std::invalid_argument("regime_map: grid sizes must be >= 1");
  RegimeGrid grid;
  grid.lambda1.resize(n1);
  grid.lambda2.resize(n2);
  for (int i = 0; i < n1; ++i)
    grid.lambda1[i] =
        n1 == 1 ? l1_min : l1_min + (l1_max - l1_min) * i / (n1 - 1);
  for (int j = 0; j < n2; ++j)
    grid.lambda2[j] =
        n2 == 1 ? l2_min : l2_min + (l2_max - l2_min) * j / (n2 - 1);
  grid.labels.resize(static_cast<std::size_t>(n1) * n2);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      ModelParams q = fixed;
      q.lambda1 = grid.lambda1[i];
      q.lambda2 = grid.lambda2[j];
      grid.labels[static_cast<std::size_t>(i) * n2 + j] = regime(q);
    }
  }
  return grid;
}

}  // namespace dormhgt

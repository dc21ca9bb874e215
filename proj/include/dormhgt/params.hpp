#ifndef DORMHGT_PARAMS_HPP
#define DORMHGT_PARAMS_HPP

#include <stdexcept>
#include <string>

namespace dormhgt {

// Rates and probabilities of the two-trait model. Trait 1 is active/dormant
// (densities n1a, n1d), trait 2 has no dormant state (density n2).
struct ModelParams {
  double lambda1 = 0;  // birth rate, active trait 1
  double lambda2 = 0;  // birth rate, trait 2
  double mu = 0;       // death rate of active individuals
  double C = 0;        // competition strength
  double p = 0;        // dormancy-initiation probability under competition
  double kappa = 0;    // dormant death rate = kappa*mu
  double sigma = 0;    // resuscitation rate
  double tau = 0;      // horizontal transfer rate
};

// Thrown when a requested analysis does not apply to the given parameters
// (boundary / critical / unfit-resident / degenerate cases). Maps to exit
// code 2 in the CLI and DH_ERR_INAPPLICABLE in the C API.
class AnalysisError : public std::runtime_error {
 public:
  explicit AnalysisError(const std::string& msg) : std::runtime_error(msg) {}
};

// Equality tolerance for the strict inequality chains and lambda orderings.
inline constexpr double kBoundaryTol = 1e-12;
// Eigenvalue real parts closer to zero than this get the "boundary" label.
inline constexpr double kEigenTol = 1e-9;
// |lambda_hat| or |lambda_tilde| below this is reported as critical.
inline constexpr double kCriticalTol = 1e-10;

// Throws std::invalid_argument unless:
//   lambda1, lambda2, mu, C, sigma > 0;  p in [0,1);  kappa >= 0;  tau >= 0.
// p = 0 selects the dormancy-free special case, tau = 0 the HGT-free one.
void validate(const ModelParams& params);

inline bool valid(const ModelParams& params) {
  try {
    validate(params);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

}  // namespace dormhgt

#endif

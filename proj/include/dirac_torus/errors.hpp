#pragma once

#include <stdexcept>
#include <string>

namespace dirac_torus {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// circle_dynamics
struct NotADiffeomorphism : Error { using Error::Error; };
struct RationalRotation : Error { using Error::Error; };
struct InversionFailure : Error { using Error::Error; };
struct NonPositiveDensity : Error { using Error::Error; };
struct PrecisionExceeded : Error { using Error::Error; };

// torus_algebra
struct UnsupportedSymbol : Error { using Error::Error; };

// dirac_spectral
struct CutoffTooSmall : Error { using Error::Error; };
struct EigensolveFailure : Error { using Error::Error; };
struct SingularBlock : Error { using Error::Error; };

// hill_solver
struct IndefiniteC : Error { using Error::Error; };
struct FactorizationFailure : Error { using Error::Error; };
struct SpuriousSpectrum : Error { using Error::Error; };
struct StepTooLarge : Error { using Error::Error; };
struct ZeroLambda : Error { using Error::Error; };

// fredholm
struct SingularD : Error { using Error::Error; };

// cli
struct ConfigError : Error { using Error::Error; };

}  // namespace dirac_torus

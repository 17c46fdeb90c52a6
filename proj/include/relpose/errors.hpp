#pragma once

#include <stdexcept>
#include <string>

namespace relpose {

// Base class for all recoverable failures raised by this library.
// Messages are prefixed with the subsystem that raised them.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// geom
struct NearZeroQuaternion : Error { using Error::Error; };
struct NearZeroTranslation : Error { using Error::Error; };
struct InvalidRotation : Error { using Error::Error; };
struct DegenerateBaseline : Error { using Error::Error; };

// camera
struct InvalidRange : Error { using Error::Error; };

// nnet
struct ShapeMismatch : Error { using Error::Error; };
struct InputTooSmall : Error { using Error::Error; };
struct NonFiniteGradient : Error { using Error::Error; };

// regressor
struct ConfigInvalid : Error { using Error::Error; };
struct NonFiniteLoss : Error { using Error::Error; };
struct ContainerCorrupt : Error { using Error::Error; };
struct ShapeMismatchOnLoad : Error { using Error::Error; };

// epipolar
struct DegenerateSample : Error { using Error::Error; };
struct InsufficientMatches : Error { using Error::Error; };
struct NoModelFound : Error { using Error::Error; };
struct CheiralityAmbiguous : Error { using Error::Error; };
struct RaysParallel : Error { using Error::Error; };

// synthdata
struct SamplingExhausted : Error { using Error::Error; };
struct PlaneBehindCamera : Error { using Error::Error; };
struct ImageTooSmall : Error { using Error::Error; };

// evaluation / io
struct LengthMismatch : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };

}  // namespace relpose

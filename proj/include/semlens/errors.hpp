#pragma once

#include <stdexcept>
#include <string>

namespace semlens {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyDataset : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct InvalidParam : Error { using Error::Error; };
struct InvalidInput : Error { using Error::Error; };
struct InsufficientSamples : Error { using Error::Error; };
struct DegenerateData : Error { using Error::Error; };
struct DegenerateDifference : Error { using Error::Error; };
struct DivergedOptimization : Error { using Error::Error; };
struct DegenerateDistribution : Error { using Error::Error; };
struct NotFitted : Error { using Error::Error; };
struct IncompleteRadar : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct MissingPrerequisite : Error { using Error::Error; };

}  // namespace semlens

#pragma once

#include <stdexcept>
#include <string>

namespace pclab {

/// Problems with input files, datasets or checkpoints. CLI exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A NaN or Inf surfaced where the pipeline requires finite values.
/// CLI exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pclab

#pragma once

#include <stdexcept>
#include <string>

namespace ctql {

/// Violated precondition or type invariant (bad dimensions, out-of-range values).
class contract_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration input (unknown key, unparsable value).
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File or artifact could not be read, written, or parsed.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or exploding values detected in an integration or training run.
/// `index` is the substep (rollouts) or iteration (training) where the blow-up
/// was detected.
class divergence_error : public std::runtime_error {
 public:
  divergence_error(const std::string& msg, long index_)
      : std::runtime_error(msg), index(index_) {}
  long index;
};

}  // namespace ctql

#pragma once

#include <stdexcept>
#include <string>

namespace spdr {

class SolverError : public std::runtime_error {
 public:
  enum class Code {
    newton_diverged,
    singular_step,
    lambda_nu_too_large,
    operator_overflow,
  };

  SolverError(Code code, int time_node, const std::string& what)
      : std::runtime_error(what), code_(code), time_node_(time_node) {}

  Code code() const { return code_; }
  int time_node() const { return time_node_; }

 private:
  Code code_;
  int time_node_;
};

}  // namespace spdr

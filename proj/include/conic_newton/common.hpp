/*
 Copyright 2026 The conic-newton Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef CONIC_NEWTON_COMMON_HPP
#define CONIC_NEWTON_COMMON_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace conic {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Bad shapes, bad parameters, malformed files.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite values or divergence inside an iteration.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, long iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

enum class Termination { ResidualTol, PatternRepeat, MaxIter, SingularSystem };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::ResidualTol:
      return "ResidualTol";
    case Termination::PatternRepeat:
      return "PatternRepeat";
    case Termination::MaxIter:
      return "MaxIter";
    case Termination::SingularSystem:
      return "SingularSystem";
  }
  return "?";
}

inline Termination termination_from_string(const std::string& s) {
  if (s == "ResidualTol") return Termination::ResidualTol;
  if (s == "PatternRepeat") return Termination::PatternRepeat;
  if (s == "MaxIter") return Termination::MaxIter;
  if (s == "SingularSystem") return Termination::SingularSystem;
  throw InvalidInput("unknown termination '" + s + "'");
}

inline bool converged(Termination t) {
  return t == Termination::ResidualTol || t == Termination::PatternRepeat;
}

inline void require_dim(Index got, Index expected, const char* what) {
  if (got != expected) {
    throw InvalidInput(std::string(what) + ": dimension mismatch (got " + std::to_string(got) +
                       ", expected " + std::to_string(expected) + ")");
  }
}

}  // namespace conic

#endif  // CONIC_NEWTON_COMMON_HPP

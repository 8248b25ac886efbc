#pragma once

#include <stdexcept>
#include <string>

namespace geogap {

// Base class for every failure the library can raise on valid-but-unusable
// input. Programming errors (bad sizes, null callables) use std::invalid_argument.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invariants with g2^3 - 27 g3^2 == 0: the cubic has a repeated root and no
// bounded period lattice exists.
class DegenerateLattice : public Error {
 public:
  using Error::Error;
};

// Negative cubic discriminant: one real branch point only. The real
// rectangular-lattice evaluation strategy does not cover this case.
class NonRectangular : public Error {
 public:
  using Error::Error;
};

// Evaluation point closer to a lattice point than the configured cutoff.
class NearPole : public Error {
 public:
  using Error::Error;
};

// Query outside a tabulated range.
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

// An ODE span that crosses a potential pole.
class SingularityInSpan : public Error {
 public:
  using Error::Error;
};

// Adaptive stepper could not meet the tolerance with a representable step.
class StepSizeUnderflow : public Error {
 public:
  using Error::Error;
};

// Solution-basis parameters that collapse the two solutions onto each other
// (zero Wronskian, sigma zeros in denominators, ...).
class DegenerateParameters : public Error {
 public:
  using Error::Error;
};

// Uniformizing parameter sits on a zero of wp', where the two-point basis
// degenerates.
class BranchPoint : public Error {
 public:
  using Error::Error;
};

// |psi1*psi3 - psi2^2| below the chart threshold: metric undefined there.
class DegenerateDelta : public Error {
 public:
  using Error::Error;
};

// Trace segment with dx ~ 0 cannot be reparameterized as y(x).
class VerticalSegment : public Error {
 public:
  using Error::Error;
};

// chi0 evaluation at a zero of Q.
class ZeroOfQ : public Error {
 public:
  using Error::Error;
};

// (z, w) pair that does not satisfy the fitted curve relation.
class OffCurve : public Error {
 public:
  using Error::Error;
};

// The combination that must not depend on x turned out to depend on x.
class NotXIndependent : public Error {
 public:
  using Error::Error;
};

// Malformed scenario/config input (unknown key, wrong type, bad range).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Filesystem failure while emitting an output artifact.
class IOError : public Error {
 public:
  using Error::Error;
};

}  // namespace geogap

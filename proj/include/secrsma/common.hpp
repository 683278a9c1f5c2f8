#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace secrsma {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  InfeasibleThresholds,
  SolverFailure,
  Config,
  Io,
};

/// Every failure surfaced by the library carries one of the codes above so
/// the C layer can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::InvalidArgument, what);
}

inline void require_dims(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::DimensionMismatch, what);
}

enum class Scheme { RS, MULP };
enum class CsitMode { Perfect, Imperfect };

inline const char* to_string(Scheme s) { return s == Scheme::RS ? "RS" : "MULP"; }
inline const char* to_string(CsitMode m) { return m == CsitMode::Perfect ? "perfect" : "imperfect"; }

}  // namespace secrsma

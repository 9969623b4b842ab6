#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lgtsim {

using real = double;
using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using index_t = std::int64_t;

inline constexpr real pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

struct invalid_parameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct unsupported_feature : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct numeric_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw invalid_parameter(what);
}

inline cplx expi(real phi) { return {std::cos(phi), std::sin(phi)}; }

inline real max_abs(const CMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline bool is_unitary(const CMat& u, real tol = 1e-10) {
  if (u.rows() != u.cols()) return false;
  return max_abs(u * u.adjoint() - CMat::Identity(u.rows(), u.cols())) < tol;
}

}  // namespace lgtsim

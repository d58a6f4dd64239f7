#ifndef HAMLET_TYPES_HPP
#define HAMLET_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hamlet {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// Numeric tolerances shared across the library.
constexpr double kHermTol = 1e-10;
constexpr double kHermWarnTol = 1e-8;
constexpr double kPsdTol = 1e-9;
constexpr double kTraceTol = 1e-9;
constexpr double kReconstructTol = 1e-8;
constexpr double kBranchPruneTol = 1e-12;

// Default cap on the total Hilbert-space dimension d^n for operations that
// materialize full-space objects. Overridable via HAMLET_MAX_DIM.
std::uint64_t max_total_dim();
void set_max_total_dim(std::uint64_t cap);

// Thrown when a requested full-space object exceeds the dimension cap.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on malformed serialized input; carries a location string.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// d^n as u64 with overflow saturation.
std::uint64_t pow_u64(std::uint64_t base, unsigned exp);

// Checks d^n against the cap and returns it as a dense-friendly index type.
Eigen::Index checked_dim(int d, int n_sites, const char* where);

}  // namespace hamlet

#endif

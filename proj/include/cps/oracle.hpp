#ifndef CPS_ORACLE_HPP
#define CPS_ORACLE_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cps/config.hpp"
#include "cps/params.hpp"

namespace cps::oracle {

// Boundary condition of the finite chain. Ring is the default; the closed
// segment exists to probe how much the boundary choice matters.
enum class Boundary { Ring, Segment };

constexpr int kMaxSites = 14;  // 2^N states; memory bound

// Exact finite-state CTMC for the contact process on a small ring (or
// segment) of N sites. States are N-bit integers; site labels run over
// {-floor(N/2), ..., ceil(N/2)-1} so that 0 and +-r keep their lattice
// meaning. Recovery flips 1->0 at rate 1; a 0->1 flip at site i has rate
// lambda times the number of infected neighbors (both directed edges
// counted). The empty state is absorbing.
class RingChain {
 public:
  RingChain(int n_sites, double lambda, Boundary boundary = Boundary::Ring);

  int n() const { return n_; }
  double lambda() const { return lambda_; }
  Boundary boundary() const { return boundary_; }
  std::int64_t min_label() const { return -(n_ / 2); }
  std::int64_t max_label() const { return n_ - n_ / 2 - 1; }

  int bit_of(std::int64_t label) const;
  std::uint32_t mask_of(const Configuration& c) const;

  // Generator Q, row state -> column state, row sums zero.
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& generator() const {
    return q_;
  }
  // Uniformized kernel transposed: pt(s', s) = P(s -> s') with P = I + Q/theta.
  const Eigen::SparseMatrix<double, Eigen::RowMajor>& kernel_transposed() const {
    return pt_;
  }
  double uniformization_rate() const { return theta_; }

 private:
  int n_;
  double lambda_;
  Boundary boundary_;
  double theta_ = 0.0;
  Eigen::SparseMatrix<double, Eigen::RowMajor> q_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> pt_;
};

// Probability vector over the 2^N states plus solver diagnostics.
struct TransientResult {
  Eigen::VectorXd dist;
  int terms = 0;           // uniformization terms consumed
  double tail_bound = 0.0; // Poisson tail mass left out of the series
};

// Distribution of the chain at time t started from the point mass at
// `initial`, by uniformization with adaptive Poisson-tail cutoff (relative
// tail mass below 1e-13). Throws on term-cap exhaustion.
TransientResult transient_distribution(const RingChain& chain,
                                       const Configuration& initial, double t,
                                       int term_cap = 500000);

// Same distribution through dense scaling-and-squaring exp(tQ); the
// independent second method backing every fixture value. Guarded to small N.
Eigen::VectorXd transient_distribution_dense(const RingChain& chain,
                                             const Configuration& initial,
                                             double t);

// P(eta_t(site) = 1) from a point initial condition.
double occupation_probability(const RingChain& chain, const Configuration& initial,
                              std::int64_t site, double t);

// |P[eta_t^xi meets A] - P[eta_t^A meets xi]|, both sides evaluated exactly.
// Self-duality makes the true value zero; the return is the solver residual.
double check_duality(const RingChain& chain, const Configuration& xi,
                     const Configuration& a, double t);

// E[f(|eta_t^{0} cap {-r, r}|)] for the dual started at the origin.
double exact_sensitivity(const RingChain& chain, double p, double q,
                         const WindowLambdaR& window, double t);

// Probability that, by time t, the process started inside [window_lo,
// window_hi] ever leaves that label window. States outside the window are
// made absorbing, so this upper-bounds any boundary/wrap effect on window
// functionals and certifies ring-vs-lattice fidelity of fixtures.
double escape_probability(const RingChain& chain, const Configuration& initial,
                          std::int64_t window_lo, std::int64_t window_hi,
                          double t);

// One computed oracle value with full parameter provenance, as written to and
// read from the fixtures file (plain text, one record per line).
struct FixtureRecord {
  std::string kind;                         // e.g. occupation, sensitivity
  std::map<std::string, std::string> params;
  double value = 0.0;
  double residual = 0.0;
};

void write_fixture_file(std::ostream& out, const std::vector<FixtureRecord>& records);
std::vector<FixtureRecord> read_fixture_file(std::istream& in);

// The fixture set the test suites consume: acceptance anchors plus their
// cross-method residuals.
std::vector<FixtureRecord> compute_standard_fixtures();

}  // namespace cps::oracle

#endif  // CPS_ORACLE_HPP

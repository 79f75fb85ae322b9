#include "cps/oracle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <bit>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cps/sensitivity.hpp"

namespace cps::oracle {

namespace {

struct BuiltChain {
  Eigen::SparseMatrix<double, Eigen::RowMajor> q;
  Eigen::SparseMatrix<double, Eigen::RowMajor> pt;
  double theta = 0.0;
};

// Assembles Q and the transposed uniformized kernel. States for which
// `frozen` returns true get an all-zero row (made absorbing).
BuiltChain build_matrices(int n, double lambda, Boundary boundary,
                          const std::function<bool(std::uint32_t)>& frozen) {
  const std::uint32_t n_states = 1u << n;
  std::vector<Eigen::Triplet<double>> q_trip;
  std::vector<Eigen::Triplet<double>> pt_trip;
  q_trip.reserve(std::size_t(n_states) * (n + 1));
  pt_trip.reserve(std::size_t(n_states) * (n + 1));

  std::vector<double> exit_rate(n_states, 0.0);
  for (std::uint32_t s = 0; s < n_states; ++s) {
    if (frozen && frozen(s)) continue;
    for (int i = 0; i < n; ++i) {
      const bool infected = (s >> i) & 1u;
      double rate;
      if (infected) {
        rate = 1.0;
      } else {
        int neighbors = 0;
        if (boundary == Boundary::Ring) {
          neighbors += (s >> ((i + 1) % n)) & 1u;
          neighbors += (s >> ((i + n - 1) % n)) & 1u;
        } else {
          if (i + 1 < n) neighbors += (s >> (i + 1)) & 1u;
          if (i - 1 >= 0) neighbors += (s >> (i - 1)) & 1u;
        }
        rate = lambda * neighbors;
      }
      if (rate > 0.0) {
        const std::uint32_t s2 = s ^ (1u << i);
        q_trip.emplace_back(int(s), int(s2), rate);
        exit_rate[s] += rate;
      }
    }
    if (exit_rate[s] > 0.0) q_trip.emplace_back(int(s), int(s), -exit_rate[s]);
  }

  BuiltChain out;
  out.theta = 0.0;
  for (std::uint32_t s = 0; s < n_states; ++s)
    out.theta = std::max(out.theta, exit_rate[s]);

  out.q.resize(n_states, n_states);
  out.q.setFromTriplets(q_trip.begin(), q_trip.end());

  // P = I + Q/theta, stored transposed so the iteration d <- P^T d walks rows.
  const double theta = out.theta > 0.0 ? out.theta : 1.0;
  for (const auto& t : q_trip) {
    const double v = (t.row() == t.col() ? 1.0 : 0.0) + t.value() / theta;
    pt_trip.emplace_back(t.col(), t.row(), v);
  }
  for (std::uint32_t s = 0; s < n_states; ++s) {
    if (exit_rate[s] == 0.0) pt_trip.emplace_back(int(s), int(s), 1.0);
  }
  out.pt.resize(n_states, n_states);
  out.pt.setFromTriplets(pt_trip.begin(), pt_trip.end());
  return out;
}

TransientResult uniformize(const Eigen::SparseMatrix<double, Eigen::RowMajor>& pt,
                           double theta, Eigen::VectorXd d0, double t,
                           int term_cap) {
  TransientResult out;
  const double theta_t = theta * t;
  if (theta_t <= 0.0) {
    out.dist = std::move(d0);
    out.terms = 0;
    out.tail_bound = 0.0;
    return out;
  }

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(d0.size());
  Eigen::VectorXd d = std::move(d0);
  const double log_tt = std::log(theta_t);
  double cumulative = 0.0;
  int k = 0;
  while (true) {
    const double w = std::exp(-theta_t + k * log_tt - std::lgamma(double(k) + 1.0));
    if (w > 0.0) acc += w * d;
    cumulative += w;
    if (1.0 - cumulative < 1e-13 && k >= int(theta_t)) break;
    if (++k > term_cap)
      throw std::runtime_error(
          "transient_distribution: uniformization exceeded term cap");
    d = pt * d;
  }
  out.dist = std::move(acc);
  out.terms = k;
  out.tail_bound = std::max(0.0, 1.0 - cumulative);
  return out;
}

Eigen::VectorXd point_mass(const RingChain& chain, const Configuration& initial) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(1u << chain.n());
  d[chain.mask_of(initial)] = 1.0;
  return d;
}

}  // namespace

RingChain::RingChain(int n_sites, double lambda, Boundary boundary)
    : n_(n_sites), lambda_(lambda), boundary_(boundary) {
  if (n_ < 2 || n_ > kMaxSites)
    throw std::invalid_argument("RingChain: need 2 <= N <= 14");
  if (!(lambda >= 0.0)) throw std::invalid_argument("RingChain: lambda must be >= 0");
  auto built = build_matrices(n_, lambda_, boundary_, nullptr);
  q_ = std::move(built.q);
  pt_ = std::move(built.pt);
  theta_ = built.theta;
}

int RingChain::bit_of(std::int64_t label) const {
  if (label < min_label() || label > max_label())
    throw std::out_of_range("RingChain: site label outside the ring");
  return int(label - min_label());
}

std::uint32_t RingChain::mask_of(const Configuration& c) const {
  std::uint32_t m = 0;
  for (auto site : c) m |= 1u << bit_of(site);
  return m;
}

TransientResult transient_distribution(const RingChain& chain,
                                       const Configuration& initial, double t,
                                       int term_cap) {
  if (t < 0.0) throw std::invalid_argument("transient_distribution: t must be >= 0");
  return uniformize(chain.kernel_transposed(), chain.uniformization_rate(),
                    point_mass(chain, initial), t, term_cap);
}

Eigen::VectorXd transient_distribution_dense(const RingChain& chain,
                                             const Configuration& initial,
                                             double t) {
  if (chain.n() > 12)
    throw std::invalid_argument("dense method limited to N <= 12");
  Eigen::MatrixXd qd = Eigen::MatrixXd(chain.generator()) * t;
  Eigen::MatrixXd e = qd.exp();
  return e.row(chain.mask_of(initial)).transpose();
}

double occupation_probability(const RingChain& chain, const Configuration& initial,
                              std::int64_t site, double t) {
  const auto res = transient_distribution(chain, initial, t);
  const std::uint32_t bit = 1u << chain.bit_of(site);
  double p = 0.0;
  for (Eigen::Index s = 0; s < res.dist.size(); ++s)
    if (std::uint32_t(s) & bit) p += res.dist[s];
  return p;
}

double check_duality(const RingChain& chain, const Configuration& xi,
                     const Configuration& a, double t) {
  const std::uint32_t mask_a = chain.mask_of(a);
  const std::uint32_t mask_xi = chain.mask_of(xi);
  const auto from_xi = transient_distribution(chain, xi, t);
  const auto from_a = transient_distribution(chain, a, t);
  double hit_a = 0.0, hit_xi = 0.0;
  for (Eigen::Index s = 0; s < from_xi.dist.size(); ++s)
    if (std::uint32_t(s) & mask_a) hit_a += from_xi.dist[s];
  for (Eigen::Index s = 0; s < from_a.dist.size(); ++s)
    if (std::uint32_t(s) & mask_xi) hit_xi += from_a.dist[s];
  return std::abs(hit_a - hit_xi);
}

double exact_sensitivity(const RingChain& chain, double p, double q,
                         const WindowLambdaR& window, double t) {
  if (window.r >= chain.n() / 2)
    throw std::invalid_argument("exact_sensitivity: need r < N/2");
  const std::uint32_t mask = (1u << chain.bit_of(-window.r)) |
                             (1u << chain.bit_of(window.r));
  const auto res = transient_distribution(chain, Configuration{0}, t);
  double acc = 0.0;
  for (Eigen::Index s = 0; s < res.dist.size(); ++s) {
    const int x = std::popcount(std::uint32_t(s) & mask);
    if (x > 0) acc += res.dist[s] * f_sensitivity(x, p, q);
  }
  return acc;
}

double escape_probability(const RingChain& chain, const Configuration& initial,
                          std::int64_t window_lo, std::int64_t window_hi,
                          double t) {
  std::uint32_t window_mask = 0;
  for (std::int64_t s = window_lo; s <= window_hi; ++s)
    window_mask |= 1u << chain.bit_of(s);
  if ((chain.mask_of(initial) & ~window_mask) != 0)
    throw std::invalid_argument("escape_probability: initial leaves the window");

  auto built = build_matrices(chain.n(), chain.lambda(), chain.boundary(),
                              [window_mask](std::uint32_t s) {
                                return (s & ~window_mask) != 0;
                              });
  Eigen::VectorXd d0 = Eigen::VectorXd::Zero(1u << chain.n());
  d0[chain.mask_of(initial)] = 1.0;
  const auto res = uniformize(built.pt, built.theta, std::move(d0), t, 500000);
  double escaped = 0.0;
  for (Eigen::Index s = 0; s < res.dist.size(); ++s)
    if ((std::uint32_t(s) & ~window_mask) != 0) escaped += res.dist[s];
  return escaped;
}

void write_fixture_file(std::ostream& out,
                        const std::vector<FixtureRecord>& records) {
  out << "# cpsense oracle fixtures v1\n";
  out.precision(17);
  for (const auto& rec : records) {
    out << "v=1 kind=" << rec.kind;
    for (const auto& [k, v] : rec.params) out << ' ' << k << '=' << v;
    out << " value=" << rec.value << " residual=" << rec.residual << '\n';
  }
}

std::vector<FixtureRecord> read_fixture_file(std::istream& in) {
  std::vector<FixtureRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    FixtureRecord rec;
    std::istringstream ls(line);
    std::string token;
    bool versioned = false;
    while (ls >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("fixture parse error: " + token);
      const std::string key = token.substr(0, eq);
      const std::string val = token.substr(eq + 1);
      if (key == "v") {
        if (val != "1") throw std::runtime_error("unknown fixture version " + val);
        versioned = true;
      } else if (key == "kind") {
        rec.kind = val;
      } else if (key == "value") {
        rec.value = std::stod(val);
      } else if (key == "residual") {
        rec.residual = std::stod(val);
      } else {
        rec.params[key] = val;
      }
    }
    if (!versioned) throw std::runtime_error("fixture record lacks version tag");
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<FixtureRecord> compute_standard_fixtures() {
  std::vector<FixtureRecord> recs;

  {
    // Occupation of the origin, dual start {0}: the Monte Carlo anchor.
    RingChain chain(10, 1.0);
    const double t = 1.5;
    const double uni = occupation_probability(chain, Configuration{0}, 0, t);
    const auto dense = transient_distribution_dense(chain, Configuration{0}, t);
    double dense_p = 0.0;
    const std::uint32_t bit = 1u << chain.bit_of(0);
    for (Eigen::Index s = 0; s < dense.size(); ++s)
      if (std::uint32_t(s) & bit) dense_p += dense[s];
    FixtureRecord rec;
    rec.kind = "occupation";
    rec.params = {{"N", "10"}, {"boundary", "ring"}, {"lambda", "1"},
                  {"t", "1.5"}, {"initial", "0"},    {"site", "0"}};
    rec.value = uni;
    rec.residual = std::abs(uni - dense_p);
    recs.push_back(rec);

    FixtureRecord esc;
    esc.kind = "escape";
    esc.params = {{"N", "10"}, {"boundary", "ring"}, {"lambda", "1"},
                  {"t", "1.5"}, {"initial", "0"},    {"window", "-4:4"}};
    esc.value = escape_probability(chain, Configuration{0}, -4, 4, t);
    esc.residual = 0.0;
    recs.push_back(esc);
  }

  {
    // Window sensitivity of the dual start, the Prop-1 anchor.
    RingChain chain(12, 1.0);
    const double t = 3.0, p = 0.7, q = 0.9;
    const WindowLambdaR window(2);
    const double uni = exact_sensitivity(chain, p, q, window, t);
    const auto dense = transient_distribution_dense(chain, Configuration{0}, t);
    const std::uint32_t mask =
        (1u << chain.bit_of(-2)) | (1u << chain.bit_of(2));
    double dense_v = 0.0;
    for (Eigen::Index s = 0; s < dense.size(); ++s) {
      const int x = std::popcount(std::uint32_t(s) & mask);
      if (x > 0) dense_v += dense[s] * f_sensitivity(x, p, q);
    }
    FixtureRecord rec;
    rec.kind = "sensitivity";
    rec.params = {{"N", "12"}, {"boundary", "ring"}, {"lambda", "1"}, {"t", "3"},
                  {"p", "0.7"}, {"q", "0.9"},        {"r", "2"}};
    rec.value = uni;
    rec.residual = std::abs(uni - dense_v);
    recs.push_back(rec);

    FixtureRecord esc;
    esc.kind = "escape";
    esc.params = {{"N", "12"}, {"boundary", "ring"}, {"lambda", "1"},
                  {"t", "3"},  {"initial", "0"},     {"window", "-5:5"}};
    esc.value = escape_probability(chain, Configuration{0}, -5, 5, t);
    esc.residual = 0.0;
    recs.push_back(esc);
  }

  {
    // Nested-initial occupation gap at the origin; equals the coupled
    // disagreement probability P(lower(0)=0, upper(0)=1) by monotonicity.
    RingChain chain(12, 1.0);
    const double t = 3.0;
    const double up =
        occupation_probability(chain, Configuration{-2, 2}, 0, t);
    const double lo = occupation_probability(chain, Configuration{-2}, 0, t);
    const auto dense_hi =
        transient_distribution_dense(chain, Configuration{-2, 2}, t);
    const auto dense_lo =
        transient_distribution_dense(chain, Configuration{-2}, t);
    const std::uint32_t bit = 1u << chain.bit_of(0);
    double dhi = 0.0, dlo = 0.0;
    for (Eigen::Index s = 0; s < dense_hi.size(); ++s)
      if (std::uint32_t(s) & bit) {
        dhi += dense_hi[s];
        dlo += dense_lo[s];
      }
    FixtureRecord rec;
    rec.kind = "nested_gap";
    rec.params = {{"N", "12"},        {"boundary", "ring"}, {"lambda", "1"},
                  {"t", "3"},         {"site", "0"},        {"lower", "-2"},
                  {"upper", "-2,2"}};
    rec.value = up - lo;
    rec.residual = std::abs((up - lo) - (dhi - dlo));
    recs.push_back(rec);
  }

  {
    // Duality residual spot check.
    RingChain chain(10, 1.3);
    FixtureRecord rec;
    rec.kind = "duality_residual";
    rec.params = {{"N", "10"}, {"boundary", "ring"}, {"lambda", "1.3"},
                  {"t", "2"},  {"xi", "-2,3"},       {"A", "0"}};
    rec.value = check_duality(chain, Configuration{-2, 3}, Configuration{0}, 2.0);
    rec.residual = rec.value;
    recs.push_back(rec);
  }

  return recs;
}

}  // namespace cps::oracle

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace aflx {

using Vec = std::vector<double>;

// Raised when an operation is well-formed but the channel or distribution
// pair lacks the structural property it needs (for example, a verification
// threshold between transition rows with disjoint supports).
struct UnsupportedChannelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Probability vector. Entries must be >= 0 and sum to 1 within 1e-12.
// Entries are kept exactly as given; no renormalization.
class Distribution {
 public:
  explicit Distribution(Vec p);
  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const Vec& probs() const { return p_; }

  static Distribution uniform(std::size_t n);
  // {1-p, p}: symbol 1 carries probability p.
  static Distribution bernoulli(double p);

 private:
  Vec p_;
};

// Row-stochastic transition matrix w[x][y]. At least 2 inputs and 2 outputs.
class Channel {
 public:
  explicit Channel(std::vector<Vec> rows);
  std::size_t nx() const { return w_.size(); }
  std::size_t ny() const { return w_[0].size(); }
  const Vec& row(std::size_t x) const { return w_[x]; }
  double w(std::size_t x, std::size_t y) const { return w_[x][y]; }
  const std::vector<Vec>& rows() const { return w_; }

  static Channel bsc(double crossover);
  // Outputs ordered {0, erasure, 1}.
  static Channel bec(double erasure);

  // Byte-exact key of the matrix; used by internal per-channel caches.
  std::string cache_key() const;

 private:
  std::vector<Vec> w_;
};

// KL divergence in bits. Terms with p_i = 0 contribute 0; any p_i > 0 with
// q_i = 0 makes the result +inf (sentinel, not an error).
double kl_divergence(const Vec& p, const Vec& q);
double kl_divergence(const Distribution& p, const Distribution& q);

// Normalized p^(1-lambda) q^lambda, computed in log space. lambda in [0, 1].
// Disjoint supports (for lambda strictly inside (0,1)) are an error.
Distribution tilted_distribution(const Distribution& p, const Distribution& q,
                                 double lambda);

struct TiltedPair {
  Distribution p, q;
  double lambda;
  bool shared_support;  // supp(p) == supp(q)
  Distribution tilted;
};
TiltedPair make_tilted_pair(Distribution p, Distribution q, double lambda);

// Channel capacity in bits via alternating maximization, absolute tolerance
// 1e-10 (certified by the per-iteration upper bound), iteration cap 1e5.
double capacity(const Channel& ch);

// max over ordered input pairs (x, x') of D(W(.|x) || W(.|x')).
// Ties resolve to the lexicographically smallest pair. `infinite` is set when
// the maximum diverges (some row has mass outside another row's support).
struct C1Result {
  double value;
  bool infinite;
  std::size_t x;
  std::size_t x_prime;
};
C1Result c1_and_extremal_inputs(const Channel& ch);

// Output-partition symmetry test: the output alphabet is grouped by column
// multiset, and within every group the rows must be permutations of each
// other. Entries compare within tol.
bool is_symmetric(const Channel& ch, double tol = 1e-12);

}  // namespace aflx

#include "acrl/finite_mdp.hpp"

#include "acrl/oracle.hpp"

#include <Eigen/QR>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace acrl {

namespace {

int index_of(const Vector& v) { return static_cast<int>(v[0]); }

}  // namespace

void FiniteMdp::validate() const {
  if (num_states < 1 || num_actions < 1) throw ConfigError("finite MDP needs S, A >= 1");
  validate_discount(gamma);
  if (start_state < 0 || start_state >= num_states)
    throw ConfigError("start state out of range");
  if (transitions.size() != static_cast<std::size_t>(num_pairs()) * num_states)
    throw ConfigError("transition tensor must hold S * A * S entries");
  if (rewards.rows() != num_states || rewards.cols() != num_actions)
    throw ConfigError("reward table must be S x A");
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a) {
      double total = 0.0;
      for (int s2 = 0; s2 < num_states; ++s2) {
        if (!(p(s, a, s2) >= 0.0)) throw ConfigError("negative transition probability");
        total += p(s, a, s2);
      }
      if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "transition row (" << s << ", " << a << ") sums to " << std::setprecision(17)
            << total;
        throw ConfigError(msg.str());
      }
    }
  if (!(rewards.cwiseAbs().maxCoeff() <= reward_bound))
    throw ConfigError("reward table exceeds the declared bound");
}

TrackerLayout FiniteMdp::pair_layout() const {
  const int actions = num_actions;
  return {num_pairs(), [actions](const State& s, const Action& a) {
            return index_of(s) * actions + index_of(a);
          }};
}

TabularPolicy TabularPolicy::uniform(int num_states, int num_actions) {
  return {Matrix::Constant(num_states, num_actions, 1.0 / num_actions)};
}

TabularPolicy TabularPolicy::softmax(const Vector& logits, int num_states, int num_actions) {
  return {SoftmaxTabularPolicy(num_states, num_actions).table(logits)};
}

TabularPolicy TabularPolicy::from_family(const PolicyFamily& family, const Vector& params,
                                         int num_states, int num_actions) {
  TabularPolicy pi{Matrix(num_states, num_actions)};
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a)
      pi.probs(s, a) = std::exp(family.log_density(params, scalar_vector(s), scalar_vector(a)));
  return pi;
}

void TabularPolicy::validate() const {
  for (Eigen::Index s = 0; s < probs.rows(); ++s) {
    if ((probs.row(s).array() < 0.0).any()) throw ConfigError("negative action probability");
    if (std::abs(probs.row(s).sum() - 1.0) > 1e-12)
      throw ConfigError("policy row does not sum to one");
  }
}

// ---------------------------------------------------------------------------

FiniteMdpEnvironment::FiniteMdpEnvironment(FiniteMdp mdp) : mdp_(std::move(mdp)) {
  mdp_.validate();
}

StepResult FiniteMdpEnvironment::step(const State& s, const Action& a, Rng& rng) const {
  const int si = index_of(s);
  const int ai = index_of(a);
  double u = rng.uniform();
  int next = 0;
  for (; next < mdp_.num_states - 1; ++next) {
    u -= mdp_.p(si, ai, next);
    if (u < 0.0) break;
  }
  return {scalar_vector(next), mdp_.rewards(si, ai)};
}

// ---------------------------------------------------------------------------

StationarySampler::StationarySampler(const FiniteMdp& mdp) : mdp_(mdp) { mdp_.validate(); }

TransitionTuple StationarySampler::sample(const PolicyFamily& policy, const Vector& params,
                                          Rng& rng) const {
  const int S = mdp_.num_states;
  const int A = mdp_.num_actions;
  if (cached_params_.size() != params.size() || cached_params_ != params) {
    const TabularPolicy pi = TabularPolicy::from_family(policy, params, S, A);
    table_ = pi.probs;
    cumulative_ = stationary_pair_weights(mdp_, pi).cwiseMax(0.0);
    for (Eigen::Index i = 1; i < cumulative_.size(); ++i) cumulative_[i] += cumulative_[i - 1];
    cumulative_ /= cumulative_[cumulative_.size() - 1];
    cached_params_ = params;
  }
  const double u = rng.uniform();
  int pair = 0;
  while (pair < mdp_.num_pairs() - 1 && u >= cumulative_[pair]) ++pair;
  const int s = pair / A;
  const int a = pair % A;

  TransitionTuple tup;
  tup.s = scalar_vector(s);
  tup.a = scalar_vector(a);
  tup.r = mdp_.rewards(s, a);
  double v = rng.uniform();
  int next = 0;
  for (; next < S - 1; ++next) {
    v -= mdp_.p(s, a, next);
    if (v < 0.0) break;
  }
  tup.s_next = scalar_vector(next);
  double w = rng.uniform();
  int a_next = 0;
  for (; a_next < A - 1; ++a_next) {
    w -= table_(next, a_next);
    if (w < 0.0) break;
  }
  tup.a_next = scalar_vector(a_next);
  return tup;
}

// ---------------------------------------------------------------------------

ReferenceInstance make_reference_instance(std::uint64_t seed, int num_states, int num_actions,
                                          Eigen::Index feature_dim, double gamma) {
  validate_discount(gamma);
  Rng rng(seed);
  const int S = num_states;
  const int A = num_actions;

  FiniteMdp mdp;
  mdp.num_states = S;
  mdp.num_actions = A;
  mdp.gamma = gamma;
  mdp.start_state = 0;
  mdp.transitions.resize(static_cast<std::size_t>(S) * A * S);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      double total = 0.0;
      for (int s2 = 0; s2 < S; ++s2) {
        const double u = rng.uniform();
        const double w = u * u + 1e-3;
        mdp.transitions[(static_cast<std::size_t>(s) * A + a) * S + s2] = w;
        total += w;
      }
      for (int s2 = 0; s2 < S; ++s2)
        mdp.transitions[(static_cast<std::size_t>(s) * A + a) * S + s2] /= total;
    }

  Vector logits(S * A);
  for (Eigen::Index i = 0; i < logits.size(); ++i) logits[i] = 0.5 * rng.normal();

  Matrix rows(S * A, feature_dim);
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    for (Eigen::Index j = 0; j < feature_dim; ++j) rows(i, j) = rng.normal();

  Vector xi(feature_dim);
  for (Eigen::Index j = 0; j < feature_dim; ++j) xi[j] = rng.normal();

  // R(s, a) = Q(s, a) - gamma E[Q(s', a')] with Q = Phi xi.
  const Matrix pi = SoftmaxTabularPolicy(S, A).table(logits);
  const Vector q = rows * xi;
  Matrix rewards(S, A);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      double next_value = 0.0;
      for (int s2 = 0; s2 < S; ++s2)
        for (int a2 = 0; a2 < A; ++a2)
          next_value += mdp.p(s, a, s2) * pi(s2, a2) * q[s2 * A + a2];
      rewards(s, a) = q[s * A + a] - gamma * next_value;
    }
  const double scale = 1.0 / rewards.cwiseAbs().maxCoeff();
  mdp.rewards = rewards * scale;
  mdp.reward_bound = 1.0;
  mdp.validate();

  return {std::move(mdp), TabularFeatureMap(S, A, std::move(rows)), std::move(logits),
          xi * scale};
}

// ---------------------------------------------------------------------------

namespace {

std::string strip_comments(std::istream& in) {
  std::ostringstream clean;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    clean << line << '\n';
  }
  return clean.str();
}

double read_number(std::istream& in, const char* what) {
  double x;
  if (!(in >> x)) throw ConfigError(std::string("finite MDP file: expected ") + what);
  return x;
}

}  // namespace

FiniteMdpFile read_finite_mdp(std::istream& raw) {
  std::istringstream in(strip_comments(raw));
  FiniteMdpFile file;
  FiniteMdp& m = file.mdp;
  m.num_states = static_cast<int>(read_number(in, "S"));
  m.num_actions = static_cast<int>(read_number(in, "A"));
  m.gamma = read_number(in, "gamma");
  m.start_state = static_cast<int>(read_number(in, "start state"));
  if (m.num_states < 1 || m.num_actions < 1) throw ConfigError("finite MDP needs S, A >= 1");
  m.transitions.resize(static_cast<std::size_t>(m.num_pairs()) * m.num_states);
  for (double& p : m.transitions) p = read_number(in, "transition probability");
  m.rewards.resize(m.num_states, m.num_actions);
  for (int s = 0; s < m.num_states; ++s)
    for (int a = 0; a < m.num_actions; ++a) m.rewards(s, a) = read_number(in, "reward");
  m.reward_bound = m.rewards.cwiseAbs().maxCoeff();
  std::string keyword;
  if (in >> keyword) {
    if (keyword != "features") throw ConfigError("finite MDP file: unexpected '" + keyword + "'");
    const auto p = static_cast<Eigen::Index>(read_number(in, "feature dimension"));
    Matrix rows(m.num_pairs(), p);
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
      for (Eigen::Index j = 0; j < p; ++j) rows(i, j) = read_number(in, "feature value");
    file.features = std::move(rows);
  }
  m.validate();
  return file;
}

FiniteMdpFile load_finite_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open finite MDP file " + path);
  return read_finite_mdp(in);
}

void write_finite_mdp(std::ostream& out, const FiniteMdp& m, const Matrix* features) {
  out << std::setprecision(17);
  out << "# S A gamma start\n"
      << m.num_states << ' ' << m.num_actions << ' ' << m.gamma << ' ' << m.start_state << '\n';
  out << "# transitions, one row per (s, a)\n";
  for (int s = 0; s < m.num_states; ++s)
    for (int a = 0; a < m.num_actions; ++a) {
      for (int s2 = 0; s2 < m.num_states; ++s2) out << (s2 ? " " : "") << m.p(s, a, s2);
      out << '\n';
    }
  out << "# rewards, one row per state\n";
  for (int s = 0; s < m.num_states; ++s) {
    for (int a = 0; a < m.num_actions; ++a) out << (a ? " " : "") << m.rewards(s, a);
    out << '\n';
  }
  if (features) {
    out << "features " << features->cols() << '\n';
    for (Eigen::Index i = 0; i < features->rows(); ++i) {
      for (Eigen::Index j = 0; j < features->cols(); ++j) out << (j ? " " : "") << (*features)(i, j);
      out << '\n';
    }
  }
}

}  // namespace acrl

#include "bcolab/ids_bandit.hpp"

#include "bcolab/error.hpp"
#include "bcolab/geometry.hpp"
#include "bcolab/instances.hpp"
#include "bcolab/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <thread>

namespace bcolab::ids {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::size_t CoverNet::project(const Vector& x) const {
  std::size_t best = 0;
  double best_d = kInf;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = (points[i] - x).squaredNorm();
    if (d < best_d) best_d = d, best = i;
  }
  return best;
}

double CoverNet::log_size_bound(double diam) const {
  const double d = static_cast<double>(points.front().size());
  return d * std::log(3.0 * diam / radius);
}

CoverNet build_cover(const ConvexBody& body, double radius, std::size_t cap) {
  require(radius > 0.0, Errc::InvalidArgument, "build_cover: radius must be positive");
  CoverNet net;
  net.radius = radius;
  const auto d = body.dim();
  if (radius >= body.diameter()) {
    net.points.push_back(project_onto(body, 0.5 * (body.bbox_lo() + body.bbox_hi())));
    return net;
  }
  const double pitch = radius / std::sqrt(static_cast<double>(d));
  std::vector<std::size_t> counts(d);
  double total = 1.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double extent = body.bbox_hi()[i] - body.bbox_lo()[i];
    counts[i] = static_cast<std::size_t>(std::ceil(extent / pitch - 1e-12)) + 1;
    total *= static_cast<double>(counts[i]);
  }
  require(total <= static_cast<double>(cap), Errc::CoverTooLarge,
          "build_cover: grid exceeds the point cap");

  std::vector<std::size_t> idx(d, 0);
  Vector p(d);
  for (std::size_t k = 0; k < static_cast<std::size_t>(total); ++k) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const double lo = body.bbox_lo()[i], hi = body.bbox_hi()[i];
      const double step = counts[i] > 1 ? (hi - lo) / static_cast<double>(counts[i] - 1) : 0.0;
      p[i] = idx[i] + 1 == counts[i] ? hi : lo + step * static_cast<double>(idx[i]);
    }
    if (body.contains(p, 1e-12)) {
      net.points.push_back(p);
    } else {
      const Vector q = project_onto(body, p);
      if ((q - p).norm() <= radius) {
        const bool dup = std::any_of(net.points.begin(), net.points.end(), [&](const Vector& c) {
          return (c - q).norm() <= 1e-12;
        });
        if (!dup) net.points.push_back(q);
      }
    }
    for (Eigen::Index i = 0; i < d; ++i) {
      if (++idx[i] < counts[i]) break;
      idx[i] = 0;
    }
  }
  return net;
}

double default_cover_radius(int n, double beta) {
  const double nn = n;
  return 1.0 / (nn * nn * std::max(1.0, std::sqrt(2.0 * beta)));
}

double lifted_modulus(int n, double diam) { return 1.0 / ((n + 1.0) * diam * diam); }

ConvexFunction lift_loss(const ConvexFunction& f, int n, double diam) {
  require(n >= 1 && diam > 0.0, Errc::InvalidArgument, "lift_loss: need n >= 1, diam > 0");
  const auto d = f.dim();
  const double nn = n;
  const auto norm_sq =
      ConvexFunction::quadratic(Matrix::Identity(d, d) / (nn * diam * diam), Vector::Zero(d), 0.0);
  const double w = nn / (nn + 1.0);
  return ConvexFunction::sum({{w, f}, {w, norm_sq}})
      .with_strong_convexity(2.0 / ((nn + 1.0) * diam * diam) + w * f.structural_modulus())
      .with_lipschitz(f.lipschitz());
}

ConvexBody shrink_domain(const ConvexBody& body, int n) {
  require(n >= 1, Errc::InvalidArgument, "shrink_domain: n must be >= 1");
  const double inset = 1.0 / n;
  switch (body.kind()) {
    case ConvexBody::Kind::Polytope: {
      std::vector<Halfspace> hs = body.halfspaces();
      for (auto& h : hs) h.offset -= inset;
      try {
        return ConvexBody::polytope(std::move(hs));
      } catch (const Error& e) {
        throw Error(Errc::EmptyInset, std::string("shrink_domain: ") + e.what());
      }
    }
    case ConvexBody::Kind::Ellipsoid: {
      const Matrix& s = body.shape();
      const double r2 = s(0, 0);
      require((s - r2 * Matrix::Identity(s.rows(), s.cols())).norm() <= 1e-12 * r2,
              Errc::InvalidArgument, "shrink_domain: only balls among ellipsoids");
      const double r = std::sqrt(r2) - inset;
      require(r > 1e-12, Errc::EmptyInset, "shrink_domain: inset ball is empty");
      return ConvexBody::ball(body.center(), r);
    }
    case ConvexBody::Kind::LevelSet:
      break;
  }
  throw Error(Errc::InvalidArgument, "shrink_domain: level-set bodies are not supported");
}

LiftAudit audit_lift(const ConvexFunction& atom, const ConvexBody& domain, int n, std::size_t pairs,
                     std::uint64_t seed) {
  const ConvexBody inset = shrink_domain(domain, n);
  const double diam = domain.diameter();
  const ConvexFunction lifted = lift_loss(atom, n, diam);
  LiftAudit a;
  a.modulus = lifted_modulus(n, diam);
  a.worst_secant_margin = kInf;
  Rng rng(seed, "lift-audit");
  for (std::size_t i = 0; i < pairs; ++i) {
    const Vector x = instances::uniform_in(inset, rng);
    const Vector y = instances::uniform_in(inset, rng);
    const double secant = 0.5 * (lifted(x) + lifted(y)) - lifted(0.5 * (x + y));
    const double need = a.modulus / 8.0 * (x - y).squaredNorm();
    a.worst_secant_margin = std::min(a.worst_secant_margin, secant - need);
    a.max_gradient = std::max(a.max_gradient, lifted.subgradient(x).norm());
  }
  return a;
}

ConvexFunction random_prior_atom(Rng& rng, const ConvexBody& domain, int n) {
  (void)n;
  const auto d = domain.dim();
  const double diam = domain.diameter();
  const Vector c = rng.uniform_box(domain.bbox_lo(), domain.bbox_hi());
  const double offset = rng.uniform(0.0, 0.1);
  const double scale = rng.uniform(0.4, 1.0) * 0.9 / (diam * diam);
  return instances::random_quadratic(d, rng, c, scale, offset, 4.0).with_lipschitz(2.0 * scale * diam);
}

bool Prior::stationary() const {
  return std::all_of(atoms.begin(), atoms.end(), [](const auto& s) { return s.size() == 1; });
}

LossTable tabulate(const Prior& prior, const CoverNet& cover, int n) {
  LossTable t;
  const auto c = static_cast<Eigen::Index>(cover.size());
  for (std::size_t i = 0; i < prior.atoms.size(); ++i) {
    const auto rows = static_cast<Eigen::Index>(prior.atoms[i].size() == 1 ? 1 : n);
    Matrix m(rows, c);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index k = 0; k < c; ++k)
        m(r, k) = prior.loss(i, static_cast<std::size_t>(r))(cover.points[static_cast<std::size_t>(k)]);
    const Vector cumulative = m.colwise().sum().transpose();
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < c; ++k)
      if (cumulative[k] < cumulative[best]) best = k;
    t.ystar.push_back(static_cast<std::size_t>(best));
    t.values.push_back(std::move(m));
  }
  return t;
}

std::vector<double> posterior_update(const std::vector<double>& weights, const LossTable& table,
                                     std::size_t round, std::size_t point, double observed,
                                     double tol) {
  std::vector<double> out(weights.size(), 0.0);
  double total = 0.0;
  const double slack = tol * std::max(1.0, std::abs(observed));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0 && std::abs(table.at(i, round, point) - observed) <= slack) {
      out[i] = weights[i];
      total += weights[i];
    }
  }
  require(total > 0.0, Errc::EmptyPosterior, "posterior_update: no atom is consistent");
  for (double& w : out) w /= total;
  return out;
}

PosteriorStats posterior_stats(const std::vector<double>& weights, const LossTable& table,
                               std::size_t round) {
  PosteriorStats s;
  const auto c = table.values.front().cols();
  s.fbar = Vector::Zero(c);
  std::map<std::size_t, std::size_t> group_of;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    const Matrix& m = table.values[i];
    const auto row = m.row(m.rows() == 1 ? 0 : static_cast<Eigen::Index>(round)).transpose();
    s.fbar += weights[i] * row;
    auto [it, fresh] = group_of.try_emplace(table.ystar[i], s.groups.size());
    if (fresh) s.groups.push_back({table.ystar[i], 0.0, Vector::Zero(c)});
    auto& g = s.groups[it->second];
    g.mass += weights[i];
    g.values += weights[i] * row;
  }
  Vector mix = Vector::Zero(c);
  for (auto& g : s.groups) {
    mix += g.values;
    g.values /= g.mass;
    s.optimal_loss += g.mass * g.values[static_cast<Eigen::Index>(g.ystar)];
  }
  s.tower_error = (mix - s.fbar).cwiseAbs().maxCoeff();
  return s;
}

double entropy(const std::vector<double>& weights) {
  double h = 0.0;
  for (double w : weights)
    if (w > 0.0) h -= w * std::log(w);
  return h;
}

Mode parse_mode(const std::string& s) {
  if (s == "constructed") return Mode::Constructed;
  if (s == "ids-opt") return Mode::IdsOpt;
  throw Error(Errc::InvalidArgument, "unknown mode: " + s);
}

std::string mode_name(Mode m) { return m == Mode::Constructed ? "constructed" : "ids-opt"; }

namespace {

struct PointStats {
  Vector delta;  // fbar(x) - optimal_loss
  Vector info;   // sum_y mu(y) (fbar(x) - f_{t,y}(x))^2
};

PointStats point_stats(const PosteriorStats& s) {
  PointStats p;
  p.delta = s.fbar.array() - s.optimal_loss;
  p.info = Vector::Zero(s.fbar.size());
  for (const auto& g : s.groups) p.info += g.mass * (s.fbar - g.values).array().square().matrix();
  return p;
}

double ratio(double delta, double v) {
  if (delta <= 0.0) return 0.0;
  return v > 0.0 ? delta * delta / v : kInf;
}

// Indices of the convex hull vertices of the planar points (x_i, y_i); for
// coincident points the lowest index is kept.
std::vector<std::size_t> hull_indices(const Vector& xs, const Vector& ys) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(xs.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
    if (xs[ia] != xs[ib]) return xs[ia] < xs[ib];
    if (ys[ia] != ys[ib]) return ys[ia] < ys[ib];
    return a < b;
  });
  idx.erase(std::unique(idx.begin(), idx.end(),
                        [&](std::size_t a, std::size_t b) {
                          const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
                          return xs[ia] == xs[ib] && ys[ia] == ys[ib];
                        }),
            idx.end());
  if (idx.size() < 3) return idx;
  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
    const auto io = static_cast<Eigen::Index>(o), ia = static_cast<Eigen::Index>(a),
               ib = static_cast<Eigen::Index>(b);
    return (xs[ia] - xs[io]) * (ys[ib] - ys[io]) - (ys[ia] - ys[io]) * (xs[ib] - xs[io]);
  };
  std::vector<std::size_t> h(2 * idx.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], idx[i]) <= 0.0) --k;
    h[k++] = idx[i];
  }
  for (std::size_t i = idx.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], idx[i]) <= 0.0) --k;
    h[k++] = idx[i];
  }
  h.resize(k - 1);
  std::sort(h.begin(), h.end());
  return h;
}

}  // namespace

ActionDist evaluate(const PosteriorStats& stats, std::vector<std::size_t> support,
                    std::vector<double> weights) {
  const PointStats p = point_stats(stats);
  ActionDist a;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(support[i]);
    a.delta += weights[i] * p.delta[k];
    a.v += weights[i] * p.info[k];
  }
  a.support = std::move(support);
  a.weights = std::move(weights);
  return a;
}

ActionDist ids_opt(const PosteriorStats& stats) {
  const PointStats p = point_stats(stats);
  const auto c = static_cast<std::size_t>(p.delta.size());

  double best = kInf;
  std::size_t ba = 0, bb = 0;
  double bq = 1.0;
  auto consider = [&](std::size_t a, std::size_t b, double q) {
    const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
    const double r = ratio(q * p.delta[ia] + (1.0 - q) * p.delta[ib], q * p.info[ia] + (1.0 - q) * p.info[ib]);
    if (r < best) best = r, ba = a, bb = b, bq = q;
  };
  auto consider_pair = [&](std::size_t a, std::size_t b) {
    const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
    const double d1 = p.delta[ia], d2 = p.delta[ib], g1 = p.info[ia], g2 = p.info[ib];
    const double dd = d1 - d2, dg = g1 - g2;
    // Stationary point of (q dd + d2)^2 / (q dg + g2) in q.
    if (dd != 0.0 && dg != 0.0) {
      const double q = (d2 * dg - 2.0 * dd * g2) / (dd * dg);
      if (q > 0.0 && q < 1.0) consider(a, b, q);
    }
    // Zero of the mixed delta when the signs differ.
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) consider(a, b, -d2 / dd);
  };

  if (c <= 1000) {
    for (std::size_t i = 0; i < c; ++i) consider(i, i, 1.0);
    for (std::size_t i = 0; i < c; ++i)
      for (std::size_t j = i + 1; j < c; ++j) consider_pair(i, j);
  } else {
    // The minimum over the hull is attained on its boundary, so hull vertices
    // and edges suffice.
    const auto h = hull_indices(p.delta, p.info);
    for (std::size_t i = 0; i < h.size(); ++i) {
      const std::size_t a = h[i], b = h[(i + 1) % h.size()];
      consider(a, a, 1.0);
      if (a != b) consider_pair(std::min(a, b), std::max(a, b));
    }
  }

  ActionDist out;
  if (!std::isfinite(best)) {
    std::vector<std::size_t> all(c);
    std::iota(all.begin(), all.end(), 0);
    out = evaluate(stats, all, std::vector<double>(c, 1.0 / static_cast<double>(c)));
    out.zero_information = true;
    return out;
  }
  if (ba == bb || bq >= 1.0) return evaluate(stats, {ba}, {1.0});
  if (bq <= 0.0) return evaluate(stats, {bb}, {1.0});
  return evaluate(stats, {ba, bb}, {bq, 1.0 - bq});
}

ActionDist push_forward(const FiniteMeasure& rho, const CoverNet& cover, const PosteriorStats& stats) {
  std::map<std::size_t, double> mass;
  for (std::size_t i = 0; i < rho.size(); ++i) mass[cover.project(rho.support[i])] += rho.weights[i];
  std::vector<std::size_t> support;
  std::vector<double> weights;
  for (const auto& [k, w] : mass) support.push_back(k), weights.push_back(w);
  return evaluate(stats, std::move(support), std::move(weights));
}

namespace {

ConvexFunction mixture(const Prior& prior, const std::vector<std::pair<std::size_t, double>>& parts,
                       std::size_t round) {
  std::vector<std::pair<double, ConvexFunction>> terms;
  for (const auto& [i, w] : parts) terms.emplace_back(w, prior.loss(i, round));
  return ConvexFunction::sum(std::move(terms));
}

ActionDist constructed(const Prior& prior, const LossTable& table, const std::vector<double>& w,
                       const PosteriorStats& stats, const CoverNet& cover, const ConvexBody& domain,
                       const EpisodeConfig& cfg, std::size_t round, std::uint64_t seed) {
  std::vector<std::pair<std::size_t, double>> all;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) all.emplace_back(i, w[i]);
  const ConvexFunction fbar = with_computed_minimum(mixture(prior, all, round), domain);
  FunctionMeasure mu;
  for (const auto& g : stats.groups) {
    std::vector<std::pair<std::size_t, double>> parts;
    for (const auto& [i, wi] : all)
      if (table.ystar[i] == g.ystar) parts.emplace_back(i, wi / g.mass);
    mu.atoms.push_back(with_computed_minimum(mixture(prior, parts, round), domain));
    mu.weights.push_back(g.mass);
  }
  const double total = std::accumulate(mu.weights.begin(), mu.weights.end(), 0.0);
  for (double& x : mu.weights) x /= total;
  const auto d = static_cast<int>(domain.dim());
  const EpsilonGrid grid = epsilon_grid(d, cfg.n, fbar.strong_convexity());
  ExploreOptions opts = cfg.explore;
  opts.classify.seed = seed;
  return push_forward(explore(fbar, mu, grid, domain, opts).rho, cover, stats);
}

std::size_t sample_index(const ActionDist& a, Rng& rng) {
  if (a.support.size() == 1) return a.support.front();
  double u = rng.uniform();
  for (std::size_t i = 0; i + 1 < a.support.size(); ++i) {
    if (u < a.weights[i]) return a.support[i];
    u -= a.weights[i];
  }
  return a.support.back();
}

}  // namespace

EpisodeTrace run_episode(const Prior& prior, const CoverNet& cover, const ConvexBody& domain,
                         const EpisodeConfig& cfg, std::uint64_t seed) {
  const LossTable table = tabulate(prior, cover, cfg.n);
  const double alpha = cfg.alpha < 0.0 ? 1.0 / cfg.n : cfg.alpha;
  const bool stationary = prior.stationary();
  EpisodeTrace tr;
  {
    Rng pick(seed, "truth");
    double u = pick.uniform();
    tr.truth = prior.weights.size() - 1;
    for (std::size_t i = 0; i < prior.weights.size(); ++i) {
      if (u < prior.weights[i]) {
        tr.truth = i;
        break;
      }
      u -= prior.weights[i];
    }
  }
  tr.ystar = table.ystar[tr.truth];
  Rng rng(seed, "actions");
  std::vector<double> w = prior.weights;
  // Stationary posteriors are determined by their support, so the action
  // distribution is reused whenever the support repeats.
  std::map<std::vector<bool>, std::pair<PosteriorStats, ActionDist>> cache;
  double cum = 0.0;
  for (int t = 0; t < cfg.n; ++t) {
    const auto round = static_cast<std::size_t>(t);
    std::vector<bool> key(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) key[i] = w[i] > 0.0;
    const std::pair<PosteriorStats, ActionDist>* entry = nullptr;
    std::pair<PosteriorStats, ActionDist> fresh;
    if (stationary) {
      auto it = cache.find(key);
      if (it != cache.end()) entry = &it->second;
    }
    if (!entry) {
      fresh.first = posterior_stats(w, table, round);
      fresh.second = cfg.mode == Mode::IdsOpt
                         ? ids_opt(fresh.first)
                         : constructed(prior, table, w, fresh.first, cover, domain, cfg, round,
                                       substream_seed(seed, hash_tag("explore"), round));
      if (stationary) {
        entry = &cache.emplace(key, std::move(fresh)).first->second;
      } else {
        entry = &fresh;
      }
    }
    const PosteriorStats& stats = entry->first;
    const ActionDist& xi = entry->second;
    tr.max_tower_error = std::max(tr.max_tower_error, stats.tower_error);
    if (xi.zero_information) ++tr.zero_information_rounds;

    TraceRow row;
    row.round = round;
    row.action_index = sample_index(xi, rng);
    row.loss = table.at(tr.truth, round, row.action_index);
    cum += row.loss - table.at(tr.truth, round, tr.ystar);
    row.cum_regret = cum;
    row.delta = xi.delta;
    row.v = xi.v;
    const double excess = std::max(0.0, xi.delta - 2.0 / cfg.n - alpha);
    row.beta_hat = excess == 0.0 ? 0.0 : (xi.v > 0.0 ? excess * excess / (2.0 * xi.v) : kInf);
    w = posterior_update(w, table, round, row.action_index, row.loss, cfg.tol);
    row.entropy = entropy(w);
    tr.sum_2v += 2.0 * xi.v;
    tr.beta_hat = std::max(tr.beta_hat, row.beta_hat);
    tr.rows.push_back(row);
  }
  tr.regret = cum;
  tr.support_final = static_cast<std::size_t>(std::count_if(w.begin(), w.end(), [](double x) { return x > 0.0; }));
  return tr;
}

double regret_bound(double n, double d, double alpha, double beta, double diam) {
  const double inner = 3.0 * n * n * std::max(1.0, std::sqrt(2.0 * beta)) * diam;
  return 3.0 + n * alpha + std::sqrt(beta * d * n * std::log(inner));
}

double cover_regret_bound(double n, double alpha, double beta, double cover_size) {
  return 2.0 + n * alpha + std::sqrt(n * beta * std::log(cover_size));
}

Prior quadratic_prior(const ConvexBody& domain, int atoms, int n, std::uint64_t seed) {
  require(atoms >= 1, Errc::InvalidArgument, "quadratic_prior: need at least one atom");
  const double diam = domain.diameter();
  Prior p;
  for (int i = 0; i < atoms; ++i) {
    Rng rng(seed, "prior-atom", static_cast<std::uint64_t>(i));
    p.atoms.push_back({lift_loss(random_prior_atom(rng, domain, n), n, diam)});
    p.weights.push_back(1.0 / atoms);
  }
  return p;
}

Prior drifting_prior(const ConvexBody& domain, int atoms, int n, std::uint64_t seed) {
  require(atoms >= 1, Errc::InvalidArgument, "drifting_prior: need at least one atom");
  const double diam = domain.diameter();
  const auto d = domain.dim();
  Prior p;
  for (int i = 0; i < atoms; ++i) {
    Rng rng(seed, "prior-sequence", static_cast<std::uint64_t>(i));
    const double scale = rng.uniform(0.4, 1.0) * 0.9 / (diam * diam);
    const double offset = rng.uniform(0.0, 0.1);
    Vector c = rng.uniform_box(domain.bbox_lo(), domain.bbox_hi());
    std::vector<ConvexFunction> seq;
    for (int t = 0; t < n; ++t) {
      c = (c + 0.02 * rng.normal_vector(d)).cwiseMax(domain.bbox_lo()).cwiseMin(domain.bbox_hi());
      seq.push_back(lift_loss(ConvexFunction::isotropic_quadratic(c, scale, offset), n, diam));
    }
    p.atoms.push_back(std::move(seq));
    p.weights.push_back(1.0 / atoms);
  }
  return p;
}

namespace {

std::vector<EpisodeTrace> run_seeds(const Prior& prior, const CoverNet& cover, const ConvexBody& inset,
                                    const EpisodeConfig& ecfg, std::uint64_t base, std::size_t seeds,
                                    unsigned jobs) {
  std::vector<EpisodeTrace> traces(seeds);
  auto one = [&](std::size_t s) {
    traces[s] = run_episode(prior, cover, inset, ecfg, substream_seed(base, hash_tag("episode"), s));
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(seeds, 1))));
  if (jobs == 1) {
    for (std::size_t s = 0; s < seeds; ++s) one(s);
    return traces;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(jobs);
  for (unsigned j = 0; j < jobs; ++j) {
    pool.emplace_back([&, j] {
      try {
        for (std::size_t s = j; s < seeds; s += jobs) one(s);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return traces;
}

double max_beta(const std::vector<EpisodeTrace>& traces) {
  double b = 0.0;
  for (const auto& t : traces) b = std::max(b, t.beta_hat);
  return b;
}

}  // namespace

SweepSummary run_sweep(const SweepConfig& cfg) {
  require(cfg.d >= 1 && cfg.n >= 1 && cfg.atoms >= 1 && cfg.seeds >= 1, Errc::InvalidArgument,
          "run_sweep: d, n, atoms and seeds must be positive");
  const ConvexBody domain =
      ConvexBody::box(Vector::Constant(cfg.d, -1.0), Vector::Constant(cfg.d, 1.0));
  const ConvexBody inset = shrink_domain(domain, cfg.n);
  const Prior prior = cfg.sequence_prior ? drifting_prior(domain, cfg.atoms, cfg.n, cfg.seed)
                                         : quadratic_prior(domain, cfg.atoms, cfg.n, cfg.seed);
  EpisodeConfig ecfg;
  ecfg.n = cfg.n;
  ecfg.mode = cfg.mode;
  ecfg.explore = cfg.explore;

  SweepSummary sum;
  double radius = cfg.cover_radius;
  if (radius <= 0.0) {
    double beta = cfg.beta;
    if (beta <= 0.0) {
      // Pilot pass on a coarse cover to fit beta for the radius formula.
      const CoverNet pilot = build_cover(inset, 0.05);
      const std::size_t pilot_seeds = std::min<std::size_t>(cfg.seeds, 10);
      beta = max_beta(run_seeds(prior, pilot, inset, ecfg, substream_seed(cfg.seed, hash_tag("pilot")),
                                pilot_seeds, cfg.jobs));
      sum.pilot_beta = beta;
    }
    radius = default_cover_radius(cfg.n, beta);
  }
  const CoverNet cover = build_cover(inset, radius);
  sum.traces = run_seeds(prior, cover, inset, ecfg, cfg.seed, cfg.seeds, cfg.jobs);

  std::vector<double> regrets, info;
  for (const auto& t : sum.traces) regrets.push_back(t.regret), info.push_back(t.sum_2v);
  auto mean_se = [](const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::pair{m, v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0};
  };
  std::tie(sum.mean_regret, sum.regret_se) = mean_se(regrets);
  std::tie(sum.mean_sum_2v, sum.sum_2v_se) = mean_se(info);
  sum.seeds = cfg.seeds;
  sum.beta_hat = max_beta(sum.traces);
  sum.cover_size = cover.size();
  sum.cover_radius = radius;
  sum.log_cover = std::log(static_cast<double>(cover.size()));
  sum.bound_value = cover_regret_bound(cfg.n, 1.0 / cfg.n, sum.beta_hat, static_cast<double>(cover.size()));
  return sum;
}

std::string trace_csv_header() { return "round,action_index,loss,delta,v,entropy,cum_regret"; }

void write_trace_csv(std::ostream& os, const EpisodeTrace& trace) {
  char buf[256];
  os << trace_csv_header() << "\n";
  for (const auto& r : trace.rows) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.round, r.action_index,
                  r.loss, r.delta, r.v, r.entropy, r.cum_regret);
    os << buf;
  }
}

}  // namespace bcolab::ids

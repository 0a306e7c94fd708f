#include "nilspec/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "nilspec/parallel.hpp"

namespace nilspec {

namespace {

Mat to_eigen(const QMatrix& m) {
  Mat out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c).to_double();
  return out;
}

Vec to_eigen(const QVector& v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].to_double();
  return out;
}

}  // namespace

Geometry::Geometry(const LieAlgebra& L, const Metric& m)
    : algebra_(std::make_shared<LieAlgebra>(L)), metric_(m), frame_(adapted_frame(L, m)), n_(L.dim()) {
  for (std::size_t a = 0; a < n_; ++a)
    for (std::size_t b = 0; b < n_; ++b)
      for (std::size_t c = 0; c < n_; ++c)
        if (!frame_.structure(a, b, c).is_zero()) terms_.push_back({a, b, c, frame_.structure(a, b, c).to_double()});
  for (const auto& x : frame_.A) A_.push_back(x.to_double());
  for (const auto& x : frame_.B) B_.push_back(x.to_double());
  for (const auto& x : frame_.C) C_.push_back(x.to_double());
  // y_frame = v_struct * inverse_frame, v_struct = y_frame * frame_matrix
  to_frame_ = to_eigen(frame_.inverse_frame).transpose();
  from_frame_ = to_eigen(frame_.frame_matrix()).transpose();
  for (const auto& z : L.filtration().center.basis()) {
    Vec v = to_frame(z);
    for (const auto& w : center_) v -= w.dot(v) * w;
    if (v.norm() > 1e-12) center_.push_back(v / v.norm());
  }
}

Vec Geometry::bracket(const Vec& x, const Vec& y) const {
  Vec out = Vec::Zero(n_);
  for (const auto& t : terms_) out[t.c] += t.v * x[t.a] * y[t.b];
  return out;
}

Vec Geometry::product(const Vec& x, const Vec& y) const {
  const Vec xy = bracket(x, y);
  Vec out = x + y + 0.5 * xy;
  if (algebra_->step() >= 3) out += (bracket(x, xy) - bracket(y, xy)) / 12.0;
  return out;
}

Vec Geometry::conjugate(const Vec& a, const Vec& x) const {
  const Vec ax = bracket(a, x);
  return x + ax + 0.5 * bracket(a, ax);
}

Vec Geometry::to_frame(const QVector& v) const { return to_frame_ * to_eigen(v); }
Vec Geometry::from_frame(const Vec& v) const { return from_frame_ * v; }

QVector Geometry::from_frame_exact(const Vec& v) const {
  QVector a(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double r = std::round(v[i]);
    if (std::abs(v[i] - r) > 1e-12) throw std::domain_error("frame coefficient is not an integer");
    a[static_cast<std::size_t>(i)] = Rational(static_cast<std::int64_t>(r));
  }
  return frame_.from_frame(a);
}

bool Geometry::central(const Vec& v, double tol) const {
  for (std::size_t i = 0; i < n_; ++i)
    if (bracket(v, Vec::Unit(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(i))).norm() > tol) return false;
  return true;
}

QVector covariant_derivative(const AdaptedFrame& F, const QVector& v, const QVector& y) {
  const std::size_t n = F.dim();
  QVector out(n);
  for (std::size_t c = 0; c < n; ++c) {
    Rational acc;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        if (v[a].is_zero() && y[a].is_zero()) continue;
        // <[E_c, v], y> + <[E_c, y], v> + <[v, y], E_c>
        acc += F.structure(c, a, b) * (v[a] * y[b] + y[a] * v[b]) + F.structure(a, b, c) * v[a] * y[b];
      }
    out[c] = acc / Rational(2);
  }
  return out;
}

Mat frame_fields_at(const Geometry& g, const Vec& y) {
  const auto n = static_cast<Eigen::Index>(g.dim());
  Mat M(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec e = Vec::Unit(n, i);
    const Vec ye = g.bracket(y, e);
    M.row(i) = (e + 0.5 * ye + g.bracket(y, ye) / 12.0).transpose();
  }
  return M;
}

Vec geodesic_rhs(const Geometry& g, const Vec& y, const Vec& vbar) {
  const std::size_t J = g.J(), K = g.K(), T = g.T();
  const auto x = y.head(static_cast<Eigen::Index>(J));
  const auto z = y.segment(static_cast<Eigen::Index>(J), static_cast<Eigen::Index>(K));
  const auto xb = vbar.head(static_cast<Eigen::Index>(J));
  const auto zb = vbar.segment(static_cast<Eigen::Index>(J), static_cast<Eigen::Index>(K));
  const auto wb = vbar.tail(static_cast<Eigen::Index>(T));
  Vec dx(J), dz(K), dw(T);
  for (std::size_t j = 0; j < J; ++j) {
    double s = xb[j];
    for (std::size_t l = 0; l < J; ++l) {
      for (std::size_t k = 0; k < K; ++k) s -= x[l] * g.a(j, l, k) * zb[k];
      for (std::size_t t = 0; t < T; ++t) s -= x[l] * g.b(j, l, t) * wb[t];
    }
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t t = 0; t < T; ++t) s -= z[k] * g.c(j, k, t) * wb[t];
    for (std::size_t i = 0; i < J; ++i)
      for (std::size_t l = 0; l < J; ++l)
        for (std::size_t k = 0; k < K; ++k)
          for (std::size_t t = 0; t < T; ++t) s -= 0.5 * x[i] * x[l] * wb[t] * g.c(i, k, t) * g.a(j, l, k);
    dx[j] = s;
  }
  for (std::size_t k = 0; k < K; ++k) {
    double s = zb[k];
    for (std::size_t i = 0; i < J; ++i)
      for (std::size_t j = 0; j < J; ++j) s += 0.5 * x[i] * dx[j] * g.a(i, j, k);
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t t = 0; t < T; ++t) s += x[j] * wb[t] * g.c(j, k, t);
    dz[k] = s;
  }
  for (std::size_t t = 0; t < T; ++t) {
    double s = wb[t];
    for (std::size_t i = 0; i < J; ++i)
      for (std::size_t j = 0; j < J; ++j) s += 0.5 * x[i] * dx[j] * g.b(i, j, t);
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t k = 0; k < K; ++k) s += 0.5 * (x[j] * dz[k] - dx[j] * z[k]) * g.c(j, k, t);
    for (std::size_t i = 0; i < J; ++i)
      for (std::size_t j = 0; j < J; ++j)
        for (std::size_t l = 0; l < J; ++l)
          for (std::size_t k = 0; k < K; ++k) s -= x[i] * dx[j] * x[l] * g.c(i, k, t) * g.a(l, j, k) / 6.0;
    dw[t] = s;
  }
  Vec out(g.dim());
  out << dx, dz, dw;
  return out;
}

Vec velocity_rhs(const Geometry& g, const Vec& u) {
  // du_c/ds = <[u, E_c], u>
  const auto n = static_cast<Eigen::Index>(g.dim());
  Vec out(n);
  for (Eigen::Index c = 0; c < n; ++c) out[c] = g.bracket(u, Vec::Unit(n, c)).dot(u);
  return out;
}

namespace {

// Coordinate velocity of the curve with left-invariant velocity u at y.
Vec position_rhs(const Geometry& g, const Vec& y, const Vec& u) {
  const Vec yu = g.bracket(y, u);
  return u + 0.5 * yu + g.bracket(y, yu) / 12.0;
}

struct State {
  Vec y, u;
};

State rk4_step(const Geometry& g, const State& s, double h) {
  const Vec k1y = position_rhs(g, s.y, s.u), k1u = velocity_rhs(g, s.u);
  const Vec y2 = s.y + 0.5 * h * k1y, u2 = s.u + 0.5 * h * k1u;
  const Vec k2y = position_rhs(g, y2, u2), k2u = velocity_rhs(g, u2);
  const Vec y3 = s.y + 0.5 * h * k2y, u3 = s.u + 0.5 * h * k2u;
  const Vec k3y = position_rhs(g, y3, u3), k3u = velocity_rhs(g, u3);
  const Vec y4 = s.y + h * k3y, u4 = s.u + h * k3u;
  const Vec k4y = position_rhs(g, y4, u4), k4u = velocity_rhs(g, u4);
  return {s.y + h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y), s.u + h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)};
}

// Endpoint only, for the search.
State flow(const Geometry& g, State s, double duration, int steps) {
  const double h = duration / steps;
  for (int i = 0; i < steps; ++i) s = rk4_step(g, s, h);
  return s;
}

}  // namespace

double Trajectory::speed_drift() const {
  double d = 0.0;
  for (const auto& v : u) d = std::max(d, std::abs(v.norm() - u.front().norm()));
  return d;
}

Vec Trajectory::at(const Geometry& g, double t) const {
  if (s.size() == 1 || t <= s.front()) return y.front();
  if (t >= s.back()) return y.back();
  auto i = static_cast<std::size_t>(std::floor((t - s.front()) / step));
  i = std::min(i, s.size() - 2);
  const double h = s[i + 1] - s[i], tau = (t - s[i]) / h;
  if (tau < 1e-12) return y[i];
  if (tau > 1 - 1e-12) return y[i + 1];
  const Vec m0 = position_rhs(g, y[i], u[i]) * h, m1 = position_rhs(g, y[i + 1], u[i + 1]) * h;
  const double t2 = tau * tau, t3 = t2 * tau;
  return (2 * t3 - 3 * t2 + 1) * y[i] + (t3 - 2 * t2 + tau) * m0 + (-2 * t3 + 3 * t2) * y[i + 1] + (t3 - t2) * m1;
}

Trajectory integrate(const Geometry& g, const GeodesicInitialData& init, double duration, double step) {
  if (!(step > 0)) throw std::invalid_argument("step must be positive");
  if (!(duration >= 0)) throw std::invalid_argument("duration must be non-negative");
  const auto n = static_cast<Eigen::Index>(g.dim());
  if (init.velocity.size() != n) throw std::invalid_argument("velocity has the wrong dimension");
  if (std::abs(init.velocity.norm() - 1.0) > 1e-9) throw std::invalid_argument("initial velocity must be unit length");
  State st{init.point.size() == 0 ? Vec(Vec::Zero(n)) : init.point, init.velocity};
  Trajectory tr;
  const auto steps = duration == 0 ? 0 : std::max<long>(1, std::lround(std::ceil(duration / step - 1e-9)));
  tr.step = steps == 0 ? step : duration / static_cast<double>(steps);
  tr.s.reserve(static_cast<std::size_t>(steps) + 1);
  tr.s.push_back(0.0);
  tr.y.push_back(st.y);
  tr.u.push_back(st.u);
  for (long i = 1; i <= steps; ++i) {
    st = rk4_step(g, st, tr.step);
    tr.s.push_back(static_cast<double>(i) * tr.step);
    tr.y.push_back(st.y);
    tr.u.push_back(st.u);
  }
  return tr;
}

double translation_residual(const Geometry& g, const Vec& gamma, const Trajectory& traj, double lambda) {
  if (lambda < 0) throw std::invalid_argument("negative period");
  const double end = traj.s.back();
  if (lambda > end + 1e-12) throw std::invalid_argument("trajectory shorter than the period");
  const double shift = lambda / traj.step;
  const auto whole = static_cast<long>(std::lround(shift));
  const bool aligned = std::abs(shift - static_cast<double>(whole)) < 1e-6;
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.s.size(); ++i) {
    if (traj.s[i] + lambda > end + 1e-12) break;
    const Vec later = aligned ? traj.y[i + static_cast<std::size_t>(whole)] : traj.at(g, traj.s[i] + lambda);
    const Vec moved = g.product(gamma, traj.y[i]);
    worst = std::max(worst, g.product(-moved, later).norm());
  }
  return worst;
}

TranslationCertificate certify(const Geometry& g, const Vec& gamma, double lambda, const Vec& point, const Vec& velocity,
                               double step) {
  TranslationCertificate cert;
  cert.gamma = gamma;
  cert.lambda = lambda;
  cert.point = point.size() == 0 ? Vec(Vec::Zero(static_cast<Eigen::Index>(g.dim()))) : point;
  cert.velocity = velocity;
  const double steps = std::max(1.0, std::ceil(lambda / step - 1e-9));
  const double h = lambda / steps;
  const double margin = std::max(10.0, std::ceil(0.25 * steps));
  cert.trajectory = integrate(g, {cert.point, velocity}, (steps + margin) * h, h);
  cert.residual_translation = translation_residual(g, gamma, cert.trajectory, lambda);
  cert.residual_orthogonality = check_translation_orthogonality(g, cert);
  cert.residual_horizontality = check_horizontality(g, cert);
  return cert;
}

namespace {

struct ShootingFunctor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Vec;
  using ValueType = Vec;
  using JacobianType = Mat;

  const Geometry* g;
  Vec gamma;
  int steps;
  bool offset;

  int inputs() const { return static_cast<int>(g->dim() + 1 + (offset ? g->J() : 0)); }
  int values() const { return static_cast<int>(2 * g->dim() + 1); }

  Vec point(const Vec& x) const {
    Vec p = Vec::Zero(static_cast<Eigen::Index>(g->dim()));
    if (offset) p.head(static_cast<Eigen::Index>(g->J())) = x.tail(static_cast<Eigen::Index>(g->J()));
    return p;
  }

  int operator()(const Vec& x, Vec& f) const {
    const auto n = static_cast<Eigen::Index>(g->dim());
    const Vec v = x.head(n);
    const double lambda = x[n];
    f.resize(values());
    if (!(lambda > 1e-6) || v.norm() < 1e-9) {
      f.setConstant(1e3);
      return 0;
    }
    const Vec u0 = v / v.norm();
    const Vec p = point(x);
    // sigma = p * alpha is translated by gamma iff alpha is translated by p^-1 gamma p.
    const Vec gp = g->conjugate(-p, gamma);
    const State end = flow(*g, {Vec::Zero(n), u0}, lambda, steps);
    f.head(n) = g->product(-gp, end.y);
    f.segment(n, n) = end.u - u0;
    f[2 * n] = v.squaredNorm() - 1.0;
    return 0;
  }
};

}  // namespace

std::optional<TranslationCertificate> find_translated_geodesic(const Geometry& g, const Vec& gamma, double lambda_hint,
                                                               const Vec& velocity_hint, const ShootingOptions& opt) {
  const auto n = static_cast<Eigen::Index>(g.dim());
  if (gamma.norm() < 1e-14) throw std::invalid_argument("gamma must not be the identity");
  Vec hint = velocity_hint.size() == n ? velocity_hint : gamma;
  hint /= hint.norm();
  const bool offset = opt.offset && g.J() > 0;

  struct Outcome {
    std::optional<TranslationCertificate> cert;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(opt.seeds));
  auto run = [&](std::size_t s) {
    ShootingFunctor fun{&g, gamma, opt.search_steps, offset};
    Vec x = Vec::Zero(fun.inputs());
    std::mt19937_64 rng(s);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec v = hint;
    double lambda = lambda_hint;
    if (s > 0) {
      const double scale = 0.05 + 0.5 * static_cast<double>(s) / opt.seeds;
      for (Eigen::Index i = 0; i < n; ++i) v[i] += scale * normal(rng);
      lambda *= 1.0 + 0.05 * scale * normal(rng);
    }
    x.head(n) = v / v.norm();
    x[n] = lambda;
    if (offset && s > 0)
      for (std::size_t j = 0; j < g.J(); ++j) x[n + 1 + static_cast<Eigen::Index>(j)] = 0.3 * normal(rng);
    Eigen::NumericalDiff<ShootingFunctor> diff(fun);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<ShootingFunctor>> lm(diff);
    lm.parameters.maxfev = 4000;
    lm.parameters.xtol = 1e-14;
    lm.parameters.ftol = 1e-14;
    lm.minimize(x);
    if (!(x[n] > 1e-6) || x.head(n).norm() < 1e-9) return;
    const Vec u0 = x.head(n) / x.head(n).norm();
    auto cert = certify(g, gamma, x[n], fun.point(x), u0, opt.step);
    cert.seed = static_cast<int>(s);
    if (cert.residual_translation < opt.tolerance) outcomes[s].cert = std::move(cert);
  };

  // Fixed-size batches keep the reduction independent of the thread count.
  constexpr std::size_t batch = 8;
  std::optional<TranslationCertificate> best;
  for (std::size_t start = 0; start < outcomes.size(); start += batch) {
    const std::size_t count = std::min(batch, outcomes.size() - start);
    parallel_for(count, [&](std::size_t i) { run(start + i); });
    for (std::size_t i = start; i < start + count; ++i) {
      auto& c = outcomes[i].cert;
      if (c && (!best || c->residual_translation < best->residual_translation)) best = std::move(c);
    }
    if (best) break;
  }
  return best;
}

double check_translation_orthogonality(const Geometry& g, const TranslationCertificate& cert) {
  const auto n = static_cast<Eigen::Index>(g.dim());
  const Vec y = g.conjugate(-cert.point, cert.gamma);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) worst = std::max(worst, std::abs(g.bracket(y, Vec::Unit(n, i)).dot(cert.velocity)));
  return worst;
}

std::optional<double> check_horizontality(const Geometry& g, const TranslationCertificate& cert) {
  if (g.central(cert.gamma, 1e-12)) return std::nullopt;
  double worst = 0.0;
  for (const auto& u : cert.trajectory.u)
    for (const auto& z : g.center_basis()) worst = std::max(worst, std::abs(z.dot(u)));
  return worst;
}

SubmersionMaps submersion_maps(const Geometry& upper, const Geometry& lower, const Quotient& q) {
  const Mat P = to_eigen(q.proj), S = to_eigen(q.section);
  // frame -> structural -> quotient structural -> quotient frame
  Mat from_up = to_eigen(upper.frame().frame_matrix()).transpose();
  Mat to_low = to_eigen(lower.frame().inverse_frame).transpose();
  Mat from_low = to_eigen(lower.frame().frame_matrix()).transpose();
  Mat to_up = to_eigen(upper.frame().inverse_frame).transpose();
  return {to_low * P * from_up, to_up * S * from_low};
}

Trajectory horizontal_lift(const Geometry& upper, const SubmersionMaps& maps, const Trajectory& quotient_traj,
                           const Vec& base) {
  Vec u0 = maps.lift * quotient_traj.u.front();
  const double speed = u0.norm();
  if (speed < 1e-15) {
    Trajectory tr = quotient_traj;
    for (auto& y : tr.y) y = base;
    for (auto& u : tr.u) u = Vec::Zero(base.size());
    return tr;
  }
  // integrate() wants unit speed; rescale time for other speeds.
  const double duration = quotient_traj.s.back() * speed;
  Trajectory tr = integrate(upper, {base, u0 / speed}, duration, quotient_traj.step * speed);
  for (auto& t : tr.s) t /= speed;
  for (auto& u : tr.u) u *= speed;
  tr.step /= speed;
  return tr;
}

std::string trajectory_csv(const Geometry& g, const Trajectory& traj) {
  std::ostringstream out;
  out.precision(17);
  out << "s";
  const auto& F = g.frame();
  for (std::size_t j = 0; j < F.J; ++j) out << ",x" << j + 1;
  for (std::size_t k = 0; k < F.K; ++k) out << ",z" << k + 1;
  for (std::size_t t = 0; t < F.T; ++t) out << ",w" << t + 1;
  out << "\n";
  for (std::size_t i = 0; i < traj.s.size(); ++i) {
    out << traj.s[i];
    for (Eigen::Index c = 0; c < traj.y[i].size(); ++c) out << "," << traj.y[i][c];
    out << "\n";
  }
  return out.str();
}

}  // namespace nilspec

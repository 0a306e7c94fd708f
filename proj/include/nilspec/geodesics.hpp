#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nilspec/algebra.hpp"

// Geodesics of a left-invariant metric, in exponential coordinates taken with
// respect to the adapted orthonormal frame X..., Z..., W...

namespace nilspec {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Float view of (algebra, metric, adapted frame) for the integrator.
class Geometry {
 public:
  Geometry(const LieAlgebra& L, const Metric& m);

  std::size_t dim() const { return n_; }
  std::size_t J() const { return frame_.J; }
  std::size_t K() const { return frame_.K; }
  std::size_t T() const { return frame_.T; }
  const LieAlgebra& algebra() const { return *algebra_; }
  const Metric& metric() const { return metric_; }
  const AdaptedFrame& frame() const { return frame_; }

  /// [a, b] for frame coefficient vectors.
  Vec bracket(const Vec& a, const Vec& b) const;
  /// Group law on frame log coordinates (BCH through the cubic terms).
  Vec product(const Vec& a, const Vec& b) const;
  Vec conjugate(const Vec& a, const Vec& x) const;

  Vec to_frame(const QVector& structural) const;
  QVector from_frame_exact(const Vec& v) const;  // rounding-free only for exactly representable input
  Vec from_frame(const Vec& v) const;            // structural coordinates, float

  /// Orthonormal basis (frame coefficients) of the center of g.
  const std::vector<Vec>& center_basis() const { return center_; }
  bool central(const Vec& v, double tol = 1e-12) const;

  // A, B, C as floats, same layout as AdaptedFrame.
  double a(std::size_t i, std::size_t j, std::size_t k) const { return A_[(i * J() + j) * K() + k]; }
  double b(std::size_t i, std::size_t j, std::size_t t) const { return B_[(i * J() + j) * T() + t]; }
  double c(std::size_t i, std::size_t k, std::size_t t) const { return C_[(i * K() + k) * T() + t]; }

 private:
  struct Term {
    std::size_t a, b, c;
    double v;
  };
  std::shared_ptr<const LieAlgebra> algebra_;
  Metric metric_;
  AdaptedFrame frame_;
  std::size_t n_;
  std::vector<Term> terms_;  // nonzero <[E_a, E_b], E_c>
  std::vector<double> A_, B_, C_;
  Mat to_frame_, from_frame_;
  std::vector<Vec> center_;
};

/// Levi-Civita connection on left-invariant fields: frame coefficients of nabla_v y, exact.
QVector covariant_derivative(const AdaptedFrame& F, const QVector& v, const QVector& y);

/// Row i holds the left-invariant field E_i at the point with coordinates y,
/// written in the coordinate basis d/dx, d/dz, d/dw.
Mat frame_fields_at(const Geometry& g, const Vec& y);

/// The first-order system for geodesics leaving the identity with initial
/// velocity vbar: returns (dx/ds, dz/ds, dw/ds) at coordinates y.
Vec geodesic_rhs(const Geometry& g, const Vec& y, const Vec& vbar);

/// Euler-Arnold form: derivative of the left-invariant velocity coefficients u.
Vec velocity_rhs(const Geometry& g, const Vec& u);

struct GeodesicInitialData {
  Vec point;     // coordinates of sigma(0); empty means the identity
  Vec velocity;  // frame coefficients, unit length
};

struct Trajectory {
  std::vector<double> s;
  std::vector<Vec> y;  // coordinates
  std::vector<Vec> u;  // velocity in the left-invariant frame
  double step = 0.0;
  int order = 4;
  double speed_drift() const;
  /// Coordinates at time t by cubic Hermite interpolation between samples.
  Vec at(const Geometry& g, double t) const;
};

/// Fixed-step classical RK4 on (coordinates, velocity). The step is shrunk so
/// that duration is a whole number of steps.
Trajectory integrate(const Geometry& g, const GeodesicInitialData& init, double duration, double step = 1e-3);

/// max over samples s with s + lambda in range of |log((gamma sigma(s))^-1 sigma(s + lambda))|.
double translation_residual(const Geometry& g, const Vec& gamma, const Trajectory& traj, double lambda);

struct TranslationCertificate {
  Vec gamma;     // frame coordinates
  double lambda = 0.0;
  Vec point;     // sigma(0)
  Vec velocity;  // sigma'(0) in the left-invariant frame
  Trajectory trajectory;
  double residual_translation = 0.0;
  double residual_orthogonality = 0.0;
  std::optional<double> residual_horizontality;  // nullopt: not applicable (gamma central)
  int seed = -1;
};

struct ShootingOptions {
  int seeds = 32;
  double tolerance = 1e-6;
  double step = 1e-3;       // certification step
  int search_steps = 800;   // RK4 steps per period during the search
  bool offset = true;       // optimize the starting point over exp(nu)
};

/// Multi-start Levenberg-Marquardt search for a geodesic translated by gamma.
/// nullopt means the search failed; it is not a proof that no period exists.
std::optional<TranslationCertificate> find_translated_geodesic(const Geometry& g, const Vec& gamma, double lambda_hint,
                                                               const Vec& velocity_hint = {},
                                                               const ShootingOptions& opt = {});

/// Builds a certificate for given data (no search): integrates and fills all residuals.
TranslationCertificate certify(const Geometry& g, const Vec& gamma, double lambda, const Vec& point,
                               const Vec& velocity, double step = 1e-3);

/// max over frame vectors E_i of |<[log(p^-1 gamma p), E_i], sigma'(0)>| in left-invariant terms.
double check_translation_orthogonality(const Geometry& g, const TranslationCertificate& cert);

/// max over samples and unit central z of |<z, u(s)>|; nullopt when gamma is central.
std::optional<double> check_horizontality(const Geometry& g, const TranslationCertificate& cert);

/// Maps between the upstairs and quotient frames.
struct SubmersionMaps {
  Mat project;  // upstairs frame coordinates -> quotient frame coordinates
  Mat lift;     // quotient frame coefficients -> horizontal upstairs frame coefficients
};
SubmersionMaps submersion_maps(const Geometry& upper, const Geometry& lower, const Quotient& q);

/// Horizontal geodesic upstairs through `base` whose projection is the quotient trajectory.
Trajectory horizontal_lift(const Geometry& upper, const SubmersionMaps& maps, const Trajectory& quotient_traj,
                           const Vec& base);

std::string trajectory_csv(const Geometry& g, const Trajectory& traj);

}  // namespace nilspec

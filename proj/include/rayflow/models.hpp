#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rayflow/graph.hpp"

namespace rayflow {

/// Property classes a vector field can claim. Claims gate which analyses a
/// scenario may request; the checkers module tests them empirically.
enum class ModelClass : unsigned {
  GrossSubstitute = 1u << 0,        // raising other components never lowers a rate
  StrongGrossSubstitute = 1u << 1,  // ... strictly raises it (open cone)
  BoundaryNonnegative = 1u << 2,    // rate i >= 0 on the face e_i = 0
  ScaleInvariant = 1u << 3,         // g(t, lambda*e) = g(t, e), lambda > 0
  RayContracting = 1u << 4,         // off the ray: max rate < 0, min rate > 0
};

class ClassSet {
 public:
  ClassSet() = default;
  ClassSet& add(ModelClass c) {
    bits_ |= static_cast<unsigned>(c);
    return *this;
  }
  bool has(ModelClass c) const { return bits_ & static_cast<unsigned>(c); }
  std::vector<std::string> tokens() const;

 private:
  unsigned bits_ = 0;
};

/// Token used in reports and the CLI for each class.
std::string class_token(ModelClass c);

enum class Domain {
  Orthant,   // defined on all of R+^m (boundary included)
  OpenCone,  // singular where a guarded component hits zero
};

/// Time-varying vector field e' = g(t, e). Deterministic and pure: many
/// evaluations may run concurrently on a shared instance.
class ExcessDemandModel {
 public:
  virtual ~ExcessDemandModel() = default;

  virtual int dimension() const = 0;
  virtual Domain domain() const = 0;
  virtual ClassSet claimed_classes() const = 0;
  virtual std::string id() const = 0;

  /// Raw evaluation, no precondition checks. out.size() == dimension().
  virtual void eval_into(double t, std::span<const double> e,
                         std::span<double> out) const = 0;

  /// Half-open index range of components that must stay strictly positive.
  /// The whole state for open-cone models, empty for orthant ones;
  /// composite models override to guard only their edge block.
  virtual std::pair<int, int> cone_block() const {
    return domain() == Domain::OpenCone ? std::pair{0, dimension()}
                                        : std::pair{0, 0};
  }

  /// Checked evaluation: validates the domain precondition and that the
  /// output is finite. DomainError / NumericError otherwise.
  DensityVector eval(double t, const DensityVector& e) const;
};

using ModelPtr = std::shared_ptr<const ExcessDemandModel>;

// ---------------------------------------------------------------------------
// Linear model  e' = A e + b
// ---------------------------------------------------------------------------

/// Row-major square matrix, the only shape the model catalog needs.
struct Matrix {
  int n = 0;
  std::vector<double> a;  // row-major, n*n

  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }

  static Matrix zero(int n) { return {n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)}; }
};

struct MetzlerCheck {
  bool ok = false;
  // First violating entry in row-major order, when !ok.
  std::optional<std::pair<int, int>> violation;
};

/// Sign-pattern test: a_ii < 0 and a_ij >= 0 for i != j.
MetzlerCheck is_metzler(const Matrix& a);

/// Linear field e' = A e + b. The general constructor accepts any square A
/// so the checkers can probe planted sign violations; metzler() additionally
/// validates the sign pattern and b >= 0.
class LinearModel : public ExcessDemandModel {
 public:
  LinearModel(Matrix a, std::vector<double> b, std::string id = "linear");

  /// Validating constructor for the substitute-coupled case.
  static std::shared_ptr<LinearModel> metzler(Matrix a, std::vector<double> b,
                                              std::string id = "linear");

  int dimension() const override { return a_.n; }
  Domain domain() const override { return Domain::Orthant; }
  ClassSet claimed_classes() const override;
  std::string id() const override { return id_; }
  void eval_into(double t, std::span<const double> e,
                 std::span<double> out) const override;

  const Matrix& a() const { return a_; }
  const std::vector<double>& b() const { return b_; }

 private:
  Matrix a_;
  std::vector<double> b_;
  std::string id_;
};

struct LinearEquilibrium {
  DensityVector equilibrium;  // solves A e + b = 0
  bool hurwitz = false;       // all eigenvalues of A in the open left half plane
  bool nonnegative = false;   // equilibrium componentwise >= 0
};

/// Solves A e = -b and classifies the matrix. Requires the validated sign
/// pattern (the Hurwitz test is the M-matrix minor criterion, which is only
/// a theorem for that class). SingularMatrixError when A is singular.
LinearEquilibrium linear_equilibrium(const LinearModel& model);

// ---------------------------------------------------------------------------
// Ratio-coupled consensus field
// ---------------------------------------------------------------------------

/// One piece of a piecewise-constant weight schedule, active from t_from
/// until the next breakpoint (the first piece also covers earlier times).
struct WeightSegment {
  double t_from = 0.0;
  Matrix w;  // nonnegative, zero diagonal
};

/// g_i(t, e) = sum_j w_ij(t) * (e_j / e_i - 1) on the open cone.
///
/// Pure-ratio form: exactly scale invariant, strongly substitute-coupled
/// wherever each row keeps a positive off-diagonal entry, and ray
/// contracting when every segment's weight digraph is strongly connected.
/// Violations of the last two downgrade the claims and add a warning
/// instead of failing construction, so degenerate instances remain
/// buildable for the checkers.
class RatioConsensusModel : public ExcessDemandModel {
 public:
  RatioConsensusModel(std::vector<WeightSegment> schedule, std::string id = "ratio");

  static std::shared_ptr<RatioConsensusModel> constant(Matrix w, std::string id = "ratio");

  int dimension() const override { return m_; }
  Domain domain() const override { return Domain::OpenCone; }
  ClassSet claimed_classes() const override { return classes_; }
  std::string id() const override { return id_; }
  void eval_into(double t, std::span<const double> e,
                 std::span<double> out) const override;

  const Matrix& weights_at(double t) const;
  const std::vector<WeightSegment>& schedule() const { return schedule_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::vector<WeightSegment> schedule_;
  int m_;
  ClassSet classes_;
  std::vector<std::string> warnings_;
  std::string id_;
};

/// Strong connectivity of the digraph with an arc i->j wherever w_ij > 0.
bool is_irreducible(const Matrix& w);

// ---------------------------------------------------------------------------
// Difference-coupled (Laplacian) consensus on vertices
// ---------------------------------------------------------------------------

/// v_i' = -sum_j e_ij (v_i - v_j); entry (i, j) couples vertex j into i.
class LaplacianModel : public ExcessDemandModel {
 public:
  explicit LaplacianModel(Matrix adjacency, std::string id = "laplacian");

  int dimension() const override { return adj_.n; }
  Domain domain() const override { return Domain::Orthant; }
  ClassSet claimed_classes() const override { return classes_; }
  std::string id() const override { return id_; }
  void eval_into(double t, std::span<const double> e,
                 std::span<double> out) const override;

  const Matrix& adjacency() const { return adj_; }
  bool symmetric() const { return symmetric_; }

 private:
  Matrix adj_;
  ClassSet classes_;
  bool symmetric_;
  std::string id_;
};

// ---------------------------------------------------------------------------
// Composite vertex-and-edge system
// ---------------------------------------------------------------------------

/// State (v, e): difference consensus on the vertices whose coupling gains
/// are the live edge densities, while the edges follow their own
/// ratio-coupled dynamics. The vertex block reads e but never writes it;
/// the edge block ignores v.
class CompositeModel : public ExcessDemandModel {
 public:
  /// coupling edges are (tail, head) pairs; density k gates the influence
  /// of v_tail on v_head. Pairs must be distinct (no parallel edges here --
  /// the gains form an adjacency matrix). Edge dynamics dimension must
  /// equal the number of pairs.
  CompositeModel(int vertex_count, std::vector<std::pair<int, int>> coupling,
                 std::shared_ptr<const RatioConsensusModel> edge_dynamics,
                 std::string id = "composite");

  int dimension() const override { return n_ + edge_->dimension(); }
  Domain domain() const override { return Domain::OpenCone; }
  std::pair<int, int> cone_block() const override { return {n_, dimension()}; }
  ClassSet claimed_classes() const override { return ClassSet{}; }
  std::string id() const override { return id_; }
  void eval_into(double t, std::span<const double> state,
                 std::span<double> out) const override;

  int vertex_count() const { return n_; }
  int edge_count() const { return edge_->dimension(); }
  const RatioConsensusModel& edge_dynamics() const { return *edge_; }
  const std::vector<std::pair<int, int>>& coupling() const { return coupling_; }

 private:
  int n_;
  std::vector<std::pair<int, int>> coupling_;  // canonical (tail, head) order
  std::shared_ptr<const RatioConsensusModel> edge_;
  std::string id_;
};

// ---------------------------------------------------------------------------
// Epsilon shift
// ---------------------------------------------------------------------------

/// Wraps a model with eval'(t, e) = eval(t, e) + eps * 1. Keeps the
/// boundary-nonnegative and substitute-coupling claims, drops scale
/// invariance and ray contraction. DomainError for eps <= 0.
ModelPtr add_epsilon(ModelPtr model, double eps);

// ---------------------------------------------------------------------------
// Price normalization
// ---------------------------------------------------------------------------

/// Divides every component except raw[numeraire_index] by that entry,
/// preserving the order of the survivors. DomainError when the numeraire
/// is not strictly positive.
DensityVector normalize_prices(const DensityVector& raw, int numeraire_index);

}  // namespace rayflow

#include "rayflow/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "dense_lu.hpp"
#include "rayflow/errors.hpp"

namespace rayflow {

std::string class_token(ModelClass c) {
  switch (c) {
    case ModelClass::GrossSubstitute: return "gs";
    case ModelClass::StrongGrossSubstitute: return "strong-gs";
    case ModelClass::BoundaryNonnegative: return "class-n";
    case ModelClass::ScaleInvariant: return "homogeneity";
    case ModelClass::RayContracting: return "a5";
  }
  return "?";
}

std::vector<std::string> ClassSet::tokens() const {
  std::vector<std::string> out;
  for (ModelClass c : {ModelClass::GrossSubstitute, ModelClass::StrongGrossSubstitute,
                       ModelClass::BoundaryNonnegative, ModelClass::ScaleInvariant,
                       ModelClass::RayContracting})
    if (has(c)) out.push_back(class_token(c));
  return out;
}

DensityVector ExcessDemandModel::eval(double t, const DensityVector& e) const {
  if (static_cast<int>(e.size()) != dimension())
    throw StructuralError("state has " + std::to_string(e.size()) +
                          " components, model expects " + std::to_string(dimension()));
  const auto [lo, hi] = cone_block();
  for (int i = lo; i < hi; ++i)
    if (!(e[static_cast<std::size_t>(i)] > 0.0))
      throw DomainError("component " + std::to_string(i) +
                        " not strictly positive for open-cone model");
  DensityVector out(e.size());
  eval_into(t, e, out);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!std::isfinite(out[i]))
      throw NumericError("non-finite rate in component " + std::to_string(i), t);
  return out;
}

// ---------------------------------------------------------------------------
// Linear
// ---------------------------------------------------------------------------

MetzlerCheck is_metzler(const Matrix& a) {
  if (a.n <= 0 || a.a.size() != static_cast<std::size_t>(a.n) * a.n)
    throw StructuralError("matrix is not square");
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) {
      const bool bad = (i == j) ? !(a(i, j) < 0.0) : !(a(i, j) >= 0.0);
      if (bad) return {false, std::pair{i, j}};
    }
  return {true, std::nullopt};
}

LinearModel::LinearModel(Matrix a, std::vector<double> b, std::string id)
    : a_(std::move(a)), b_(std::move(b)), id_(std::move(id)) {
  if (a_.n <= 0 || a_.a.size() != static_cast<std::size_t>(a_.n) * a_.n)
    throw StructuralError("matrix is not square");
  if (static_cast<int>(b_.size()) != a_.n)
    throw StructuralError("offset vector length does not match matrix size");
}

std::shared_ptr<LinearModel> LinearModel::metzler(Matrix a, std::vector<double> b,
                                                  std::string id) {
  const auto check = is_metzler(a);
  if (!check.ok) {
    const auto [i, j] = *check.violation;
    throw StructuralError("sign pattern violated at (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
  }
  for (double x : b)
    if (x < 0.0) throw DomainError("offset vector must be nonnegative");
  return std::make_shared<LinearModel>(std::move(a), std::move(b), std::move(id));
}

ClassSet LinearModel::claimed_classes() const {
  ClassSet s;
  bool offdiag_nonneg = true, offdiag_pos = a_.n > 1;
  for (int i = 0; i < a_.n; ++i)
    for (int j = 0; j < a_.n; ++j) {
      if (i == j) continue;
      if (a_(i, j) < 0.0) offdiag_nonneg = false;
      if (!(a_(i, j) > 0.0)) offdiag_pos = false;
    }
  if (offdiag_nonneg) {
    s.add(ModelClass::GrossSubstitute);
    if (std::all_of(b_.begin(), b_.end(), [](double x) { return x >= 0.0; }))
      s.add(ModelClass::BoundaryNonnegative);
  }
  if (offdiag_pos) s.add(ModelClass::StrongGrossSubstitute);
  return s;
}

void LinearModel::eval_into(double, std::span<const double> e,
                            std::span<double> out) const {
  const int n = a_.n;
  for (int i = 0; i < n; ++i) {
    double acc = b_[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) acc += a_(i, j) * e[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
}

LinearEquilibrium linear_equilibrium(const LinearModel& model) {
  const auto check = is_metzler(model.a());
  if (!check.ok)
    throw StructuralError("equilibrium classification requires the validated sign pattern");
  std::vector<double> rhs(model.b().size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -model.b()[i];
  LinearEquilibrium result;
  result.equilibrium = detail::lu_solve(model.a(), std::move(rhs));

  // A with this sign pattern is Hurwitz iff -A is a nonsingular M-matrix,
  // i.e. all leading principal minors of -A are positive.
  result.hurwitz = true;
  for (int k = 1; k <= model.a().n; ++k) {
    Matrix sub = Matrix::zero(k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) sub(i, j) = -model.a()(i, j);
    if (!(detail::lu_det(sub) > 0.0)) {
      result.hurwitz = false;
      break;
    }
  }
  result.nonnegative = in_orthant(result.equilibrium);
  return result;
}

// ---------------------------------------------------------------------------
// Ratio consensus
// ---------------------------------------------------------------------------

bool is_irreducible(const Matrix& w) {
  const int n = w.n;
  if (n == 1) return true;
  std::vector<char> reach(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      reach[static_cast<std::size_t>(i) * n + j] = (i == j || w(i, j) > 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      if (!reach[static_cast<std::size_t>(i) * n + k]) continue;
      for (int j = 0; j < n; ++j)
        if (reach[static_cast<std::size_t>(k) * n + j])
          reach[static_cast<std::size_t>(i) * n + j] = 1;
    }
  return std::all_of(reach.begin(), reach.end(), [](char c) { return c != 0; });
}

RatioConsensusModel::RatioConsensusModel(std::vector<WeightSegment> schedule,
                                         std::string id)
    : schedule_(std::move(schedule)), id_(std::move(id)) {
  if (schedule_.empty()) throw StructuralError("weight schedule is empty");
  m_ = schedule_.front().w.n;
  if (m_ < 1) throw StructuralError("weight matrix is empty");
  bool rows_positive = true, irreducible = true;
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& seg : schedule_) {
    if (seg.w.n != m_ || seg.w.a.size() != static_cast<std::size_t>(m_) * m_)
      throw StructuralError("weight matrices must all be square of the same size");
    if (!(seg.t_from > prev) && &seg != &schedule_.front())
      throw StructuralError("schedule breakpoints must be strictly increasing");
    prev = seg.t_from;
    for (int i = 0; i < m_; ++i) {
      bool row_pos = false;
      for (int j = 0; j < m_; ++j) {
        if (i == j) {
          if (seg.w(i, j) != 0.0)
            throw StructuralError("weight diagonal must be zero");
          continue;
        }
        if (seg.w(i, j) < 0.0) throw StructuralError("weights must be nonnegative");
        if (seg.w(i, j) > 0.0) row_pos = true;
      }
      if (!row_pos && m_ > 1) rows_positive = false;
    }
    if (!is_irreducible(seg.w)) irreducible = false;
  }
  classes_.add(ModelClass::GrossSubstitute).add(ModelClass::ScaleInvariant);
  if (rows_positive && m_ > 1) classes_.add(ModelClass::StrongGrossSubstitute);
  else if (m_ > 1)
    warnings_.push_back("a weight row has no positive entry; strong substitute claim dropped");
  if (irreducible) classes_.add(ModelClass::RayContracting);
  else
    warnings_.push_back("weight digraph is reducible; consensus is not guaranteed");
}

std::shared_ptr<RatioConsensusModel> RatioConsensusModel::constant(Matrix w,
                                                                   std::string id) {
  return std::make_shared<RatioConsensusModel>(
      std::vector<WeightSegment>{{0.0, std::move(w)}}, std::move(id));
}

const Matrix& RatioConsensusModel::weights_at(double t) const {
  // Last segment whose t_from <= t; the first segment covers earlier times.
  std::size_t lo = 0;
  for (std::size_t k = 1; k < schedule_.size(); ++k) {
    if (schedule_[k].t_from <= t) lo = k;
    else break;
  }
  return schedule_[lo].w;
}

void RatioConsensusModel::eval_into(double t, std::span<const double> e,
                                    std::span<double> out) const {
  const Matrix& w = weights_at(t);
  const int m = m_;
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    const double ei = e[static_cast<std::size_t>(i)];
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      const double wij = w(i, j);
      // Per-pair division keeps the field exactly zero on the ray and
      // exactly scale invariant whenever lambda*e is representable.
      if (wij != 0.0) acc += wij * (e[static_cast<std::size_t>(j)] / ei - 1.0);
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
}

// ---------------------------------------------------------------------------
// Laplacian
// ---------------------------------------------------------------------------

LaplacianModel::LaplacianModel(Matrix adjacency, std::string id)
    : adj_(std::move(adjacency)), id_(std::move(id)) {
  const int n = adj_.n;
  if (n <= 0 || adj_.a.size() != static_cast<std::size_t>(n) * n)
    throw StructuralError("adjacency matrix is not square");
  symmetric_ = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        if (adj_(i, j) != 0.0) throw StructuralError("adjacency diagonal must be zero");
        continue;
      }
      if (adj_(i, j) < 0.0) throw StructuralError("adjacency entries must be nonnegative");
      if (adj_(i, j) != adj_(j, i)) symmetric_ = false;
    }
  classes_.add(ModelClass::GrossSubstitute).add(ModelClass::BoundaryNonnegative);
  if (is_irreducible(adj_)) classes_.add(ModelClass::RayContracting);
}

void LaplacianModel::eval_into(double, std::span<const double> v,
                               std::span<double> out) const {
  const int n = adj_.n;
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      acc -= adj_(i, j) * (v[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(j)]);
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
}

// ---------------------------------------------------------------------------
// Composite
// ---------------------------------------------------------------------------

CompositeModel::CompositeModel(int vertex_count,
                               std::vector<std::pair<int, int>> coupling,
                               std::shared_ptr<const RatioConsensusModel> edge_dynamics,
                               std::string id)
    : n_(vertex_count), coupling_(std::move(coupling)),
      edge_(std::move(edge_dynamics)), id_(std::move(id)) {
  if (n_ < 1) throw StructuralError("composite system needs at least one vertex");
  std::sort(coupling_.begin(), coupling_.end());
  for (std::size_t k = 0; k < coupling_.size(); ++k) {
    const auto [tail, head] = coupling_[k];
    if (tail < 0 || tail >= n_ || head < 0 || head >= n_)
      throw StructuralError("coupling edge out of vertex range");
    if (tail == head) throw StructuralError("coupling edges must join distinct vertices");
    if (k > 0 && coupling_[k] == coupling_[k - 1])
      throw StructuralError("duplicate coupling edge; gains form an adjacency matrix");
  }
  if (edge_->dimension() != static_cast<int>(coupling_.size()))
    throw StructuralError("edge dynamics dimension must equal the number of coupling edges");
}

void CompositeModel::eval_into(double t, std::span<const double> state,
                               std::span<double> out) const {
  const int m = edge_->dimension();
  const auto v = state.first(static_cast<std::size_t>(n_));
  const auto e = state.subspan(static_cast<std::size_t>(n_), static_cast<std::size_t>(m));
  for (int i = 0; i < n_; ++i) out[static_cast<std::size_t>(i)] = 0.0;
  for (int k = 0; k < m; ++k) {
    const auto [tail, head] = coupling_[static_cast<std::size_t>(k)];
    // density k gates the pull of v_tail on v_head
    out[static_cast<std::size_t>(head)] -=
        e[static_cast<std::size_t>(k)] *
        (v[static_cast<std::size_t>(head)] - v[static_cast<std::size_t>(tail)]);
  }
  edge_->eval_into(t, e, out.subspan(static_cast<std::size_t>(n_), static_cast<std::size_t>(m)));
}

// ---------------------------------------------------------------------------
// Epsilon shift
// ---------------------------------------------------------------------------

namespace {

class EpsilonShiftModel : public ExcessDemandModel {
 public:
  EpsilonShiftModel(ModelPtr base, double eps) : base_(std::move(base)), eps_(eps) {}

  int dimension() const override { return base_->dimension(); }
  Domain domain() const override { return base_->domain(); }
  std::pair<int, int> cone_block() const override { return base_->cone_block(); }
  std::string id() const override {
    return base_->id() + "+eps=" + std::to_string(eps_);
  }
  ClassSet claimed_classes() const override {
    const ClassSet base = base_->claimed_classes();
    ClassSet s;
    // The constant shift preserves monotone coupling and boundary inflow;
    // the ray is no longer stationary, so contraction claims are dropped
    // (and scale invariance with them, conservatively).
    if (base.has(ModelClass::GrossSubstitute)) s.add(ModelClass::GrossSubstitute);
    if (base.has(ModelClass::StrongGrossSubstitute)) s.add(ModelClass::StrongGrossSubstitute);
    if (base.has(ModelClass::BoundaryNonnegative)) s.add(ModelClass::BoundaryNonnegative);
    return s;
  }
  void eval_into(double t, std::span<const double> e,
                 std::span<double> out) const override {
    base_->eval_into(t, e, out);
    for (auto& x : out) x += eps_;
  }

 private:
  ModelPtr base_;
  double eps_;
};

}  // namespace

ModelPtr add_epsilon(ModelPtr model, double eps) {
  if (!(eps > 0.0)) throw DomainError("epsilon shift must be strictly positive");
  return std::make_shared<EpsilonShiftModel>(std::move(model), eps);
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

DensityVector normalize_prices(const DensityVector& raw, int numeraire_index) {
  if (numeraire_index < 0 || numeraire_index >= static_cast<int>(raw.size()))
    throw StructuralError("numeraire index out of range");
  const double unit = raw[static_cast<std::size_t>(numeraire_index)];
  if (!(unit > 0.0)) throw DomainError("numeraire must be strictly positive");
  DensityVector out;
  out.reserve(raw.size() - 1);
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (static_cast<int>(i) != numeraire_index) out.push_back(raw[i] / unit);
  return out;
}

}  // namespace rayflow

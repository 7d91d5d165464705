#include "stratwave/group_model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <json.hpp>
#include <numbers>
#include <random>
#include <sstream>

#include "stratwave/errors.hpp"

namespace stratwave {

namespace {

using Vec = std::vector<double>;

// Cayley-Dickson product on R^n, n a power of two: (a,b)(c,d) = (ac - conj(d) b, d a + b conj(c)).
Vec cd_conj(const Vec& x) {
  Vec out(x.size());
  out[0] = x[0];
  for (std::size_t i = 1; i < x.size(); ++i) out[i] = -x[i];
  return out;
}

Vec cd_mul(const Vec& x, const Vec& y) {
  std::size_t n = x.size();
  if (n == 1) return {x[0] * y[0]};
  std::size_t h = n / 2;
  Vec a(x.begin(), x.begin() + h), b(x.begin() + h, x.end());
  Vec c(y.begin(), y.begin() + h), d(y.begin() + h, y.end());
  Vec ac = cd_mul(a, c), db = cd_mul(cd_conj(d), b), da = cd_mul(d, a), bc = cd_mul(b, cd_conj(c));
  Vec out(n);
  for (std::size_t i = 0; i < h; ++i) {
    out[i] = ac[i] - db[i];
    out[h + i] = da[i] + bc[i];
  }
  return out;
}

// Left multiplication by the imaginary unit e_a on R^n.
Eigen::MatrixXd left_unit(int n, int a) {
  Eigen::MatrixXd L(n, n);
  Vec ea(n, 0.0);
  ea[a] = 1.0;
  for (int col = 0; col < n; ++col) {
    Vec ec(n, 0.0);
    ec[col] = 1.0;
    Vec prod = cd_mul(ea, ec);
    for (int row = 0; row < n; ++row) L(row, col) = prod[row];
  }
  return L;
}

// P from standard basis vectors, Q = J^T P, for J orthogonal with J^2 = -1.
Eigen::MatrixXd symplectic_frame(const Eigen::MatrixXd& J) {
  const int n = static_cast<int>(J.rows());
  const int pairs = n / 2;
  Eigen::MatrixXd P(n, pairs), Q(n, pairs);
  std::vector<bool> used(n, false);
  for (int j = 0; j < pairs; ++j) {
    int best = -1;
    double best_norm = -1.0;
    Eigen::VectorXd best_vec;
    for (int c = 0; c < n; ++c) {
      if (used[c]) continue;
      Eigen::VectorXd v = Eigen::VectorXd::Unit(n, c);
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i < j; ++i) {
          v -= P.col(i).dot(v) * P.col(i);
          v -= Q.col(i).dot(v) * Q.col(i);
        }
      }
      double nv = v.norm();
      if (nv > best_norm + 1e-12) {
        best_norm = nv;
        best = c;
        best_vec = v;
      }
    }
    used[best] = true;
    P.col(j) = best_vec / best_norm;
    Eigen::VectorXd q = J.transpose() * P.col(j);
    for (int i = 0; i < j; ++i) {
      q -= P.col(i).dot(q) * P.col(i);
      q -= Q.col(i).dot(q) * Q.col(i);
    }
    q -= P.col(j).dot(q) * P.col(j);
    Q.col(j) = q.normalized();
  }
  Eigen::MatrixXd F(n, n);
  F << P, Q;
  return F;
}

// Anticommuting skew orthogonal m x m matrices U^(1..p) with U^(1) = [[0, I], [-I, 0]].
std::vector<Eigen::MatrixXd> clifford_family(int m, int p) {
  int base = p == 1 ? 2 : (p <= 3 ? 4 : 8);
  int copies = m / base;
  std::vector<Eigen::MatrixXd> U;
  for (int a = 1; a <= p; ++a) {
    Eigen::MatrixXd L = left_unit(base, a);
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(m, m);
    for (int c = 0; c < copies; ++c) full.block(c * base, c * base, base, base) = L;
    U.push_back(full);
  }
  Eigen::MatrixXd F = symplectic_frame(U[0]);
  for (auto& u : U) {
    Eigen::MatrixXd v = F.transpose() * u * F;
    u = v;
  }
  return U;
}

double block_norm(std::span<const double> lambda, const SpectralFactor& f) {
  double s = 0.0;
  for (int l = 0; l < f.center_dim; ++l) s += lambda[f.center_offset + l] * lambda[f.center_offset + l];
  return std::sqrt(s);
}

std::string join_params(const std::vector<int>& params) {
  std::ostringstream os;
  for (std::size_t i = 0; i < params.size(); ++i) os << (i ? "," : "") << params[i];
  return os.str();
}

std::vector<double> numeric_eta(const GroupSpec& spec, std::span<const double> lambda) {
  const int n = spec.dim_v();
  Eigen::MatrixXd B = b_form(spec, lambda);
  Eigen::MatrixXcd H = std::complex<double>(0.0, 1.0) * B.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = solver.eigenvalues();
  double smax = ev.cwiseAbs().maxCoeff();
  double tol = 1e-10 * smax;
  int zeros = 0;
  std::vector<double> pos;
  for (int i = 0; i < n; ++i) {
    if (smax == 0.0 || std::abs(ev[i]) <= tol) {
      ++zeros;
    } else if (ev[i] > 0.0) {
      pos.push_back(ev[i]);
    }
  }
  if (zeros > spec.k()) throw DegenerateLambda("B(lambda) has " + std::to_string(zeros) + " zero singular values, radical index is " + std::to_string(spec.k()));
  if (zeros < spec.k() || static_cast<int>(pos.size()) != spec.d())
    throw CatalogError("structure tensor inconsistent with d=" + std::to_string(spec.d()) + ", k=" + std::to_string(spec.k()));
  std::sort(pos.begin(), pos.end());
  return pos;
}

}  // namespace

void GroupSpec::validate() const {
  if (p_ < 1 || d_ < 0 || k_ < 0 || dim_v() < 1) throw CatalogError("invalid dimensions");
  const int n = dim_v();
  if (static_cast<int>(tensor_.size()) != n * n * p_) throw CatalogError("structure tensor has wrong size");
  for (double v : tensor_)
    if (!std::isfinite(v)) throw CatalogError("structure tensor has non-finite entries");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < p_; ++l)
        if (structure(i, j, l) != -structure(j, i, l)) throw CatalogError("structure tensor is not antisymmetric");
}

void GroupSpec::compute_unit_bounds() {
  unit_eta_min_.assign(d_, 0.0);
  unit_eta_max_.assign(d_, 0.0);
  if (eta_mode_ == EtaMode::ClosedForm || !factors_.empty()) {
    int j = 0;
    for (const auto& f : factors_) {
      for (int i = 0; i < f.pair_count; ++i, ++j) {
        unit_eta_min_[j] = factors_.size() == 1 ? f.scale : 0.0;
        unit_eta_max_[j] = f.scale;
      }
    }
    if (eta_mode_ == EtaMode::Numeric) {
      // Ascending order mixes factors; bounds become the envelope.
      double lo = *std::min_element(unit_eta_min_.begin(), unit_eta_min_.end());
      double hi = *std::max_element(unit_eta_max_.begin(), unit_eta_max_.end());
      unit_eta_min_.assign(d_, lo);
      unit_eta_max_.assign(d_, hi);
    }
    return;
  }
  std::vector<std::vector<double>> dirs;
  if (p_ == 1) {
    dirs = {{1.0}, {-1.0}};
  } else if (p_ == 2) {
    for (int i = 0; i < 720; ++i) {
      double a = 2.0 * std::numbers::pi * i / 720.0;
      dirs.push_back({std::cos(a), std::sin(a)});
    }
  } else if (p_ == 3) {
    const int count = 2000;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      double z = 1.0 - (2.0 * i + 1.0) / count;
      double r = std::sqrt(1.0 - z * z);
      dirs.push_back({r * std::cos(golden * i), r * std::sin(golden * i), z});
    }
  } else {
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> normal;
    for (int i = 0; i < 4000; ++i) {
      std::vector<double> v(p_);
      double s = 0.0;
      for (auto& x : v) {
        x = normal(rng);
        s += x * x;
      }
      for (auto& x : v) x /= std::sqrt(s);
      dirs.push_back(v);
    }
  }
  unit_eta_min_.assign(d_, std::numeric_limits<double>::infinity());
  for (const auto& dir : dirs) {
    try {
      auto e = numeric_eta(*this, dir);
      for (int j = 0; j < d_; ++j) {
        unit_eta_min_[j] = std::min(unit_eta_min_[j], e[j]);
        unit_eta_max_[j] = std::max(unit_eta_max_[j], e[j]);
      }
    } catch (const DegenerateLambda&) {
      unit_eta_min_.assign(d_, 0.0);
    }
  }
}

GroupSpec GroupSpec::from_structure(std::string name, int p, int d, int k, std::vector<double> tensor) {
  GroupSpec spec;
  spec.name_ = std::move(name);
  spec.p_ = p;
  spec.d_ = d;
  spec.k_ = k;
  spec.tensor_ = std::move(tensor);
  spec.eta_mode_ = EtaMode::Numeric;
  spec.frame_mode_ = FrameMode::CenterOnly;
  spec.validate();
  spec.compute_unit_bounds();
  return spec;
}

GroupSpec GroupSpec::with_eta_mode(EtaMode mode) const {
  if (mode == EtaMode::ClosedForm && factors_.empty()) throw CatalogError("closed-form eta needs a catalog group");
  GroupSpec out = *this;
  out.eta_mode_ = mode;
  out.compute_unit_bounds();
  return out;
}

GroupElement GroupElement::identity(const GroupSpec& spec) {
  return GroupElement{Vec(spec.d(), 0.0), Vec(spec.d(), 0.0), Vec(spec.k(), 0.0), Vec(spec.p(), 0.0)};
}

GroupElement GroupElement::from_layers(const GroupSpec& spec, std::span<const double> v, std::span<const double> z) {
  if (static_cast<int>(v.size()) != spec.dim_v() || static_cast<int>(z.size()) != spec.p())
    throw std::invalid_argument("GroupElement: coordinate lengths do not match the group");
  const int d = spec.d();
  GroupElement x;
  x.P.assign(v.begin(), v.begin() + d);
  x.Q.assign(v.begin() + d, v.begin() + 2 * d);
  x.R.assign(v.begin() + 2 * d, v.end());
  x.Z.assign(z.begin(), z.end());
  return x;
}

std::vector<double> GroupElement::first_layer() const {
  Vec v = P;
  v.insert(v.end(), Q.begin(), Q.end());
  v.insert(v.end(), R.begin(), R.end());
  return v;
}

GroupSpec catalog(const std::string& kind, const std::vector<int>& params) {
  auto need = [&](std::size_t count) {
    if (params.size() != count)
      throw CatalogError(kind + " expects " + std::to_string(count) + " parameters");
    for (int v : params)
      if (v < 0) throw CatalogError(kind + ": parameters must be non-negative");
  };
  struct Block {
    int m, p;
    double scale;
    bool heisenberg;
  };
  auto htype_ok = [](int m, int p) {
    if (m < 2 || m % 2 != 0 || p < 1 || p > 7) return false;
    if (p == 1) return true;
    if (p <= 3) return m % 4 == 0;
    return m % 8 == 0;
  };

  std::vector<Block> blocks;
  int radical = 0;
  FrameMode frame = FrameMode::Explicit;
  if (kind == "heisenberg") {
    need(1);
    if (params[0] < 1) throw CatalogError("heisenberg: d must be positive");
    blocks.push_back({2 * params[0], 1, 4.0, true});
  } else if (kind == "htype") {
    need(2);
    if (!htype_ok(params[0], params[1]))
      throw CatalogError("htype: inadmissible (m,p) = (" + join_params(params) + ")");
    blocks.push_back({params[0], params[1], 1.0, false});
  } else if (kind == "diamond") {
    need(2);
    int k = params[0], d = params[1];
    if (d < 1 || k > d) throw CatalogError("diamond: need d >= 1 and 0 <= k <= d");
    blocks.push_back({2 * d, 1, 4.0, true});
    radical = k;
    frame = FrameMode::CenterOnly;
  } else if (kind == "tensor_heisenberg") {
    need(2);
    if (params[0] < 1 || params[1] < 1) throw CatalogError("tensor_heisenberg: d1, d2 must be positive");
    blocks.push_back({2 * params[0], 1, 4.0, true});
    blocks.push_back({2 * params[1], 1, 4.0, true});
  } else if (kind == "tensor_htype") {
    need(4);
    if (!htype_ok(params[0], params[1]) || !htype_ok(params[2], params[3]))
      throw CatalogError("tensor_htype: inadmissible parameters (" + join_params(params) + ")");
    blocks.push_back({params[0], params[1], 1.0, false});
    blocks.push_back({params[2], params[3], 1.0, false});
  } else {
    throw CatalogError("unknown catalog kind '" + kind + "'");
  }

  GroupSpec spec;
  spec.name_ = kind + ":" + join_params(params);
  spec.catalog_ = CatalogEntry{kind, params};
  int d = 0, p = 0;
  for (const auto& b : blocks) {
    d += b.m / 2;
    p += b.p;
  }
  spec.p_ = p;
  spec.d_ = d;
  spec.k_ = radical;
  spec.eta_mode_ = EtaMode::ClosedForm;
  spec.frame_mode_ = frame;
  const int n = 2 * d + radical;
  spec.tensor_.assign(static_cast<std::size_t>(n) * n * p, 0.0);
  auto set = [&](int i, int j, int l, double v) {
    spec.tensor_[(i * n + j) * p + l] = v;
    spec.tensor_[(j * n + i) * p + l] = -v;
  };
  // First-layer layout: P of every block, then Q of every block, then R.
  int pair_offset = 0, center_offset = 0;
  for (const auto& b : blocks) {
    const int pairs = b.m / 2;
    auto index = [&](int local) {
      return local < pairs ? pair_offset + local : d + pair_offset + (local - pairs);
    };
    if (b.heisenberg) {
      // [X_j, Y_j] = 4 Z so that B(1)(X_j, Y_j) = 4 = eta.
      for (int j = 0; j < pairs; ++j) set(index(j), index(pairs + j), center_offset, 4.0);
    } else {
      auto U = clifford_family(b.m, b.p);
      for (int l = 0; l < b.p; ++l)
        for (int r = 0; r < b.m; ++r)
          for (int c = r + 1; c < b.m; ++c) {
            double v = U[l](r, c);
            if (std::abs(v) < 1e-14) v = 0.0;
            if (v != 0.0) set(index(r), index(c), center_offset + l, std::round(v));
          }
    }
    spec.factors_.push_back(SpectralFactor{center_offset, b.p, pair_offset, pairs, b.scale});
    pair_offset += pairs;
    center_offset += b.p;
  }
  spec.validate();
  spec.compute_unit_bounds();
  return spec;
}

GroupSpec catalog_from_string(const std::string& text) {
  auto colon = text.find(':');
  std::string kind = text.substr(0, colon);
  std::vector<int> params;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        params.push_back(std::stoi(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw CatalogError("bad group parameter '" + item + "' in '" + text + "'");
      }
    }
  }
  return catalog(kind, params);
}

Eigen::MatrixXd b_form(const GroupSpec& spec, std::span<const double> lambda) {
  if (static_cast<int>(lambda.size()) != spec.p()) throw std::invalid_argument("b_form: lambda has wrong length");
  const int n = spec.dim_v();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = 0.0;
      for (int l = 0; l < spec.p(); ++l) v += lambda[l] * spec.structure(i, j, l);
      B(i, j) = v;
      B(j, i) = -v;
    }
  return B;
}

std::vector<double> eta(const GroupSpec& spec, std::span<const double> lambda) {
  if (static_cast<int>(lambda.size()) != spec.p()) throw std::invalid_argument("eta: lambda has wrong length");
  if (spec.eta_mode() == EtaMode::Numeric) return numeric_eta(spec, lambda);
  std::vector<double> out;
  out.reserve(spec.d());
  double biggest = 0.0;
  for (const auto& f : spec.factors()) biggest = std::max(biggest, block_norm(lambda, f));
  for (const auto& f : spec.factors()) {
    double r = block_norm(lambda, f);
    if (r <= 1e-10 * biggest || r == 0.0) throw DegenerateLambda("lambda lies outside the generic set");
    for (int j = 0; j < f.pair_count; ++j) out.push_back(f.scale * r);
  }
  return out;
}

double pfaffian(const GroupSpec& spec, std::span<const double> lambda) {
  double prod = 1.0;
  for (double e : eta(spec, lambda)) prod *= e;
  return prod;
}

Eigen::MatrixXd frame(const GroupSpec& spec, std::span<const double> lambda) {
  if (spec.frame_mode() != FrameMode::Explicit) throw FrameUnavailable(spec.name() + " has no explicit frame");
  const int n = spec.dim_v(), d = spec.d();
  Eigen::MatrixXd B = b_form(spec, lambda);
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(n, n);
  for (const auto& f : spec.factors()) {
    double r = block_norm(lambda, f);
    if (r == 0.0) throw DegenerateLambda("lambda lies outside the generic set");
    const int m = 2 * f.pair_count;
    std::vector<int> idx(m);
    for (int j = 0; j < f.pair_count; ++j) {
      idx[j] = f.basis_offset + j;
      idx[f.pair_count + j] = d + f.basis_offset + j;
    }
    Eigen::MatrixXd J(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) J(a, b) = B(idx[a], idx[b]) / (f.scale * r);
    Eigen::MatrixXd local = symplectic_frame(J);
    for (int j = 0; j < f.pair_count; ++j)
      for (int a = 0; a < m; ++a) {
        F(idx[a], f.basis_offset + j) = local(a, j);
        F(idx[a], d + f.basis_offset + j) = local(a, f.pair_count + j);
      }
  }
  for (int r = 2 * d; r < n; ++r) F(r, r) = 1.0;
  return F;
}

GroupElement group_product(const GroupSpec& spec, const GroupElement& x, const GroupElement& y) {
  Vec vx = x.first_layer(), vy = y.first_layer();
  const int n = spec.dim_v(), p = spec.p();
  if (static_cast<int>(vx.size()) != n || static_cast<int>(vy.size()) != n || static_cast<int>(x.Z.size()) != p ||
      static_cast<int>(y.Z.size()) != p)
    throw std::invalid_argument("group_product: coordinate lengths do not match the group");
  Vec v(n), z(p);
  for (int i = 0; i < n; ++i) v[i] = vx[i] + vy[i];
  for (int l = 0; l < p; ++l) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      if (vx[i] == 0.0) continue;
      for (int j = 0; j < n; ++j) s += vx[i] * vy[j] * spec.structure(i, j, l);
    }
    z[l] = x.Z[l] + y.Z[l] + 0.5 * s;
  }
  return GroupElement::from_layers(spec, v, z);
}

GroupElement group_inverse(const GroupElement& x) {
  GroupElement y = x;
  for (auto* part : {&y.P, &y.Q, &y.R, &y.Z})
    for (auto& c : *part) c = -c;
  return y;
}

GroupElement dilate(const GroupSpec& spec, double t, const GroupElement& x) {
  if (!(t > 0.0)) throw std::invalid_argument("dilate: t must be positive");
  (void)spec;
  GroupElement y = x;
  for (auto* part : {&y.P, &y.Q, &y.R})
    for (auto& c : *part) c *= t;
  for (auto& c : y.Z) c *= t * t;
  return y;
}

int homogeneous_dimension(const GroupSpec& spec) { return spec.homogeneous_dimension(); }

std::string to_json(const GroupSpec& spec) {
  nlohmann::ordered_json j;
  j["name"] = spec.name();
  j["p"] = spec.p();
  j["d"] = spec.d();
  j["k"] = spec.k();
  j["dim_v"] = spec.dim_v();
  j["eta_mode"] = spec.eta_mode() == EtaMode::ClosedForm ? "CLOSED_FORM" : "NUMERIC";
  j["frame_mode"] = spec.frame_mode() == FrameMode::Explicit ? "EXPLICIT" : "CENTER_ONLY";
  nlohmann::ordered_json triplets = nlohmann::ordered_json::array();
  const int n = spec.dim_v();
  for (int i = 0; i < n; ++i)
    for (int jj = i + 1; jj < n; ++jj)
      for (int l = 0; l < spec.p(); ++l)
        if (double v = spec.structure(i, jj, l); v != 0.0) triplets.push_back({i, jj, l, v});
  j["structure_tensor"] = triplets;
  if (spec.is_catalog()) j["catalog"] = {{"kind", spec.catalog_entry().kind}, {"params", spec.catalog_entry().params}};
  return j.dump(2);
}

GroupSpec group_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    int p = j.at("p"), d = j.at("d"), k = j.at("k");
    std::string name = j.value("name", "custom");
    const int n = 2 * d + k;
    if (p < 1 || d < 0 || k < 0 || n < 1) throw CatalogError("invalid dimensions in group document");
    std::vector<double> tensor(static_cast<std::size_t>(n) * n * p, 0.0);
    for (const auto& t : j.at("structure_tensor")) {
      int a = t.at(0), b = t.at(1), l = t.at(2);
      double v = t.at(3);
      if (a < 0 || b < 0 || l < 0 || a >= n || b >= n || l >= p || a == b)
        throw CatalogError("structure tensor entry out of range");
      tensor[(a * n + b) * p + l] = v;
      tensor[(b * n + a) * p + l] = -v;
    }
    std::string mode = j.value("eta_mode", "NUMERIC");
    if (j.contains("catalog")) {
      GroupSpec spec = catalog(j["catalog"].at("kind").get<std::string>(), j["catalog"].at("params").get<std::vector<int>>());
      if (spec.p() != p || spec.d() != d || spec.k() != k || spec.structure_tensor() != tensor)
        throw CatalogError("group document does not match its catalog entry");
      return mode == "NUMERIC" ? spec.with_eta_mode(EtaMode::Numeric) : spec;
    }
    if (mode == "CLOSED_FORM") throw CatalogError("CLOSED_FORM eta requires a catalog entry");
    return GroupSpec::from_structure(name, p, d, k, std::move(tensor));
  } catch (const nlohmann::json::exception& e) {
    throw CatalogError(std::string("malformed group document: ") + e.what());
  }
}

}  // namespace stratwave

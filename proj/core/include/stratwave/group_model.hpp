#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace stratwave {

enum class EtaMode { ClosedForm, Numeric };
enum class FrameMode { Explicit, CenterOnly };

// A block of a catalog group on which every eta_j equals scale * |lambda_block|.
// Center coordinates [center_offset, center_offset + center_dim) and first-layer
// coordinates [basis_offset, basis_offset + 2 * pair_count) belong to the block.
struct SpectralFactor {
  int center_offset = 0;
  int center_dim = 0;
  int basis_offset = 0;
  int pair_count = 0;
  double scale = 1.0;
};

struct CatalogEntry {
  std::string kind;
  std::vector<int> params;
};

class GroupSpec {
 public:
  // General group given only through its structure tensor c[i][j][l], stored
  // flat with index (i * dim_v + j) * p + l. eta is computed numerically and
  // kernels are restricted to P = Q = 0.
  static GroupSpec from_structure(std::string name, int p, int d, int k, std::vector<double> tensor);

  const std::string& name() const { return name_; }
  int p() const { return p_; }
  int d() const { return d_; }
  int k() const { return k_; }
  int dim_v() const { return 2 * d_ + k_; }
  int dimension() const { return dim_v() + p_; }
  int homogeneous_dimension() const { return dim_v() + 2 * p_; }
  EtaMode eta_mode() const { return eta_mode_; }
  FrameMode frame_mode() const { return frame_mode_; }
  double structure(int i, int j, int l) const { return tensor_[(i * dim_v() + j) * p_ + l]; }
  const std::vector<double>& structure_tensor() const { return tensor_; }

  // Catalog groups only; empty for numeric groups.
  const std::vector<SpectralFactor>& factors() const { return factors_; }
  const CatalogEntry& catalog_entry() const { return catalog_; }
  bool is_catalog() const { return !catalog_.kind.empty(); }

  // Bounds of eta_j over the unit sphere of the center, per j in ascending order.
  // Exact for catalog groups, sampled for numeric ones.
  const std::vector<double>& unit_eta_min() const { return unit_eta_min_; }
  const std::vector<double>& unit_eta_max() const { return unit_eta_max_; }

  // Copy with eta computed from the eigen-decomposition; the frame mode and
  // catalog metadata are kept.
  GroupSpec with_eta_mode(EtaMode mode) const;

 private:
  friend GroupSpec catalog(const std::string& kind, const std::vector<int>& params);
  GroupSpec() = default;
  void validate() const;
  void compute_unit_bounds();

  std::string name_;
  int p_ = 0, d_ = 0, k_ = 0;
  std::vector<double> tensor_;
  EtaMode eta_mode_ = EtaMode::Numeric;
  FrameMode frame_mode_ = FrameMode::CenterOnly;
  std::vector<SpectralFactor> factors_;
  CatalogEntry catalog_;
  std::vector<double> unit_eta_min_, unit_eta_max_;
};

// Exponential coordinates X = (P, Q, R, Z); the first layer is P, Q, R
// concatenated in that order.
struct GroupElement {
  std::vector<double> P, Q, R, Z;

  static GroupElement identity(const GroupSpec& spec);
  static GroupElement from_layers(const GroupSpec& spec, std::span<const double> v, std::span<const double> z);
  std::vector<double> first_layer() const;
};

// Kinds: heisenberg {d}, htype {m, p}, diamond {k, d}, tensor_heisenberg {d1, d2},
// tensor_htype {m1, p1, m2, p2}.
GroupSpec catalog(const std::string& kind, const std::vector<int>& params);
// "heisenberg:2", "htype:4,3", "diamond:1,1", ...
GroupSpec catalog_from_string(const std::string& text);

Eigen::MatrixXd b_form(const GroupSpec& spec, std::span<const double> lambda);
// Closed form: factor order. Numeric: ascending.
std::vector<double> eta(const GroupSpec& spec, std::span<const double> lambda);
double pfaffian(const GroupSpec& spec, std::span<const double> lambda);

// Orthonormal basis of the first layer whose columns are P_1..P_d, Q_1..Q_d, R,
// with B(lambda)(P_j, Q_j) = eta_j(lambda). Explicit-frame groups only.
Eigen::MatrixXd frame(const GroupSpec& spec, std::span<const double> lambda);

GroupElement group_product(const GroupSpec& spec, const GroupElement& x, const GroupElement& y);
GroupElement group_inverse(const GroupElement& x);
GroupElement dilate(const GroupSpec& spec, double t, const GroupElement& x);
int homogeneous_dimension(const GroupSpec& spec);

std::string to_json(const GroupSpec& spec);
GroupSpec group_from_json(const std::string& text);

}  // namespace stratwave

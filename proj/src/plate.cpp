#include "cmutsim/plate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "cmutsim/constants.hpp"
#include "cmutsim/errors.hpp"

namespace cmutsim {

double flexural_rigidity(const Material& m, double thickness) {
  if (!(thickness > 0.0)) throw DomainError("flexural_rigidity: thickness must be > 0");
  double t3 = thickness * thickness * thickness;
  return m.youngs_modulus * t3 / (12.0 * (1.0 - m.poissons_ratio * m.poissons_ratio));
}

double areal_density(const CellGeometry& g, const Material& membrane, MassLoading loading) {
  double rho_t = membrane.density * g.membrane_thickness;
  if (loading == MassLoading::TopElectrode) {
    static const double al_density = MaterialDB::builtin().at("Al").density;
    rho_t += al_density * g.top_electrode_thickness;
  }
  return rho_t;
}

namespace {

void validate_config(const PlateConfig& cfg) {
  if (cfg.radial_nodes < 50) {
    std::ostringstream os;
    os << "plate config: radial_nodes = " << cfg.radial_nodes << " must be >= 50";
    throw ValidationError(os.str());
  }
  if (!(cfg.tension >= 0.0)) {
    std::ostringstream os;
    os << "plate config: tension = " << cfg.tension << " must be >= 0";
    throw ValidationError(os.str());
  }
}

// Characteristic function of the clamped plate, J_n I_n' - I_n J_n',
// normalized by I_n (positive for x > 0) to keep magnitudes bounded.
double clamped_char(int n, double x) {
  double jn = std::cyl_bessel_j(n, x);
  double in = std::cyl_bessel_i(n, x);
  double jp, ip;
  if (n == 0) {
    jp = -std::cyl_bessel_j(1, x);
    ip = std::cyl_bessel_i(1, x);
  } else {
    jp = 0.5 * (std::cyl_bessel_j(n - 1, x) - std::cyl_bessel_j(n + 1, x));
    ip = 0.5 * (std::cyl_bessel_i(n - 1, x) + std::cyl_bessel_i(n + 1, x));
  }
  return jn * (ip / in) - jp;
}

}  // namespace

double clamped_plate_lambda(int n, int m) {
  if (n < 0 || m < 1) throw DomainError("clamped_plate_lambda: need n >= 0, m >= 1");
  // Bracket successive sign changes on a fine scan, then bisect.
  const double step = 0.02;
  double x = 1.0 + 0.5 * n;
  double prev = clamped_char(n, x);
  int found = 0;
  for (int guard = 0; guard < 40000; ++guard) {
    double xn = x + step;
    double cur = clamped_char(n, xn);
    if (prev == 0.0 || prev * cur < 0.0) {
      ++found;
      if (found == m) {
        double lo = x, hi = xn, flo = prev;
        for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
          double mid = 0.5 * (lo + hi);
          double fm = clamped_char(n, mid);
          if (flo * fm <= 0.0) {
            hi = mid;
          } else {
            lo = mid;
            flo = fm;
          }
        }
        return 0.5 * (lo + hi);
      }
    }
    x = xn;
    prev = cur;
  }
  throw SolverError("clamped_plate_lambda: root not bracketed");
}

double clamped_plate_lambda_sq(int n, int m) {
  double l = clamped_plate_lambda(n, m);
  return l * l;
}

// ---------------------------------------------------------------------------
// Finite-difference radial operator
// ---------------------------------------------------------------------------

struct RadialPlateOperator::Impl {
  int n = 0;
  int N = 0;          // last grid index; radial_nodes - 1
  int i0 = 0;         // first unknown node (1 for n >= 1: regularity w(0)=0)
  double h = 0.0;
  Eigen::VectorXd radii;
  Eigen::SparseMatrix<double> K;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool factorized = false;

  // Laplacian stencil of azimuthal order n at node i, as (node, coeff)
  // triples over {i-1, i, i+1}. Node 0 uses the symmetry limit for n = 0;
  // for n >= 1 regularity forces both w and its Laplacian to vanish there.
  // Node N uses the clamped-edge ghost reflection.
  std::vector<std::pair<int, double>> lap_row(int i) const {
    std::vector<std::pair<int, double>> row;
    if (i == 0) {
      if (n >= 1) return row;
      row = {{0, -4.0 / (h * h)}, {1, 4.0 / (h * h)}};
    } else if (i == N) {
      // v_N = (w_{N-1} - 2 w_N + w_{N+1})/h^2 with w_N = 0, ghost
      // w_{N+1} = w_{N-1} from the zero-slope clamp
      row = {{N - 1, 2.0 / (h * h)}};
    } else {
      double r = radii[i];
      row = {{i - 1, 1.0 / (h * h) - 1.0 / (2.0 * h * r)},
             {i, -2.0 / (h * h) - double(n) * double(n) / (r * r)},
             {i + 1, 1.0 / (h * h) + 1.0 / (2.0 * h * r)}};
    }
    return row;
  }

  int col_of(int node) const {
    if (node == N) return -1;             // clamped, w = 0
    if (n >= 1 && node == 0) return -1;   // regularity, w = 0
    return node - i0;
  }
};

RadialPlateOperator::RadialPlateOperator(int azimuthal_order, double radius, int radial_nodes,
                                         double rigidity, double tension)
    : impl_(std::make_unique<Impl>()) {
  if (azimuthal_order < 0) throw DomainError("radial operator: azimuthal order must be >= 0");
  if (radial_nodes < 3) throw DomainError("radial operator: need at least 3 nodes");
  if (!(radius > 0.0)) throw DomainError("radial operator: radius must be > 0");
  Impl& d = *impl_;
  d.n = azimuthal_order;
  d.N = radial_nodes - 1;
  d.i0 = (d.n == 0) ? 0 : 1;
  d.h = radius / d.N;
  d.radii = Eigen::VectorXd::LinSpaced(radial_nodes, 0.0, radius);

  const int n_unknowns = d.N - d.i0;
  // K = D * Lap(Vmap) - T * Vmap on the unknown rows, with Vmap the
  // discrete Laplacian mapping w-unknowns to v = lap(w) at every node.
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n_unknowns) * 5);
  for (int i = d.i0; i < d.N; ++i) {
    std::vector<std::pair<int, double>> accum;  // (w column, coeff)
    auto add = [&](int colv, double c) {
      for (auto& [cc, vv] : accum)
        if (cc == colv) {
          vv += c;
          return;
        }
      accum.emplace_back(colv, c);
    };
    for (const auto& [vnode, lw] : d.lap_row(i)) {
      // D * lw * v_vnode, expanded through v's own stencil
      for (const auto& [wnode, vw] : d.lap_row(vnode)) {
        int c = d.col_of(wnode);
        if (c >= 0) add(c, rigidity * lw * vw);
      }
    }
    // - T * v_i
    for (const auto& [wnode, vw] : d.lap_row(i)) {
      int c = d.col_of(wnode);
      if (c >= 0) add(c, -tension * vw);
    }
    for (const auto& [c, val] : accum) trips.emplace_back(i - d.i0, c, val);
  }
  d.K.resize(n_unknowns, n_unknowns);
  d.K.setFromTriplets(trips.begin(), trips.end());
  d.K.makeCompressed();
}

RadialPlateOperator::~RadialPlateOperator() = default;
RadialPlateOperator::RadialPlateOperator(RadialPlateOperator&&) noexcept = default;
RadialPlateOperator& RadialPlateOperator::operator=(RadialPlateOperator&&) noexcept = default;

const Eigen::VectorXd& RadialPlateOperator::radii() const { return impl_->radii; }

Eigen::VectorXd RadialPlateOperator::solve(const Eigen::VectorXd& load) const {
  Impl& d = *impl_;
  if (load.size() != d.radii.size())
    throw DomainError("radial operator: load grid does not match the node grid");
  if (!d.factorized) {
    d.lu.compute(d.K);
    if (d.lu.info() != Eigen::Success)
      throw SolverError("radial operator: singular finite-difference system");
    d.factorized = true;
  }
  Eigen::VectorXd rhs = load.segment(d.i0, d.N - d.i0);
  Eigen::VectorXd sol = d.lu.solve(rhs);
  if (d.lu.info() != Eigen::Success)
    throw SolverError("radial operator: solve failed");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d.radii.size());
  w.segment(d.i0, d.N - d.i0) = sol;
  return w;
}

Eigen::VectorXd RadialPlateOperator::eigenvalues(int count) const {
  const Impl& d = *impl_;
  Eigen::MatrixXd dense(d.K);
  Eigen::EigenSolver<Eigen::MatrixXd> es(dense, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw SolverError("radial operator: eigen decomposition failed");
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(dense.rows()));
  for (const auto& z : es.eigenvalues())
    if (std::abs(z.imag()) <= 1e-6 * std::max(std::abs(z.real()), 1.0) && z.real() > 0.0)
      vals.push_back(z.real());
  std::sort(vals.begin(), vals.end());
  int n_out = std::min<int>(count, static_cast<int>(vals.size()));
  return Eigen::Map<Eigen::VectorXd>(vals.data(), n_out);
}

// ---------------------------------------------------------------------------

DeflectionProfile static_deflection(const CellGeometry& g, const Material& m,
                                    const Eigen::VectorXd& pressure, const PlateConfig& cfg) {
  validate_config(cfg);
  if (pressure.size() != cfg.radial_nodes)
    throw DomainError("static_deflection: pressure grid size does not match radial_nodes");
  if (!pressure.allFinite()) throw DomainError("static_deflection: pressure not finite");
  double D = flexural_rigidity(m, g.membrane_thickness);
  RadialPlateOperator op(0, g.cavity_radius, cfg.radial_nodes, D, cfg.tension);
  DeflectionProfile p;
  p.radii = op.radii();
  p.w = op.solve(pressure);
  return p;
}

namespace {

constexpr int kMaxAzimuthalOrder = 3;

std::vector<ModeResult> assemble_modes(const std::vector<ModeResult>& per_order, int n_modes) {
  std::vector<ModeResult> all;
  for (const ModeResult& mode : per_order) {
    all.push_back(mode);
    if (mode.azimuthal_order >= 1) all.push_back(mode);  // degenerate pair
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const ModeResult& a, const ModeResult& b) { return a.frequency < b.frequency; });
  if (static_cast<int>(all.size()) > n_modes) all.resize(n_modes);
  return all;
}

}  // namespace

std::vector<ModeResult> eigenfrequencies(const CellGeometry& g, const Material& m,
                                         const PlateConfig& cfg, int n_modes) {
  validate_config(cfg);
  if (n_modes < 1) throw DomainError("eigenfrequencies: n_modes must be >= 1");
  if (cfg.tension > 0.0) return eigenfrequencies_fd(g, m, cfg, n_modes);

  double D = flexural_rigidity(m, g.membrane_thickness);
  double rho_t = areal_density(g, m, cfg.mass_loading);
  double a = g.cavity_radius;
  double coeff = std::sqrt(D / rho_t) / (2.0 * kPi * a * a);

  std::vector<ModeResult> per_order;
  for (int n = 0; n <= kMaxAzimuthalOrder; ++n)
    for (int mm = 1; mm <= n_modes; ++mm) {
      double lam = clamped_plate_lambda(n, mm);
      per_order.push_back({n, mm, lam * lam * coeff, lam});
    }
  return assemble_modes(per_order, n_modes);
}

std::vector<ModeResult> eigenfrequencies_fd(const CellGeometry& g, const Material& m,
                                            const PlateConfig& cfg, int n_modes) {
  validate_config(cfg);
  if (n_modes < 1) throw DomainError("eigenfrequencies: n_modes must be >= 1");
  double D = flexural_rigidity(m, g.membrane_thickness);
  double rho_t = areal_density(g, m, cfg.mass_loading);
  double a = g.cavity_radius;

  std::vector<ModeResult> per_order;
  for (int n = 0; n <= kMaxAzimuthalOrder; ++n) {
    RadialPlateOperator op(n, a, cfg.radial_nodes, D, cfg.tension);
    Eigen::VectorXd ev = op.eigenvalues(n_modes);
    for (int mm = 0; mm < ev.size(); ++mm) {
      double omega = std::sqrt(ev[mm] / rho_t);
      double lambda_sq = omega * a * a * std::sqrt(rho_t / D);
      per_order.push_back({n, mm + 1, omega / (2.0 * kPi), std::sqrt(lambda_sq)});
    }
  }
  return assemble_modes(per_order, n_modes);
}

SweepResult frequency_sweep(const CellGeometry& g, const Material& m, const PlateConfig& cfg,
                            SweepParameter vary, const std::vector<double>& grid) {
  validate_config(cfg);
  if (grid.empty()) throw ValidationError("frequency_sweep: empty grid");
  if (vary != SweepParameter::CavityRadius && vary != SweepParameter::MembraneThickness &&
      vary != SweepParameter::GapHeight)
    throw ValidationError("frequency_sweep: vary must be a geometric parameter");

  SweepResult result;
  result.param = {to_string(vary), "um"};
  result.responses = {{"frequency", "MHz"}};
  result.metadata.push_back(std::string(kVersion));
  result.metadata.push_back("response = frequency; vary = " + to_string(vary));
  result.metadata.push_back("membrane = " + m.name);
  std::ostringstream solver;
  solver << "tension_n_per_m = " << cfg.tension << "; mass_loading = "
         << (cfg.mass_loading == MassLoading::TopElectrode ? "top-electrode" : "none")
         << "; radial_nodes = " << cfg.radial_nodes;
  result.metadata.push_back(solver.str());
  if (vary == SweepParameter::GapHeight)
    result.metadata.push_back(
        "note = the uncoupled plate does not see the gap; for the bias-dependent "
        "trend use the softened-frequency response");

  for (double value : grid) {
    CellGeometry gg = g;
    switch (vary) {
      case SweepParameter::CavityRadius:
        gg.cavity_radius = value;
        break;
      case SweepParameter::MembraneThickness:
        gg.membrane_thickness = value;
        break;
      case SweepParameter::GapHeight:
        gg.gap_height = value;
        break;
      default:
        break;
    }
    double f1 = eigenfrequencies(gg, m, cfg, 1).front().frequency;
    result.rows.push_back({value / kMicron, {f1 / 1e6}, ""});
  }
  return result;
}

}  // namespace cmutsim

#pragma once

// Reproductions of the published experiment tables t1 .. t9. Each returns a
// CSV with one row per compared quantity (computed value, published value,
// relative difference, tolerance, verdict) plus the scalars the acceptance
// checks need.

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tehom/config.hpp"
#include "tehom/csv.hpp"
#include "tehom/homogenize.hpp"
#include "tehom/recon.hpp"
#include "tehom/te/analytic.hpp"
#include "tehom/te/fourth_order.hpp"
#include "tehom/te/pencil.hpp"
#include "tehom/te/rate.hpp"

namespace tehom {

struct PaperTable {
  std::string id;
  CsvTable csv{{"item", "param", "computed", "published", "rel_diff", "tolerance", "pass", "h", "reference"}};
  bool pass = true;
  std::map<std::string, double> scalars;
  std::vector<std::pair<double, double>> eps_k;  // (epsilon, k1) of the FEM sweeps
  std::vector<std::string> notes;
  double seconds = 0.0;

  /// Adds a compared row; tolerance is relative.
  bool compare(const std::string& item, const std::string& param, double computed, double published, double tol,
               std::optional<double> h = std::nullopt, std::optional<double> reference = std::nullopt) {
    const double rel = std::abs(computed - published) / std::abs(published);
    const bool ok = std::isfinite(computed) && rel <= tol;
    pass = pass && ok;
    csv.add({item, param, computed, published, rel, tol, ok ? "pass" : "FAIL", h ? CsvTable::Cell(*h) : "",
             reference ? CsvTable::Cell(*reference) : ""});
    return ok;
  }
  /// Adds an informational row with no published counterpart.
  void info(const std::string& item, const std::string& param, double computed, std::optional<double> h = std::nullopt,
            std::optional<double> reference = std::nullopt) {
    csv.add({item, param, computed, "", "", "", "", h ? CsvTable::Cell(*h) : "",
             reference ? CsvTable::Cell(*reference) : ""});
  }
};

inline TEOptions table_te_options() {
  TEOptions te;
  te.scan_steps = 4;  // g_1 crosses zero once, so a coarse tau scan suffices
  return te;
}

struct TableOptions {
  TEOptions te = table_te_options();  // mesh policy and solver knobs for the FEM tables
  bool same_mesh_reference = true;  // also solve the homogenized medium on each mesh
  int t1_max_inverse = 7;  // eps = 1/3 .. 1/t1_max_inverse
  int t2_max_inverse = 6;  // eps = 1 .. 1/t2_max_inverse
  int t3_levels = 4;  // eps = 1, 1/2, .. 1/2^(levels-1)
  double t8_epsilon = 1.0;  // period of the checkerboard and voids media
  int cell_divisions = 64;  // homogenization cell mesh
};

inline const std::vector<std::string>& paper_table_ids() {
  static const std::vector<std::string> ids{"t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8", "t9"};
  return ids;
}

inline constexpr double kTableKTolerance = 0.02;  // FEM eigenvalues vs published
inline constexpr double kTableReconTolerance = 1e-3;  // absolute, published reconstructions
inline constexpr double kTableRatioTolerance = 1e-2;
inline constexpr double kTableRateTolerance = 0.4;  // absolute, on |p|
inline constexpr double kTableBisectionTolerance = 1e-5;  // relative, FEM inversions

namespace detail {

inline std::string eps_label(double eps) {
  const double inv = 1.0 / eps;
  if (std::abs(inv - std::round(inv)) < 1e-9 && inv > 1.5) return "1/" + std::to_string(std::lround(inv));
  return csv_number(eps);
}

/// First eigenvalue of `field` on `domain` by the solver its coefficients
/// call for, in [k_min, k_max].
inline TEResult first_te(const Domain& domain, const CoefficientField& field, double k_min, double k_max,
                         const TEOptions& opts, const TriangleMesh* mesh = nullptr) {
  const TriangleMesh m = mesh ? *mesh : mesh_for(domain, field, opts);
  TEResult r = field.isotropic_identity()
                   ? solve_fixed_point(assemble_fourth_order(m, field, opts.allow_voids, opts.void_cap,
                                                             opts.quadrature_levels),
                                       k_min, k_max, 1, opts)
                   : solve_pencil_sweep(assemble_pencil_X(m, field, opts.allow_voids, opts.quadrature_levels), k_min,
                                        k_max, 1, opts);
  r.h = m.h;
  return r;
}

inline double first_or_nan(const TEResult& r) {
  return r.eigenvalues.empty() ? std::numeric_limits<double>::quiet_NaN() : r.eigenvalues[0];
}

/// k1(eps) on its own mesh (h <= eps/8) and, optionally, the homogenized
/// medium on the same mesh.
struct EpsilonRun {
  double eps, k, h, k_ref;
};

inline std::vector<EpsilonRun> epsilon_sweep(const Domain& domain, const TensorField& a, const ScalarField& n,
                                             const CoefficientField& homogenized, const std::vector<double>& epsilons,
                                             double k_min, double k_max, const TableOptions& o) {
  std::vector<EpsilonRun> runs;
  for (double eps : epsilons) {
    const CoefficientField field = combine(a, n, eps);
    const TriangleMesh mesh = mesh_for(domain, field, o.te);
    EpsilonRun r{eps, first_or_nan(first_te(domain, field, k_min, k_max, o.te, &mesh)), mesh.h,
                 std::numeric_limits<double>::quiet_NaN()};
    if (o.same_mesh_reference) r.k_ref = first_or_nan(first_te(domain, homogenized, k_min, k_max, o.te, &mesh));
    runs.push_back(r);
  }
  return runs;
}

inline double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Disk R = 2, A = I, sincos n, eps = 1/3 .. 1/7.
inline PaperTable table_t1(const TableOptions& o = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  PaperTable t;
  t.id = "t1";
  const std::vector<double> published{2.0842, 2.0834, 2.0829, 2.0828, 2.0824};
  const double k_h_published = 2.0820;
  std::vector<double> eps;
  for (int inv = 3; inv <= o.t1_max_inverse; ++inv) eps.push_back(1.0 / inv);
  const auto homog = combine(presets::identity_tensor(), presets::scalar_constant(3.0));
  const auto runs = detail::epsilon_sweep(Domain::disk(2.0), presets::identity_tensor(), presets::scalar_sincos(), homog,
                                          eps, 2.0, 2.2, o);
  const double k_exact = roots_disk(2.0, 1.0, 3.0, 1.0, 3.0, 1).first();
  t.info("k_h", "analytic", k_exact);
  bool decreasing = true, above = true, corrected_decreasing = true, corrected_above = true;
  std::vector<double> ks, errs_corrected;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    if (i < published.size()) {
      t.compare("k1", detail::eps_label(r.eps), r.k, published[i], kTableKTolerance, r.h, r.k_ref);
    } else {
      t.info("k1", detail::eps_label(r.eps), r.k, r.h, r.k_ref);
    }
    ks.push_back(r.k);
    t.eps_k.emplace_back(r.eps, r.k);
    above = above && r.k > k_h_published;
    if (i > 0) decreasing = decreasing && r.k < runs[i - 1].k;
    if (o.same_mesh_reference) {
      const double d = r.k - r.k_ref;
      errs_corrected.push_back(d);
      corrected_above = corrected_above && d > 0.0;
      if (i > 0) corrected_decreasing = corrected_decreasing && d < runs[i - 1].k - runs[i - 1].k_ref;
    }
  }
  t.scalars["monotone_from_above"] = decreasing && above ? 1.0 : 0.0;
  t.notes.push_back(std::string("raw k1 monotone decreasing and above 2.0820: ") + (decreasing && above ? "yes" : "no"));
  if (o.same_mesh_reference) {
    t.scalars["corrected_monotone_from_above"] = corrected_decreasing && corrected_above ? 1.0 : 0.0;
    t.notes.push_back(std::string("k1 - k_h(same mesh) positive and decreasing: ") +
                      (corrected_decreasing && corrected_above ? "yes" : "no"));
    if (eps.size() >= 3) {
      // error against the homogenized eigenvalue of the same mesh
      std::vector<double> shifted;
      for (double e : errs_corrected) shifted.push_back(k_exact + e);
      const RateFit fit = fit_rate(eps, shifted, k_exact);
      t.scalars["rate_own"] = fit.p;
      t.info("rate", "own FEM mesh-corrected", fit.p);
    }
  }
  const RateFit paper_fit = fit_rate({1.0 / 3, 1.0 / 4, 1.0 / 5, 1.0 / 6, 1.0 / 7}, published, k_h_published);
  t.scalars["rate_published_values"] = paper_fit.p;
  t.info("rate", "published values", paper_fit.p);
  t.seconds = detail::elapsed(t0);
  return t;
}

/// Disk R = 2, sincos A and sincos n, eps = 1 .. 1/6.
inline PaperTable table_t2(const TableOptions& o = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  PaperTable t;
  t.id = "t2";
  const std::vector<double> published{1.0592, 1.0591, 1.0587, 1.0586, 1.0584, 1.0583};
  const double k_h_published = 1.0582;
  std::vector<double> eps;
  for (int inv = 1; inv <= o.t2_max_inverse; ++inv) eps.push_back(1.0 / inv);
  const auto homog = combine(presets::tensor_constant(0.5), presets::scalar_constant(3.0));
  const auto runs = detail::epsilon_sweep(Domain::disk(2.0), presets::tensor_sincos(), presets::scalar_sincos(), homog,
                                          eps, 1.0, 1.1, o);
  const double k_exact = roots_disk(2.0, 0.5, 3.0, 0.5, 2.0, 1).first();
  t.info("k_h", "analytic", k_exact);
  std::vector<double> shifted;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    if (i < published.size()) {
      t.compare("k1", detail::eps_label(r.eps), r.k, published[i], kTableKTolerance, r.h, r.k_ref);
    } else {
      t.info("k1", detail::eps_label(r.eps), r.k, r.h, r.k_ref);
    }
    if (o.same_mesh_reference) shifted.push_back(k_exact + (r.k - r.k_ref));
  }
  if (o.same_mesh_reference && eps.size() >= 3) {
    try {
      const RateFit fit = fit_rate(eps, shifted, k_exact);
      t.scalars["rate_own"] = fit.p;
      t.info("rate", "own FEM mesh-corrected", fit.p);
    } catch (const Error& e) {
      t.notes.push_back(std::string("own rate fit failed: ") + e.what());
    }
  }
  const RateFit paper_fit = fit_rate({1.0, 0.5, 1.0 / 3, 0.25, 0.2, 1.0 / 6}, published, k_h_published);
  t.scalars["rate_published_values"] = paper_fit.p;
  t.info("rate", "published values", paper_fit.p);
  t.seconds = detail::elapsed(t0);
  return t;
}

/// Rotated sincos A with layered n on the unit disk and on [0, 2]^2; rates
/// from successive relative errors along eps = 1, 1/2, 1/4, 1/8.
inline PaperTable table_t3(const TableOptions& o = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  PaperTable t;
  t.id = "t3";
  struct Case {
    const char* name;
    Domain domain;
    std::vector<double> published;
    double rate;
    double k_min, k_max;
  };
  const std::vector<Case> cases{{"circle", Domain::disk(1.0), {2.460, 2.453, 2.472, 2.518}, 1.32, 2.1, 2.9},
                                {"square", Domain::square(0.0, 2.0), {2.201, 2.213, 2.230, 2.273}, 0.917, 1.9, 2.6}};
  std::vector<double> eps;
  for (int l = 0; l < o.t3_levels; ++l) eps.push_back(std::ldexp(1.0, -l));
  for (const Case& c : cases) {
    std::vector<double> ks;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const CoefficientField field = combine(presets::tensor_rotated(1.0), presets::scalar_layered(), eps[i]);
      const TEResult r = detail::first_te(c.domain, field, c.k_min, c.k_max, o.te);
      const double k = detail::first_or_nan(r);
      ks.push_back(k);
      if (i < c.published.size()) {
        t.compare(std::string("k1 ") + c.name, detail::eps_label(eps[i]), k, c.published[i], kTableKTolerance, r.h);
      } else {
        t.info(std::string("k1 ") + c.name, detail::eps_label(eps[i]), k, r.h);
      }
    }
    try {
      const RateFit fit = fit_rate(eps, ks);
      const double p = std::abs(fit.p);
      t.compare(std::string("rate ") + c.name, "relative", p, c.rate, kTableRateTolerance / c.rate);
      t.scalars[std::string("rate_") + c.name] = p;
    } catch (const Error& e) {
      t.pass = false;
      t.notes.push_back(std::string(c.name) + " rate fit failed: " + e.what());
    }
  }
  t.seconds = detail::elapsed(t0);
  return t;
}

namespace detail {

inline PaperTable reconstruction_table(const std::string& id, ReconMode mode, double k_measured, double published,
                                       double exact, double tol_abs) {
  const auto t0 = std::chrono::steady_clock::now();
  PaperTable t;
  t.id = id;
  const ReconstructionReport rep = invert_disk(mode, k_measured, 1.0);
  t.compare(std::string("reconstructed ") + std::string(to_string(mode)), "k1=" + csv_number(k_measured), rep.value,
            published, tol_abs / std::abs(published));
  t.info("exact effective value", "", exact);
  t.info("residual", "", rep.residual);
  t.scalars["value"] = rep.value;
  t.seconds = elapsed(t0);
  return t;
}

}  // namespace detail

inline PaperTable table_t4() {
  return detail::reconstruction_table("t4", ReconMode::Index, 5.046, 2.5188, 2.5, kTableReconTolerance);
}
inline PaperTable table_t5() {
  return detail::reconstruction_table("t5", ReconMode::TensorScalar, 7.349, 0.4851, 0.5, kTableReconTolerance);
}
inline PaperTable table_t6() {
  return detail::reconstruction_table("t6", ReconMode::TensorScalar, 7.5499, 0.4921, std::numeric_limits<double>::quiet_NaN(), kTableReconTolerance);
}
inline PaperTable table_t7() {
  return detail::reconstruction_table("t7", ReconMode::Ratio, 2.5415, 4.788, 5.0, kTableRatioTolerance);
}

namespace detail {

/// Periodic medium vs homogenized medium on [-3, 3]^2, then the effective
/// parameter recovered from the periodic eigenvalue with the FEM forward map.
struct SquareCase {
  std::string name;
  TensorField a;
  ScalarField n;
  double published_periodic, published_homogenized;
};

inline int square_divisions(const Domain& sq, const TriangleMesh& mesh) {
  return static_cast<int>(std::lround((sq.hi - sq.lo) * std::sqrt(2.0) / mesh.h));
}

inline TEOptions square_options(const TableOptions& o) {
  TEOptions te = o.te;
  te.allow_voids = true;
  return te;
}

}  // namespace detail

/// Checkerboard on [-3, 3]^2: index only, tensor only, both.
inline PaperTable table_t8(const TableOptions& o = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  PaperTable t;
  t.id = "t8";
  const Domain sq = Domain::square(-3.0, 3.0);
  const TEOptions te = detail::square_options(o);
  const MediumSpec m;  // checkerboard phases
  const auto a_check = presets::tensor_checkerboard(m.a1, m.a2);
  const auto n_check = presets::scalar_checkerboard(m.n1, m.n2);
  const EffectiveMedium em = homogenize(combine(a_check, n_check), o.cell_divisions);
  const double a_h = 0.5 * em.a_h.trace();
  const double n_h = em.n_h;
  t.info("n_h", "cell mean", n_h);
  t.info("a_h", "cell problem", a_h);

  const std::vector<detail::SquareCase> cases{
      {"index", presets::identity_tensor(), n_check, 1.0930, 1.0757},
      {"tensor", a_check, presets::scalar_constant(1.0), 1.9027, 1.896},
      {"both", a_check, n_check, 0.7673, 0.7139}};
  const std::vector<CoefficientField> homog{
      combine(presets::identity_tensor(), presets::scalar_constant(n_h)),
      combine(presets::tensor_constant(a_h), presets::scalar_constant(1.0)),
      combine(presets::tensor_constant(a_h), presets::scalar_constant(n_h))};
  std::vector<double> periodic(3);
  for (int i = 0; i < 3; ++i) {
    const auto& c = cases[i];
    const CoefficientField field = combine(c.a, c.n, o.t8_epsilon);
    const TriangleMesh mesh = mesh_for(sq, field, te);
    const TEResult rp = detail::first_te(sq, field, 0.3, 3.0, te, &mesh);
    const TEResult rh = detail::first_te(sq, homog[i], 0.3, 3.0, te, &mesh);
    periodic[i] = detail::first_or_nan(rp);
    t.compare("k1 periodic " + c.name, "eps=" + csv_number(o.t8_epsilon), periodic[i], c.published_periodic,
              kTableKTolerance, rp.h);
    t.compare("k1 homogenized " + c.name, "", detail::first_or_nan(rh), c.published_homogenized, kTableKTolerance, rh.h);
    for (const auto& w : rp.warnings) t.notes.push_back(c.name + ": " + w);
  }
  if (std::isnan(periodic[1]) && (m.a1 == 1.0 || m.a2 == 1.0)) {
    t.notes.push_back("tensor case: cells with A = I and n = 1 touch the boundary, where the pencil is singular "
                      "for every shift; no eigenvalue is reported");
  }
  // reconstructions on the mesh of the measurement
  TEOptions inv = te;
  inv.divisions = detail::square_divisions(sq, mesh_for(sq, combine(a_check, n_check, o.t8_epsilon), te));
  if (std::isfinite(periodic[0])) {
    const auto r = invert_fem(ReconMode::Index, periodic[0], sq, inv, ContrastBranch::Below, kTableBisectionTolerance);
    t.compare("reconstructed n_h", "index", r.value, 3.4123, kTableKTolerance, std::nullopt, n_h);
  }
  if (std::isfinite(periodic[1])) {
    const auto r = invert_fem(ReconMode::TensorScalar, periodic[1], sq, inv, ContrastBranch::Below, kTableBisectionTolerance);
    t.compare("reconstructed a_h", "tensor", r.value, 0.4472, kTableKTolerance, std::nullopt, a_h);
  }
  if (std::isfinite(periodic[2])) {
    const auto r = invert_fem(ReconMode::Ratio, periodic[2], sq, inv, ContrastBranch::Below, kTableBisectionTolerance);
    t.compare("reconstructed n_h/a_h", "both", r.value, 7.4704, kTableKTolerance, std::nullopt, n_h / a_h);
    t.compare("implied a_h", "n_h / ratio", n_h / r.value, 0.4685, kTableKTolerance, std::nullopt, a_h);
  }
  t.seconds = detail::elapsed(t0);
  return t;
}

/// Periodic voids on [-3, 3]^2: index only, and tensor with index.
inline PaperTable table_t9(const TableOptions& o = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  PaperTable t;
  t.id = "t9";
  const Domain sq = Domain::square(-3.0, 3.0);
  const TEOptions te = detail::square_options(o);
  const auto a_void = presets::tensor_voids(0.5);
  const auto n_void = presets::scalar_voids(5.0);
  const EffectiveMedium em = homogenize(combine(a_void, n_void), o.cell_divisions);
  const double a_h = 0.5 * em.a_h.trace();
  const double n_h = em.n_h;
  t.info("n_h", "cell mean", n_h);
  t.info("a_h", "cell problem", a_h);

  const std::vector<detail::SquareCase> cases{{"index", presets::identity_tensor(), n_void, 0.8745, 0.8781},
                                              {"both", a_void, n_void, 0.7599, 0.7231}};
  const std::vector<CoefficientField> homog{combine(presets::identity_tensor(), presets::scalar_constant(n_h)),
                                            combine(presets::tensor_constant(a_h), presets::scalar_constant(n_h))};
  std::vector<double> periodic(2);
  TEOptions inv = te;
  for (int i = 0; i < 2; ++i) {
    const auto& c = cases[i];
    const CoefficientField field = combine(c.a, c.n, o.t8_epsilon);
    const TriangleMesh mesh = mesh_for(sq, field, te);
    inv.divisions = detail::square_divisions(sq, mesh);
    const TEResult rp = detail::first_te(sq, field, 0.3, 3.0, te, &mesh);
    const TEResult rh = detail::first_te(sq, homog[i], 0.3, 3.0, te, &mesh);
    periodic[i] = detail::first_or_nan(rp);
    t.compare("k1 periodic " + c.name, "eps=" + csv_number(o.t8_epsilon), periodic[i], c.published_periodic,
              kTableKTolerance, rp.h);
    t.compare("k1 homogenized " + c.name, "", detail::first_or_nan(rh), c.published_homogenized, kTableKTolerance, rh.h);
  }
  if (std::isfinite(periodic[0])) {
    const auto r = invert_fem(ReconMode::Index, periodic[0], sq, inv, ContrastBranch::Below, kTableBisectionTolerance);
    t.compare("reconstructed n_h", "index", r.value, 4.2678, kTableKTolerance, std::nullopt, n_h);
  }
  if (std::isfinite(periodic[1])) {
    const auto r = invert_fem(ReconMode::Ratio, periodic[1], sq, inv, ContrastBranch::Below, kTableBisectionTolerance);
    t.compare("reconstructed n_h/a_h", "both", r.value, 5.0550, kTableKTolerance, std::nullopt, n_h / a_h);
    t.compare("implied a_h", "n_h / ratio", n_h / r.value, 0.8337, kTableKTolerance, std::nullopt, a_h);
  }
  t.seconds = detail::elapsed(t0);
  return t;
}

inline PaperTable paper_table(const std::string& id, const TableOptions& o = {}) {
  if (id == "t1") return table_t1(o);
  if (id == "t2") return table_t2(o);
  if (id == "t3") return table_t3(o);
  if (id == "t4") return table_t4();
  if (id == "t5") return table_t5();
  if (id == "t6") return table_t6();
  if (id == "t7") return table_t7();
  if (id == "t8") return table_t8(o);
  if (id == "t9") return table_t9(o);
  throw Error(ErrorKind::InvalidParameter, "unsupported table id '" + id + "' (t1 .. t9)");
}

}  // namespace tehom

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

using namespace mrav;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<std::string> g_info;  // printed under the criterion line

void info(const std::string& s) { g_info.push_back(s); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool within(double x, double lo, double hi) { return x >= lo && x <= hi; }

const Mat3 kH1 = orientation_from_phi_theta(deg2rad(130), deg2rad(-58));
const Mat3 kH2 = orientation_from_phi_theta(deg2rad(90), deg2rad(0));

Outcome c1() {
  auto p = preset("dualtilt-trirotor");
  set_u_max(p, 1.0);
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = odl(p, 2048);
  const double dt = seconds_since(t0);
  return {within(r.odl, 2.97, 3.00) && dt < 10.0, fmt("odl=%.6f u_max (want [2.97, 3.00]), %.2f s single-threaded", r.odl, dt)};
}

Outcome c2() {
  auto p = preset("trirotor-radial");
  set_u_max(p, 1.0);
  const auto r = odl(p, 2048);
  return {within(r.odl, 1.645, 1.733), fmt("odl=%.6f u_max (want [1.645, 1.733])", r.odl)};
}

Outcome c3() {
  auto p = preset("dualtilt-trirotor-failed3");
  set_u_max(p, 1.0);
  const auto r = odl(p, 2048);
  info(fmt("odl / g = %.6f (weight-normalized reading, informational)", r.odl / p.gravity));
  return {within(r.odl, 0.0197, 0.0295), fmt("odl=%.6f u_max (want [0.0197, 0.0295])", r.odl)};
}

Outcome c4() {
  auto p = preset("dualtilt-trirotor-failed3");
  set_u_max(p, 1.0);
  const auto r = best_planar_lift(p, 128, 96);
  return {within(r.lift, 1.18, 1.78), fmt("planar lift=%.6f u_max in plane n=(%.3f, %.3f, %.3f) (want [1.18, 1.78])",
                                          r.lift, r.normal.x(), r.normal.y(), r.normal.z())};
}

Outcome c5() {
  const auto p = preset("dualtilt-trirotor");
  const auto grid = DirectionGrid::fibonacci(2048);
  const auto cal = calibrate_lhi(p, deg2rad(90), 0.0, 0.0215, grid);
  const auto s1 = solve_hover(cal.platform, kH1);
  if (!s1.feasible()) return {false, "no hover at H0^1"};
  const double l1 = lhi(cal.platform, s1.control, grid).lhi;
  const auto map = lhi_map(cal.platform, 5.0, grid);
  double mx = 0, mn = std::numeric_limits<double>::infinity();
  for (const auto& c : map)
    if (c.feasible) {
      mx = std::max(mx, c.lhi);
      mn = std::min(mn, c.lhi);
    }
  info(fmt("calibration scale k=%.6g (mass %.6g kg, u_rate %.6g N/s)", cal.scale, cal.platform.mass,
           cal.platform.propellers[0].u_rate_max));
  info(fmt("ratio LHI(H0^1)/LHI(H0^2)=%.4f (want 2.51 +-15%%); map range [%.5f, %.5f]", l1 / 0.0215, mn, mx));
  const bool ok = within(l1, 0.0539 * 0.85, 0.0539 * 1.15) && within(mx, 0.0545 * 0.85, 0.0545 * 1.15);
  return {ok, fmt("LHI(H0^1)=%.5f (want 0.0539 +-15%%), map max=%.5f (want 0.0545 +-15%%)", l1, mx)};
}

Outcome c6() {
  struct Row {
    std::string label;
    PlatformSpec p;
    PlatformClass want;
    int want_csh;  // -1: not part of the row
  };
  std::vector<Row> rows;
  rows.push_back({"quadrotor", preset("quadrotor"), PlatformClass::UDT, 0});
  rows.push_back({"birotor-dualtilt", preset("birotor-dualtilt"), PlatformClass::UDT, 1});
  rows.push_back({"trirotor-tail", preset("trirotor-tail"), PlatformClass::UDT, 1});
  {
    auto p = preset("trirotor-radial");
    rows.push_back({"trirotor-radial u_max=mg", p, PlatformClass::OD, 1});
    set_u_max(p, p.weight() / std::sqrt(3.0));
    rows.push_back({"trirotor-radial u_max=mg/sqrt3", p, PlatformClass::OD, 1});
  }
  {
    auto p = preset("dualtilt-trirotor");
    rows.push_back({"dualtilt-trirotor mg=u_max", p, PlatformClass::OD, 1});
    set_u_max(p, p.weight() / 3.0);
    rows.push_back({"dualtilt-trirotor mg=3u_max", p, PlatformClass::OD, 1});
  }
  {
    auto p = preset("dualtilt-trirotor-failed3");
    set_u_max(p, p.weight() / 0.0246);
    rows.push_back({"failed3 mg=0.0246u_max", p, PlatformClass::OD, -1});
  }
  bool ok = true;
  int bad = 0;
  for (const auto& r : rows) {
    const auto c = classify(r.p);
    const bool row_ok = c.cls == r.want && (r.want_csh < 0 || c.csh == (r.want_csh == 1));
    ok = ok && row_ok;
    bad += !row_ok;
    info(fmt("%-32s class=%-4s csh=%d odl/mg=%.4f %s", r.label.c_str(), to_string(c.cls), c.csh ? 1 : 0,
             c.weight > 0 ? c.odl / c.weight : 0.0, row_ok ? "ok" : "MISMATCH"));
  }
  return {ok, fmt("%zu rows, %d mismatches", rows.size(), bad)};
}

Outcome c7() {
  std::mt19937 rng(7);
  int found = 0, failures = 0, tries = 0;
  while (found < 50 && tries < 5000) {
    ++tries;
    const int n = 2 + static_cast<int>(rng() % 2);
    const auto p = oracle::random_platform(rng, n, {TiltKind::Fixed, TiltKind::RadialOnly, TiltKind::Dual});
    HoverOptions opt;
    opt.search_directions = 64;
    const HoverSolver solver(p, opt);
    if (numeric_rank(solver.reduced().moment()) < 3) continue;
    std::optional<HoverSolution> w;
    for (const auto& [d, h] : hover_direction_candidates(solver)) {
      if (h <= p.weight()) continue;
      auto s = solver.solve(rotation_aligning_to_world_z(d));
      if (s.interior()) {
        w = s;
        break;
      }
    }
    if (!w) continue;
    ++found;
    const int r = numeric_rank(fixed_allocation(p, w->control).moment());
    if (r > 2 || fixed_orientation_sustain_check(p, w->control)) ++failures;
  }
  return {found == 50 && failures == 0, fmt("%d hover-capable platforms (%d draws), %d with frozen moment rank > 2", found, tries, failures)};
}

Outcome c8() {
  std::mt19937 rng(8);
  const std::vector<std::string> names = {"dualtilt-trirotor", "trirotor-radial", "dualtilt-trirotor-failed3"};
  int failures = 0;
  for (int i = 0; i < 100; ++i) {
    const auto p = preset(names[i % names.size()]);
    const auto h = oracle::random_control(rng, p, 0.02, 0.98);
    if (!rank_equivalence_check(p, h)) ++failures;
  }
  return {failures == 0, fmt("100 interior points on FA presets, %d rank mismatches", failures)};
}

Outcome c9() {
  std::mt19937 rng(9);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const auto p = oracle::random_platform(rng, 1 + i % 6, {TiltKind::Fixed, TiltKind::RadialOnly, TiltKind::Dual});
    const auto h = oracle::random_control(rng, p, 0.0, 1.0);
    const MatX f = full_jacobian(p, h).m;
    const MatX fd = oracle::jacobian_fd(p, h);
    worst = std::max(worst, (f - fd).cwiseAbs().maxCoeff() / std::max(1.0, f.cwiseAbs().maxCoeff()));
  }
  return {worst <= 1e-6, fmt("max relative error %.3g over 100 (platform, H0) pairs (want <= 1e-6)", worst)};
}

Outcome c10() {
  const auto tri = preset("dualtilt-trirotor");
  const auto quad = preset("quadrotor");
  const double dur = 3.0, dt = 1e-3, mag = 1.5;
  auto step_at = [&](const PlatformSpec& p, const Mat3& r, double m) {
    return moment_step_experiment(p, r, Vec3::UnitX(), m, dur, dt);
  };
  const auto a1 = step_at(tri, kH1, mag), a2 = step_at(tri, kH2, mag), aq = step_at(quad, Mat3::Identity(), mag);
  const bool ca = a1.rise_time < a2.rise_time;
  const double frac = aq.early_moment_integral != 0 ? a2.early_moment_integral / aq.early_moment_integral : INFINITY;
  const bool cb = frac <= 0.10;
  const bool cc = aq.rise_time <= a1.rise_time && aq.rise_time <= a2.rise_time;
  const auto f1 = force_orientation_experiment(tri, kH1, deg2rad(5), dur, dt);
  const auto f2 = force_orientation_experiment(tri, kH2, deg2rad(5), dur, dt);
  const double ratio = f2.settle_time / f1.settle_time;
  const bool cd = ratio >= 2.0;
  info(fmt("(a) rise H0^1=%.3f s, H0^2=%.3f s: %s", a1.rise_time, a2.rise_time, ca ? "ok" : "FAIL"));
  info(fmt("(b) 50 ms moment integral H0^2/quad=%.4f (%.5f / %.5f N m s): %s", frac, a2.early_moment_integral,
           aq.early_moment_integral, cb ? "ok" : "FAIL"));
  info(fmt("(c) quad rise=%.3f s vs %.3f, %.3f s: %s", aq.rise_time, a1.rise_time, a2.rise_time, cc ? "ok" : "FAIL"));
  info(fmt("(d) settle H0^1=%.3f s, H0^2=%.3f s, ratio=%.3f: %s", f1.settle_time, f2.settle_time, ratio, cd ? "ok" : "FAIL"));
  {
    const auto b1 = step_at(tri, kH1, 0.5), b2 = step_at(tri, kH2, 0.5), bq = step_at(quad, Mat3::Identity(), 0.5);
    info(fmt("informational, 0.5 N m step: rise H0^1=%.3f, H0^2=%.3f, quad=%.3f s", b1.rise_time, b2.rise_time, bq.rise_time));
  }
  return {ca && cb && cc && cd, fmt("(a)=%d (b)=%d (c)=%d (d)=%d", ca, cb, cc, cd)};
}

Outcome c11() {
  double worst_p = 0, worst_r = 0;
  for (const auto& n : preset_names()) {
    const auto p = preset(n);
    const auto cap = can_statically_hover(p);
    if (!cap.witness) return {false, n + ": no hover witness"};
    RigidBodyState s;
    s.orientation = cap.witness->orientation;
    s.actuators = cap.witness->control;
    const VecX zero = VecX::Zero(p.dof());
    for (int i = 0; i < 1000; ++i) s = step(p, s, zero, 1e-3);
    worst_p = std::max(worst_p, s.position.norm());
    worst_r = std::max(worst_r, Eigen::AngleAxisd(cap.witness->orientation.transpose() * s.orientation).angle());
  }
  return {worst_p <= 1e-4 && worst_r <= 1e-5,
          fmt("max drift over presets after 1 s: %.3g m, %.3g rad (want <= 1e-4, 1e-5)", worst_p, worst_r)};
}

Outcome c12() {
  std::mt19937 rng(12);
  std::vector<MatX> gens;
  for (const auto& n : preset_names()) {
    const auto p = preset(n);
    const auto cap = can_statically_hover(p);
    gens.push_back(local_moment_zonotope(p, cap.witness->control).generators);
  }
  gens.push_back(MatX::Random(3, 12));
  double worst = 0;
  int count = 0;
  for (int i = 0; i < 1000; ++i) {
    const MatX& g = gens[i % gens.size()];
    const Vec3 d = oracle::random_unit(rng);
    worst = std::max(worst, std::abs(MomentZonotope{g}.support(d) - oracle::zonotope_support_brute(g, d)));
    ++count;
  }
  return {worst <= 1e-12, fmt("%d directions, max |closed form - brute force| = %.3g (want <= 1e-12)", count, worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"C1  ODL dual-tilt trirotor", c1},     {"C2  ODL radial-tilt trirotor", c2},
      {"C3  ODL failed propeller", c3},       {"C4  planar fail-safe lift", c4},
      {"C5  LHI calibration/prediction", c5}, {"C6  classification table", c6},
      {"C7  frozen-angle rank (N<=3)", c7},   {"C8  rank(F) = rank(A')", c8},
      {"C9  Jacobian vs finite differences", c9}, {"C10 dynamics comparatives", c10},
      {"C11 hover equilibrium drift", c11},   {"C12 zonotope support oracle", c12},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %-36s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), seconds_since(t0));
    for (const auto& line : g_info) std::printf("       %s\n", line.c_str());
    g_info.clear();
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}

// Dormand-Prince 8(5,3) coefficients follow Hairer & Wanner, "Solving Ordinary
// Differential Equations I", 2nd ed., and the reference DOP853 Fortran code.

#include "snmesh/integrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "snmesh/errors.hpp"

namespace snmesh {

namespace {

constexpr double c2 = 0.526001519587677318785587544488e-01;
constexpr double c3 = 0.789002279381515978178381316732e-01;
constexpr double c4 = 0.118350341907227396726757197510e+00;
constexpr double c5 = 0.281649658092772603273242802490e+00;
constexpr double c6 = 0.333333333333333333333333333333e+00;
constexpr double c7 = 0.25e+00;
constexpr double c8 = 0.307692307692307692307692307692e+00;
constexpr double c9 = 0.651282051282051282051282051282e+00;
constexpr double c10 = 0.6e+00;
constexpr double c11 = 0.857142857142857142857142857142e+00;

constexpr double a21 = 5.26001519587677318785587544488e-2;
constexpr double a31 = 1.97250569845378994544595329183e-2;
constexpr double a32 = 5.91751709536136983633785987549e-2;
constexpr double a41 = 2.95875854768068491816892993775e-2;
constexpr double a43 = 8.87627564304205475450678981324e-2;
constexpr double a51 = 2.41365134159266685502369798665e-1;
constexpr double a53 = -8.84549479328286085344864962717e-1;
constexpr double a54 = 9.24834003261792003115737966543e-1;
constexpr double a61 = 3.7037037037037037037037037037e-2;
constexpr double a64 = 1.70828608729473871279604482173e-1;
constexpr double a65 = 1.25467687566822425016691814123e-1;
constexpr double a71 = 3.7109375e-2;
constexpr double a74 = 1.70252211019544039314978060272e-1;
constexpr double a75 = 6.02165389804559606850219397283e-2;
constexpr double a76 = -1.7578125e-2;
constexpr double a81 = 3.70920001185047927108779319836e-2;
constexpr double a84 = 1.70383925712239993810214054705e-1;
constexpr double a85 = 1.07262030446373284651809199168e-1;
constexpr double a86 = -1.53194377486244017527936158236e-2;
constexpr double a87 = 8.27378916381402288758473766002e-3;
constexpr double a91 = 6.24110958716075717114429577812e-1;
constexpr double a94 = -3.36089262944694129406857109825e0;
constexpr double a95 = -8.68219346841726006818189891453e-1;
constexpr double a96 = 2.75920996994467083049415600797e1;
constexpr double a97 = 2.01540675504778934086186788979e1;
constexpr double a98 = -4.34898841810699588477366255144e1;
constexpr double a101 = 4.77662536438264365890433908527e-1;
constexpr double a104 = -2.48811461997166764192642586468e0;
constexpr double a105 = -5.90290826836842996371446475743e-1;
constexpr double a106 = 2.12300514481811942347288949897e1;
constexpr double a107 = 1.52792336328824235832596922938e1;
constexpr double a108 = -3.32882109689848629194453265587e1;
constexpr double a109 = -2.03312017085086261358222928593e-2;
constexpr double a111 = -9.3714243008598732571704021658e-1;
constexpr double a114 = 5.18637242884406370830023853209e0;
constexpr double a115 = 1.09143734899672957818500254654e0;
constexpr double a116 = -8.14978701074692612513997267357e0;
constexpr double a117 = -1.85200656599969598641566180701e1;
constexpr double a118 = 2.27394870993505042818970056734e1;
constexpr double a119 = 2.49360555267965238987089396762e0;
constexpr double a1110 = -3.0467644718982195003823669022e0;
constexpr double a121 = 2.27331014751653820792359768449e0;
constexpr double a124 = -1.05344954667372501984066689879e1;
constexpr double a125 = -2.00087205822486249909675718444e0;
constexpr double a126 = -1.79589318631187989172765950534e1;
constexpr double a127 = 2.79488845294199600508499808837e1;
constexpr double a128 = -2.85899827713502369474065508674e0;
constexpr double a129 = -8.87285693353062954433549289258e0;
constexpr double a1210 = 1.23605671757943030647266201528e1;
constexpr double a1211 = 6.43392746015763530355970484046e-1;

constexpr double b1 = 5.42937341165687622380535766363e-2;
constexpr double b6 = 4.45031289275240888144113950566e0;
constexpr double b7 = 1.89151789931450038304281599044e0;
constexpr double b8 = -5.8012039600105847814672114227e0;
constexpr double b9 = 3.1116436695781989440891606237e-1;
constexpr double b10 = -1.52160949662516078556178806805e-1;
constexpr double b11 = 2.01365400804030348374776537501e-1;
constexpr double b12 = 4.47106157277725905176885569043e-2;

constexpr double bhh1 = 0.244094488188976377952755905512e+00;
constexpr double bhh2 = 0.733846688281611857341361741547e+00;
constexpr double bhh3 = 0.220588235294117647058823529412e-01;

constexpr double er1 = 0.1312004499419488073250102996e-01;
constexpr double er6 = -0.1225156446376204440720569753e+01;
constexpr double er7 = -0.4957589496572501915214079952e+00;
constexpr double er8 = 0.1664377182454986536961530415e+01;
constexpr double er9 = -0.3503288487499736816886487290e+00;
constexpr double er10 = 0.3341791187130174790297318841e+00;
constexpr double er11 = 0.8192320648511571246570742613e-01;
constexpr double er12 = -0.2235530786388629525884427845e-01;

constexpr double kUround = std::numeric_limits<double>::epsilon();
constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.333;  // smallest step ratio
constexpr double kMaxFactor = 6.0;    // largest step ratio
constexpr double kBeta = 0.04;        // PI stabilisation

// Stage workspace. k[0] holds f(t, y) on entry; after a step k[3] holds the b-weighted slope.
struct Workspace {
  explicit Workspace(std::size_t n) : y_stage(n), y_new(n) {
    for (auto& stage : k) stage.resize(n);
  }
  std::array<std::vector<double>, 12> k;
  std::vector<double> y_stage;
  std::vector<double> y_new;
};

// Runs stages 2..12 and forms y_new. Slopes land in k[1..11]; k[3] is overwritten with the
// weighted slope sum used by the third-order estimate.
void run_stages(const RhsFunction& f, std::span<const double> y, double t, double h, Workspace& w) {
  const std::size_t n = y.size();
  auto& k = w.k;
  auto& ys = w.y_stage;
  auto stage = [&](double c, std::vector<double>& out) { f(t + c * h, ys, out); };

  for (std::size_t i = 0; i < n; ++i) ys[i] = y[i] + h * a21 * k[0][i];
  stage(c2, k[1]);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
  stage(c3, k[2]);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[i] + h * (a41 * k[0][i] + a43 * k[2][i]);
  stage(c4, k[3]);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[i] + h * (a51 * k[0][i] + a53 * k[2][i] + a54 * k[3][i]);
  stage(c5, k[4]);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[i] + h * (a61 * k[0][i] + a64 * k[3][i] + a65 * k[4][i]);
  stage(c6, k[5]);
  for (std::size_t i = 0; i < n; ++i)
    ys[i] = y[i] + h * (a71 * k[0][i] + a74 * k[3][i] + a75 * k[4][i] + a76 * k[5][i]);
  stage(c7, k[6]);
  for (std::size_t i = 0; i < n; ++i)
    ys[i] = y[i] + h * (a81 * k[0][i] + a84 * k[3][i] + a85 * k[4][i] + a86 * k[5][i] + a87 * k[6][i]);
  stage(c8, k[7]);
  for (std::size_t i = 0; i < n; ++i)
    ys[i] = y[i] + h * (a91 * k[0][i] + a94 * k[3][i] + a95 * k[4][i] + a96 * k[5][i] + a97 * k[6][i] +
                        a98 * k[7][i]);
  stage(c9, k[8]);
  for (std::size_t i = 0; i < n; ++i)
    ys[i] = y[i] + h * (a101 * k[0][i] + a104 * k[3][i] + a105 * k[4][i] + a106 * k[5][i] + a107 * k[6][i] +
                        a108 * k[7][i] + a109 * k[8][i]);
  stage(c10, k[9]);
  for (std::size_t i = 0; i < n; ++i)
    ys[i] = y[i] + h * (a111 * k[0][i] + a114 * k[3][i] + a115 * k[4][i] + a116 * k[5][i] + a117 * k[6][i] +
                        a118 * k[7][i] + a119 * k[8][i] + a1110 * k[9][i]);
  stage(c11, k[10]);
  for (std::size_t i = 0; i < n; ++i)
    ys[i] = y[i] + h * (a121 * k[0][i] + a124 * k[3][i] + a125 * k[4][i] + a126 * k[5][i] + a127 * k[6][i] +
                        a128 * k[7][i] + a129 * k[8][i] + a1210 * k[9][i] + a1211 * k[10][i]);
  stage(1.0, k[11]);
  for (std::size_t i = 0; i < n; ++i) {
    const double slope = b1 * k[0][i] + b6 * k[5][i] + b7 * k[6][i] + b8 * k[7][i] + b9 * k[8][i] +
                         b10 * k[9][i] + b11 * k[10][i] + b12 * k[11][i];
    k[3][i] = slope;
    w.y_new[i] = y[i] + h * slope;
  }
}

// Scaled error norm of the last step (Hairer's combination of the 5th and 3rd order estimates).
double error_norm(std::span<const double> y, double h, const Workspace& w, const IntegratorConfig& cfg) {
  const std::size_t n = y.size();
  const auto& k = w.k;
  double err5 = 0.0;
  double err3 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(w.y_new[i]));
    const double e3 = k[3][i] - bhh1 * k[0][i] - bhh2 * k[8][i] - bhh3 * k[11][i];
    const double e5 = er1 * k[0][i] + er6 * k[5][i] + er7 * k[6][i] + er8 * k[7][i] + er9 * k[8][i] +
                      er10 * k[9][i] + er11 * k[10][i] + er12 * k[11][i];
    err3 += (e3 / sk) * (e3 / sk);
    err5 += (e5 / sk) * (e5 / sk);
  }
  double denominator = err5 + 0.01 * err3;
  if (denominator <= 0.0) denominator = 1.0;
  return std::abs(h) * err5 * std::sqrt(1.0 / (static_cast<double>(n) * denominator));
}

double initial_step(const RhsFunction& f, std::span<const double> y, double t, double span_length,
                    std::span<const double> f0, const IntegratorConfig& cfg, IntegrationStats& stats) {
  const std::size_t n = y.size();
  double dnf = 0.0;
  double dny = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = cfg.atol + cfg.rtol * std::abs(y[i]);
    dnf += (f0[i] / sk) * (f0[i] / sk);
    dny += (y[i] / sk) * (y[i] / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
  h = std::min(h, span_length);
  std::vector<double> y1(n);
  std::vector<double> f1(n);
  for (std::size_t i = 0; i < n; ++i) y1[i] = y[i] + h * f0[i];
  f(t + h, y1, f1);
  ++stats.rhs_evaluations;
  double der2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = cfg.atol + cfg.rtol * std::abs(y[i]);
    der2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
  }
  der2 = std::sqrt(der2) / h;
  const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
  const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 1.0 / 8.0);
  return std::min({100.0 * h, h1, span_length});
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw InvalidArgument("integrator tolerances must be positive");
  if (max_steps < 1) throw InvalidArgument("integrator max_steps must be positive");
  if (initial_step < 0.0) throw InvalidArgument("integrator initial_step must be non-negative");
}

std::vector<double> dop853_step(const RhsFunction& f, std::span<const double> y, double t, double h) {
  Workspace w(y.size());
  f(t, y, w.k[0]);
  run_stages(f, y, t, h, w);
  return w.y_new;
}

IntegrationResult integrate(const RhsFunction& f, std::vector<double> y0, double t0, double t1,
                            const IntegratorConfig& cfg) {
  cfg.validate();
  if (!(t1 > t0)) throw InvalidArgument("integrate: t1 must exceed t0");
  const std::size_t n = y0.size();
  IntegrationResult result;
  auto& stats = result.stats;
  std::vector<double> y = std::move(y0);
  if (n == 0) {
    result.y = std::move(y);
    return result;
  }

  Workspace w(n);
  f(t0, y, w.k[0]);
  ++stats.rhs_evaluations;

  double t = t0;
  double h = cfg.initial_step > 0.0 ? std::min(cfg.initial_step, t1 - t0)
                                    : initial_step(f, y, t0, t1 - t0, w.k[0], cfg, stats);
  double fac_old = 1e-4;
  bool last_rejected = false;
  const double expo1 = 1.0 / 8.0 - kBeta * 0.2;

  while (true) {
    if (stats.accepted + stats.rejected >= cfg.max_steps) {
      std::ostringstream msg;
      msg << "integrate: exceeded " << cfg.max_steps << " steps at t=" << t;
      throw IntegrationError(msg.str(), t, y);
    }
    if (0.1 * std::abs(h) <= std::abs(t) * kUround) {
      std::ostringstream msg;
      msg << "integrate: step size underflow (h=" << h << ") at t=" << t;
      throw IntegrationError(msg.str(), t, y);
    }
    bool last = false;
    if (t + 1.01 * h >= t1) {
      h = t1 - t;
      last = true;
    }

    run_stages(f, y, t, h, w);
    stats.rhs_evaluations += 11;
    const double err = error_norm(y, h, w, cfg);

    const double fac11 = std::pow(err, expo1);
    double fac = fac11 / std::pow(fac_old, kBeta);
    fac = std::max(1.0 / kMaxFactor, std::min(1.0 / kMinFactor, fac / kSafety));
    double h_new = h / fac;

    bool finite = true;
    for (double v : w.y_new) {
      if (!std::isfinite(v)) {
        finite = false;
        break;
      }
    }

    if (finite && err <= 1.0) {
      fac_old = std::max(err, 1e-4);
      ++stats.accepted;
      t = last ? t1 : t + h;
      std::swap(y, w.y_new);
      if (last) break;
      f(t, y, w.k[0]);
      ++stats.rhs_evaluations;
      if (last_rejected) h_new = std::min(h_new, h);
      last_rejected = false;
      h = h_new;
    } else {
      ++stats.rejected;
      last_rejected = true;
      h = finite ? h / std::min(1.0 / kMinFactor, fac11 / kSafety) : 0.25 * h;
    }
  }
  result.y = std::move(y);
  return result;
}

}  // namespace snmesh

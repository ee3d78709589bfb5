#include "halfline/ode.hpp"
#include "halfline/errors.hpp"

#include <algorithm>
#include <cmath>

namespace halfline {

namespace {

// DOP853 coefficients (Hairer & Wanner).
constexpr double c2 = 0.526001519587677318785587544488E-01, c3 = 0.789002279381515978178381316732E-01,
                 c4 = 0.118350341907227396726757197510E+00, c5 = 0.281649658092772603273242802490E+00,
                 c6 = 0.333333333333333333333333333333E+00, c7 = 0.25E+00,
                 c8 = 0.307692307692307692307692307692E+00, c9 = 0.651282051282051282051282051282E+00,
                 c10 = 0.6E+00, c11 = 0.857142857142857142857142857142E+00;
constexpr double b1 = 5.42937341165687622380535766363E-2, b6 = 4.45031289275240888144113950566E0,
                 b7 = 1.89151789931450038304281599044E0, b8 = -5.8012039600105847814672114227E0,
                 b9 = 3.1116436695781989440891606237E-1, b10 = -1.52160949662516078556178806805E-1,
                 b11 = 2.01365400804030348374776537501E-1, b12 = 4.47106157277725905176885569043E-2;
constexpr double a21 = 5.26001519587677318785587544488E-2, a31 = 1.97250569845378994544595329183E-2,
                 a32 = 5.91751709536136983633785987549E-2, a41 = 2.95875854768068491816892993775E-2,
                 a43 = 8.87627564304205475450678981324E-2, a51 = 2.41365134159266685502369798665E-1,
                 a53 = -8.84549479328286085344864962717E-1, a54 = 9.24834003261792003115737966543E-1,
                 a61 = 3.7037037037037037037037037037E-2, a64 = 1.70828608729473871279604482173E-1,
                 a65 = 1.25467687566822425016691814123E-1, a71 = 3.7109375E-2,
                 a74 = 1.70252211019544039314978060272E-1, a75 = 6.02165389804559606850219397283E-2,
                 a76 = -1.7578125E-2, a81 = 3.70920001185047927108779319836E-2,
                 a84 = 1.70383925712239993810214054705E-1, a85 = 1.07262030446373284651809199168E-1,
                 a86 = -1.53194377486244017527936158236E-2, a87 = 8.27378916381402288758473766002E-3,
                 a91 = 6.24110958716075717114429577812E-1, a94 = -3.36089262944694129406857109825E0,
                 a95 = -8.68219346841726006818189891453E-1, a96 = 2.75920996994467083049415600797E1,
                 a97 = 2.01540675504778934086186788979E1, a98 = -4.34898841810699588477366255144E1,
                 a101 = 4.77662536438264365890433908527E-1, a104 = -2.48811461997166764192642586468E0,
                 a105 = -5.90290826836842996371446475743E-1, a106 = 2.12300514481811942347288949897E1,
                 a107 = 1.52792336328824235832596922938E1, a108 = -3.32882109689848629194453265587E1,
                 a109 = -2.03312017085086261358222928593E-2, a111 = -9.3714243008598732571704021658E-1,
                 a114 = 5.18637242884406370830023853209E0, a115 = 1.09143734899672957818500254654E0,
                 a116 = -8.14978701074692612513997267357E0, a117 = -1.85200656599969598641566180701E1,
                 a118 = 2.27394870993505042818970056734E1, a119 = 2.49360555267965238987089396762E0,
                 a1110 = -3.0467644718982195003823669022E0, a121 = 2.27331014751653820792359768449E0,
                 a124 = -1.05344954667372501984066689879E1, a125 = -2.00087205822486249909675718444E0,
                 a126 = -1.79589318631187989172765950534E1, a127 = 2.79488845294199600508499808837E1,
                 a128 = -2.85899827713502369474065508674E0, a129 = -8.87285693353062954433549289258E0,
                 a1210 = 1.23605671757943030647266201528E1, a1211 = 6.43392746015763530355970484046E-1;
constexpr double bhh1 = 0.244094488188976377952755905512E+00, bhh2 = 0.733846688281611857341361741547E+00,
                 bhh3 = 0.220588235294117647058823529412E-01;
constexpr double er1 = 0.1312004499419488073250102996E-01, er6 = -0.1225156446376204440720569753E+01,
                 er7 = -0.4957589496572501915214079952E+00, er8 = 0.1664377182454986536961530415E+01,
                 er9 = -0.3503288487499736816886487290E+00, er10 = 0.3341791187130174790297318841E+00,
                 er11 = 0.8192320648511571246570742613E-01, er12 = -0.2235530786388629525884427845E-01;

constexpr double kUround = 2.3e-16;
constexpr double kSafe = 0.9;
constexpr double kFacMin = 1.0 / 3.0;  // fac1
constexpr double kFacMax = 6.0;        // fac2

}  // namespace

Dop853::Dop853(Rhs rhs, Options opts) : rhs_(std::move(rhs)), opts_(opts) {}

double Dop853::initial_step(const Vec& y, double x0, double dir, double hmax) {
  const Eigen::Index n = y.size();
  double dnf = 0.0, dny = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sk = opts_.atol + opts_.rtol * std::abs(y(i));
    dnf += std::norm(k1_(i)) / (sk * sk);
    dny += std::norm(y(i)) / (sk * sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
  h = std::min(h, hmax);
  stage_ = y + (dir * h) * k1_;
  rhs_(x0 + dir * h, stage_, k2_);
  double der2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sk = opts_.atol + opts_.rtol * std::abs(y(i));
    der2 += std::norm(k2_(i) - k1_(i)) / (sk * sk);
  }
  der2 = std::sqrt(der2) / h;
  const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
  const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 1.0 / 8.0);
  return std::min({100.0 * h, h1, hmax});
}

double Dop853::attempt(const Vec& y, double x, double hs) {
  stage_ = y + hs * a21 * k1_;
  rhs_(x + c2 * hs, stage_, k2_);
  stage_ = y + hs * (a31 * k1_ + a32 * k2_);
  rhs_(x + c3 * hs, stage_, k3_);
  stage_ = y + hs * (a41 * k1_ + a43 * k3_);
  rhs_(x + c4 * hs, stage_, k4_);
  stage_ = y + hs * (a51 * k1_ + a53 * k3_ + a54 * k4_);
  rhs_(x + c5 * hs, stage_, k5_);
  stage_ = y + hs * (a61 * k1_ + a64 * k4_ + a65 * k5_);
  rhs_(x + c6 * hs, stage_, k6_);
  stage_ = y + hs * (a71 * k1_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
  rhs_(x + c7 * hs, stage_, k7_);
  stage_ = y + hs * (a81 * k1_ + a84 * k4_ + a85 * k5_ + a86 * k6_ + a87 * k7_);
  rhs_(x + c8 * hs, stage_, k8_);
  stage_ = y + hs * (a91 * k1_ + a94 * k4_ + a95 * k5_ + a96 * k6_ + a97 * k7_ + a98 * k8_);
  rhs_(x + c9 * hs, stage_, k9_);
  stage_ = y + hs * (a101 * k1_ + a104 * k4_ + a105 * k5_ + a106 * k6_ + a107 * k7_ + a108 * k8_ + a109 * k9_);
  rhs_(x + c10 * hs, stage_, k10_);
  stage_ = y + hs * (a111 * k1_ + a114 * k4_ + a115 * k5_ + a116 * k6_ + a117 * k7_ + a118 * k8_ + a119 * k9_ +
                     a1110 * k10_);
  rhs_(x + c11 * hs, stage_, k11_);
  stage_ = y + hs * (a121 * k1_ + a124 * k4_ + a125 * k5_ + a126 * k6_ + a127 * k7_ + a128 * k8_ + a129 * k9_ +
                     a1210 * k10_ + a1211 * k11_);
  rhs_(x + hs, stage_, k12_);
  incr_ = b1 * k1_ + b6 * k6_ + b7 * k7_ + b8 * k8_ + b9 * k9_ + b10 * k10_ + b11 * k11_ + b12 * k12_;
  ynew_ = y + hs * incr_;

  double err = 0.0, err2 = 0.0;
  const Eigen::Index n = y.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sk = opts_.atol + opts_.rtol * std::max(std::abs(y(i)), std::abs(ynew_(i)));
    err2 += std::norm((incr_(i) - bhh1 * k1_(i) - bhh2 * k9_(i) - bhh3 * k12_(i)) / sk);
    err += std::norm((er1 * k1_(i) + er6 * k6_(i) + er7 * k7_(i) + er8 * k8_(i) + er9 * k9_(i) + er10 * k10_(i) +
                      er11 * k11_(i) + er12 * k12_(i)) /
                     sk);
  }
  const double deno = err + 0.01 * err2;
  const double nn = static_cast<double>(n);
  return std::abs(hs) * err * std::sqrt(1.0 / (deno <= 0.0 ? nn : deno * nn));
}

void Dop853::integrate(Vec& y, double x0, double x1) {
  if (x0 == x1) return;
  const double dir = x1 > x0 ? 1.0 : -1.0;
  const double hmax = std::abs(x1 - x0);
  const Eigen::Index n = y.size();
  for (Vec* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &k8_, &k9_, &k10_, &k11_, &k12_, &stage_, &incr_,
                 &ynew_, &fnew_})
    if (v->size() != n) v->resize(n);

  rhs_(x0, y, k1_);
  double h = h_ > 0.0 ? std::min(h_, hmax) : initial_step(y, x0, dir, hmax);
  double x = x0;
  bool reject = false;
  bool last = false;
  long steps = 0;
  const double expo1 = 1.0 / 8.0;

  while (true) {
    if (++steps > opts_.max_steps)
      throw ScatteringError(ErrorCode::IntegrationFailure, "step budget exhausted");
    if (0.1 * h <= std::abs(x) * kUround || h <= 1e-300)
      throw ScatteringError(ErrorCode::IntegrationFailure, "step size underflow near x = " + std::to_string(x));
    const double planned = h;
    if ((x + 1.01 * dir * h - x1) * dir > 0.0) {
      h = std::abs(x1 - x);
      last = true;
    }
    const double err = attempt(y, x, dir * h);
    if (!std::isfinite(err)) {
      if (!ynew_.allFinite() && h < 1e-12 * hmax)
        throw ScatteringError(ErrorCode::NonFinite, "solution became non-finite");
      h *= 0.1;
      reject = true;
      last = false;
      continue;
    }
    const double fac11 = std::pow(err, expo1);
    const double fac = std::max(1.0 / kFacMax, std::min(1.0 / kFacMin, fac11 / kSafe));
    double hnew = h / fac;
    if (err <= 1.0) {
      ++accepted_;
      y = ynew_;
      x = last ? x1 : x + dir * h;
      if (last) {
        h_ = std::max(hnew, planned);
        return;
      }
      rhs_(x, y, k1_);
      hnew = std::min(hnew, hmax);
      if (reject) hnew = std::min(hnew, h);
      reject = false;
    } else {
      hnew = h / std::min(1.0 / kFacMin, fac11 / kSafe);
      reject = true;
      last = false;
      if (accepted_ > 0) ++rejected_;
    }
    h = hnew;
  }
}

}  // namespace halfline

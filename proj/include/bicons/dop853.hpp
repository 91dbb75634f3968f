#pragma once

// Adaptive explicit Runge-Kutta integrator of order 8 (Dormand-Prince 8(5,3))
// with the 7th-order continuous extension. Coefficients and step control
// follow Hairer & Wanner's DOP853. Every accepted step keeps its dense-output
// coefficients, so the whole trajectory can be evaluated at any t afterwards.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <iterator>
#include <limits>
#include <utility>
#include <vector>

namespace bicons {

template <std::size_t N>
using OdeState = std::array<double, N>;

// One accepted step [t0, t0 + h] (h may be negative) with its interpolant.
template <std::size_t N>
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  std::array<OdeState<N>, 8> rc{};

  double t1() const { return t0 + h; }
  double lo() const { return std::min(t0, t0 + h); }
  double hi() const { return std::max(t0, t0 + h); }

  OdeState<N> eval(double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    OdeState<N> y{};
    for (std::size_t i = 0; i < N; ++i)
      y[i] = rc[0][i] +
             s * (rc[1][i] +
                  s1 * (rc[2][i] +
                        s * (rc[3][i] +
                             s1 * (rc[4][i] +
                                   s * (rc[5][i] + s1 * (rc[6][i] + s * rc[7][i]))))));
    return y;
  }
};

enum class OdeStatus { completed, stopped, step_underflow, max_steps };

template <std::size_t N>
struct OdeResult {
  OdeStatus status = OdeStatus::completed;
  double t_end = 0.0;
  OdeState<N> y_end{};
  std::vector<DenseSegment<N>> segments;  // in integration order
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_calls = 0;
};

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 200000;
};

namespace dop853_tableau {
// Nodes.
inline constexpr double c2 = 0.526001519587677318785587544488E-01;
inline constexpr double c3 = 0.789002279381515978178381316732E-01;
inline constexpr double c4 = 0.118350341907227396726757197510E+00;
inline constexpr double c5 = 0.281649658092772603273242802490E+00;
inline constexpr double c6 = 0.333333333333333333333333333333E+00;
inline constexpr double c7 = 0.25E+00;
inline constexpr double c8 = 0.307692307692307692307692307692E+00;
inline constexpr double c9 = 0.651282051282051282051282051282E+00;
inline constexpr double c10 = 0.6E+00;
inline constexpr double c11 = 0.857142857142857142857142857142E+00;
inline constexpr double c14 = 0.1E+00;
inline constexpr double c15 = 0.2E+00;
inline constexpr double c16 = 0.777777777777777777777777777778E+00;

// Weights.
inline constexpr double b1 = 5.42937341165687622380535766363E-2;
inline constexpr double b6 = 4.45031289275240888144113950566E0;
inline constexpr double b7 = 1.89151789931450038304281599044E0;
inline constexpr double b8 = -5.8012039600105847814672114227E0;
inline constexpr double b9 = 3.1116436695781989440891606237E-1;
inline constexpr double b10 = -1.52160949662516078556178806805E-1;
inline constexpr double b11 = 2.01365400804030348374776537501E-1;
inline constexpr double b12 = 4.47106157277725905176885569043E-2;

// Error estimators.
inline constexpr double bhh1 = 0.244094488188976377952755905512E+00;
inline constexpr double bhh2 = 0.733846688281611857341361741547E+00;
inline constexpr double bhh3 = 0.220588235294117647058823529412E-01;
inline constexpr double er1 = 0.1312004499419488073250102996E-01;
inline constexpr double er6 = -0.1225156446376204440720569753E+01;
inline constexpr double er7 = -0.4957589496572501915214079952E+00;
inline constexpr double er8 = 0.1664377182454986536961530415E+01;
inline constexpr double er9 = -0.3503288487499736816886487290E+00;
inline constexpr double er10 = 0.3341791187130174790297318841E+00;
inline constexpr double er11 = 0.8192320648511571246570742613E-01;
inline constexpr double er12 = -0.2235530786388629525884427845E-01;

// Stage matrix.
inline constexpr double a21 = 5.26001519587677318785587544488E-2;
inline constexpr double a31 = 1.97250569845378994544595329183E-2;
inline constexpr double a32 = 5.91751709536136983633785987549E-2;
inline constexpr double a41 = 2.95875854768068491816892993775E-2;
inline constexpr double a43 = 8.87627564304205475450678981324E-2;
inline constexpr double a51 = 2.41365134159266685502369798665E-1;
inline constexpr double a53 = -8.84549479328286085344864962717E-1;
inline constexpr double a54 = 9.24834003261792003115737966543E-1;
inline constexpr double a61 = 3.7037037037037037037037037037E-2;
inline constexpr double a64 = 1.70828608729473871279604482173E-1;
inline constexpr double a65 = 1.25467687566822425016691814123E-1;
inline constexpr double a71 = 3.7109375E-2;
inline constexpr double a74 = 1.70252211019544039314978060272E-1;
inline constexpr double a75 = 6.02165389804559606850219397283E-2;
inline constexpr double a76 = -1.7578125E-2;
inline constexpr double a81 = 3.70920001185047927108779319836E-2;
inline constexpr double a84 = 1.70383925712239993810214054705E-1;
inline constexpr double a85 = 1.07262030446373284651809199168E-1;
inline constexpr double a86 = -1.53194377486244017527936158236E-2;
inline constexpr double a87 = 8.27378916381402288758473766002E-3;
inline constexpr double a91 = 6.24110958716075717114429577812E-1;
inline constexpr double a94 = -3.36089262944694129406857109825E0;
inline constexpr double a95 = -8.68219346841726006818189891453E-1;
inline constexpr double a96 = 2.75920996994467083049415600797E1;
inline constexpr double a97 = 2.01540675504778934086186788979E1;
inline constexpr double a98 = -4.34898841810699588477366255144E1;
inline constexpr double a101 = 4.77662536438264365890433908527E-1;
inline constexpr double a104 = -2.48811461997166764192642586468E0;
inline constexpr double a105 = -5.90290826836842996371446475743E-1;
inline constexpr double a106 = 2.12300514481811942347288949897E1;
inline constexpr double a107 = 1.52792336328824235832596922938E1;
inline constexpr double a108 = -3.32882109689848629194453265587E1;
inline constexpr double a109 = -2.03312017085086261358222928593E-2;
inline constexpr double a111 = -9.3714243008598732571704021658E-1;
inline constexpr double a114 = 5.18637242884406370830023853209E0;
inline constexpr double a115 = 1.09143734899672957818500254654E0;
inline constexpr double a116 = -8.14978701074692612513997267357E0;
inline constexpr double a117 = -1.85200656599969598641566180701E1;
inline constexpr double a118 = 2.27394870993505042818970056734E1;
inline constexpr double a119 = 2.49360555267965238987089396762E0;
inline constexpr double a1110 = -3.0467644718982195003823669022E0;
inline constexpr double a121 = 2.27331014751653820792359768449E0;
inline constexpr double a124 = -1.05344954667372501984066689879E1;
inline constexpr double a125 = -2.00087205822486249909675718444E0;
inline constexpr double a126 = -1.79589318631187989172765950534E1;
inline constexpr double a127 = 2.79488845294199600508499808837E1;
inline constexpr double a128 = -2.85899827713502369474065508674E0;
inline constexpr double a129 = -8.87285693353062954433549289258E0;
inline constexpr double a1210 = 1.23605671757943030647266201528E1;
inline constexpr double a1211 = 6.43392746015763530355970484046E-1;

// Extra stages for the continuous extension.
inline constexpr double a141 = 5.61675022830479523392909219681E-2;
inline constexpr double a147 = 2.53500210216624811088794765333E-1;
inline constexpr double a148 = -2.46239037470802489917441475441E-1;
inline constexpr double a149 = -1.24191423263816360469010140626E-1;
inline constexpr double a1410 = 1.5329179827876569731206322685E-1;
inline constexpr double a1411 = 8.20105229563468988491666602057E-3;
inline constexpr double a1412 = 7.56789766054569976138603589584E-3;
inline constexpr double a1413 = -8.298E-3;
inline constexpr double a151 = 3.18346481635021405060768473261E-2;
inline constexpr double a156 = 2.83009096723667755288322961402E-2;
inline constexpr double a157 = 5.35419883074385676223797384372E-2;
inline constexpr double a158 = -5.49237485713909884646569340306E-2;
inline constexpr double a1511 = -1.08347328697249322858509316994E-4;
inline constexpr double a1512 = 3.82571090835658412954920192323E-4;
inline constexpr double a1513 = -3.40465008687404560802977114492E-4;
inline constexpr double a1514 = 1.41312443674632500278074618366E-1;
inline constexpr double a161 = -4.28896301583791923408573538692E-1;
inline constexpr double a166 = -4.69762141536116384314449447206E0;
inline constexpr double a167 = 7.68342119606259904184240953878E0;
inline constexpr double a168 = 4.06898981839711007970213554331E0;
inline constexpr double a169 = 3.56727187455281109270669543021E-1;
inline constexpr double a1613 = -1.39902416515901462129418009734E-3;
inline constexpr double a1614 = 2.9475147891527723389556272149E0;
inline constexpr double a1615 = -9.15095847217987001081870187138E0;

inline constexpr double d41 = -0.84289382761090128651353491142E+01;
inline constexpr double d46 = 0.56671495351937776962531783590E+00;
inline constexpr double d47 = -0.30689499459498916912797304727E+01;
inline constexpr double d48 = 0.23846676565120698287728149680E+01;
inline constexpr double d49 = 0.21170345824450282767155149946E+01;
inline constexpr double d410 = -0.87139158377797299206789907490E+00;
inline constexpr double d411 = 0.22404374302607882758541771650E+01;
inline constexpr double d412 = 0.63157877876946881815570249290E+00;
inline constexpr double d413 = -0.88990336451333310820698117400E-01;
inline constexpr double d414 = 0.18148505520854727256656404962E+02;
inline constexpr double d415 = -0.91946323924783554000451984436E+01;
inline constexpr double d416 = -0.44360363875948939664310572000E+01;
inline constexpr double d51 = 0.10427508642579134603413151009E+02;
inline constexpr double d56 = 0.24228349177525818288430175319E+03;
inline constexpr double d57 = 0.16520045171727028198505394887E+03;
inline constexpr double d58 = -0.37454675472269020279518312152E+03;
inline constexpr double d59 = -0.22113666853125306036270938578E+02;
inline constexpr double d510 = 0.77334326684722638389603898808E+01;
inline constexpr double d511 = -0.30674084731089398182061213626E+02;
inline constexpr double d512 = -0.93321305264302278729567221706E+01;
inline constexpr double d513 = 0.15697238121770843886131091075E+02;
inline constexpr double d514 = -0.31139403219565177677282850411E+02;
inline constexpr double d515 = -0.93529243588444783865713862664E+01;
inline constexpr double d516 = 0.35816841486394083752465898540E+02;
inline constexpr double d61 = 0.19985053242002433820987653617E+02;
inline constexpr double d66 = -0.38703730874935176555105901742E+03;
inline constexpr double d67 = -0.18917813819516756882830838328E+03;
inline constexpr double d68 = 0.52780815920542364900561016686E+03;
inline constexpr double d69 = -0.11573902539959630126141871134E+02;
inline constexpr double d610 = 0.68812326946963000169666922661E+01;
inline constexpr double d611 = -0.10006050966910838403183860980E+01;
inline constexpr double d612 = 0.77771377980534432092869265740E+00;
inline constexpr double d613 = -0.27782057523535084065932004339E+01;
inline constexpr double d614 = -0.60196695231264120758267380846E+02;
inline constexpr double d615 = 0.84320405506677161018159903784E+02;
inline constexpr double d616 = 0.11992291136182789328035130030E+02;
inline constexpr double d71 = -0.25693933462703749003312586129E+02;
inline constexpr double d76 = -0.15418974869023643374053993627E+03;
inline constexpr double d77 = -0.23152937917604549567536039109E+03;
inline constexpr double d78 = 0.35763911791061412378285349910E+03;
inline constexpr double d79 = 0.93405324183624310003907691704E+02;
inline constexpr double d710 = -0.37458323136451633156875139351E+02;
inline constexpr double d711 = 0.10409964950896230045147246184E+03;
inline constexpr double d712 = 0.29840293426660503123344363579E+02;
inline constexpr double d713 = -0.43533456590011143754432175058E+02;
inline constexpr double d714 = 0.96324553959188282948394950600E+02;
inline constexpr double d715 = -0.39177261675615439165231486172E+02;
inline constexpr double d716 = -0.14972683625798562581422125276E+03;
}  // namespace dop853_tableau

// Integrate y' = rhs(t, y) from t0 to t1 (either direction). `stop(t, y)` is
// checked on every accepted step; when it returns true the step is discarded
// and integration ends with status `stopped` at the last good point.
// A non-finite right-hand side is treated as a failed step.
template <std::size_t N, class Rhs, class Stop>
OdeResult<N> dop853_integrate(Rhs&& rhs, double t0, const OdeState<N>& y0, double t1,
                              const OdeOptions& opt, Stop&& stop) {
  using namespace dop853_tableau;
  using S = OdeState<N>;
  OdeResult<N> res;
  res.t_end = t0;
  res.y_end = y0;
  if (t1 == t0) return res;

  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double h_max = std::min(opt.h_max, std::abs(t1 - t0));
  constexpr double uround = 2.3e-16;
  constexpr double safe = 0.9, facc1 = 3.0, facc2 = 1.0 / 6.0, expo1 = 1.0 / 8.0;

  auto f = [&](double t, const S& y) {
    S d = rhs(t, y);
    ++res.rhs_calls;
    return d;
  };
  auto finite = [](const S& v) {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  };
  auto axpy = [](const S& y, double h, std::initializer_list<std::pair<double, const S*>> terms) {
    S out = y;
    for (std::size_t i = 0; i < N; ++i) {
      double acc = 0.0;
      for (const auto& [c, k] : terms) acc += c * (*k)[i];
      out[i] += h * acc;
    }
    return out;
  };

  double t = t0;
  S y = y0;
  S k1 = f(t, y);
  if (!finite(k1)) {
    res.status = OdeStatus::step_underflow;
    return res;
  }

  // Initial step (Hairer's heuristic).
  double h;
  {
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = opt.atol + opt.rtol * std::abs(y[i]);
      dnf += (k1[i] / sk) * (k1[i] / sk);
      dny += (y[i] / sk) * (y[i] / sk);
    }
    h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, h_max) * dir;
    S y1 = y;
    for (std::size_t i = 0; i < N; ++i) y1[i] += h * k1[i];
    S k2 = f(t + h, y1);
    double der2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double q = (k2[i] - k1[i]) / (opt.atol + opt.rtol * std::abs(y[i]));
      der2 += q * q;
    }
    der2 = std::sqrt(der2) / std::abs(h);
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3)
                                     : std::pow(0.01 / der12, 0.125);
    h = std::min({100.0 * std::abs(h), h1, h_max}) * dir;
    if (!std::isfinite(h) || h == 0.0) h = 1e-6 * dir;
  }

  bool reject = false;
  std::size_t nstep = 0;

  while (true) {
    if (nstep > opt.max_steps) {
      res.status = OdeStatus::max_steps;
      break;
    }
    if (0.1 * std::abs(h) <= std::abs(t) * uround || std::abs(h) < 1e-300) {
      res.status = OdeStatus::step_underflow;
      break;
    }
    bool last = false;
    if ((t + 1.01 * h - t1) * dir > 0.0) {
      h = t1 - t;
      last = true;
    }
    ++nstep;

    const S k2 = f(t + c2 * h, axpy(y, h, {{a21, &k1}}));
    const S k3 = f(t + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
    const S k4 = f(t + c4 * h, axpy(y, h, {{a41, &k1}, {a43, &k3}}));
    const S k5 = f(t + c5 * h, axpy(y, h, {{a51, &k1}, {a53, &k3}, {a54, &k4}}));
    const S k6 = f(t + c6 * h, axpy(y, h, {{a61, &k1}, {a64, &k4}, {a65, &k5}}));
    const S k7 = f(t + c7 * h, axpy(y, h, {{a71, &k1}, {a74, &k4}, {a75, &k5}, {a76, &k6}}));
    const S k8 = f(t + c8 * h,
                   axpy(y, h, {{a81, &k1}, {a84, &k4}, {a85, &k5}, {a86, &k6}, {a87, &k7}}));
    const S k9 = f(t + c9 * h, axpy(y, h,
                                    {{a91, &k1}, {a94, &k4}, {a95, &k5}, {a96, &k6},
                                     {a97, &k7}, {a98, &k8}}));
    const S k10 = f(t + c10 * h, axpy(y, h,
                                      {{a101, &k1}, {a104, &k4}, {a105, &k5}, {a106, &k6},
                                       {a107, &k7}, {a108, &k8}, {a109, &k9}}));
    const S k11 = f(t + c11 * h, axpy(y, h,
                                      {{a111, &k1}, {a114, &k4}, {a115, &k5}, {a116, &k6},
                                       {a117, &k7}, {a118, &k8}, {a119, &k9}, {a1110, &k10}}));
    const double tph = t + h;
    const S k12 = f(tph, axpy(y, h,
                              {{a121, &k1}, {a124, &k4}, {a125, &k5}, {a126, &k6}, {a127, &k7},
                               {a128, &k8}, {a129, &k9}, {a1210, &k10}, {a1211, &k11}}));
    S incr{};
    S ynew{};
    for (std::size_t i = 0; i < N; ++i) {
      incr[i] = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] +
                b10 * k10[i] + b11 * k11[i] + b12 * k12[i];
      ynew[i] = y[i] + h * incr[i];
    }

    double err = 0.0, err2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = 1.0 / (opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i])));
      double q = (incr[i] - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * k12[i]) * sk;
      err2 += q * q;
      q = (er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] + er9 * k9[i] +
           er10 * k10[i] + er11 * k11[i] + er12 * k12[i]) *
          sk;
      err += q * q;
    }
    double deno = err + 0.01 * err2;
    deno = deno <= 0.0 ? 1.0 : deno;
    err = std::abs(h) * err * std::sqrt(1.0 / (deno * static_cast<double>(N)));
    if (!std::isfinite(err) || !finite(ynew)) err = 1e10;

    const double fac11 = std::pow(err, expo1);
    double fac = std::max(facc2, std::min(facc1, fac11 / safe));
    double hnew = h / fac;

    if (err <= 1.0) {
      const S knew = f(tph, ynew);
      if (!finite(knew)) {
        // Accepted by the error norm but lands where the field is undefined.
        hnew = h * 0.25;
        reject = true;
        ++res.rejected;
        h = hnew;
        continue;
      }

      // Continuous extension.
      DenseSegment<N> seg;
      seg.t0 = t;
      seg.h = h;
      S rc5{}, rc6{}, rc7{}, rc8{};
      for (std::size_t i = 0; i < N; ++i) {
        const double ydiff = ynew[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        seg.rc[0][i] = y[i];
        seg.rc[1][i] = ydiff;
        seg.rc[2][i] = bspl;
        seg.rc[3][i] = ydiff - h * knew[i] - bspl;
        rc5[i] = d41 * k1[i] + d46 * k6[i] + d47 * k7[i] + d48 * k8[i] + d49 * k9[i] +
                 d410 * k10[i] + d411 * k11[i] + d412 * k12[i];
        rc6[i] = d51 * k1[i] + d56 * k6[i] + d57 * k7[i] + d58 * k8[i] + d59 * k9[i] +
                 d510 * k10[i] + d511 * k11[i] + d512 * k12[i];
        rc7[i] = d61 * k1[i] + d66 * k6[i] + d67 * k7[i] + d68 * k8[i] + d69 * k9[i] +
                 d610 * k10[i] + d611 * k11[i] + d612 * k12[i];
        rc8[i] = d71 * k1[i] + d76 * k6[i] + d77 * k7[i] + d78 * k8[i] + d79 * k9[i] +
                 d710 * k10[i] + d711 * k11[i] + d712 * k12[i];
      }
      const S k14 = f(t + c14 * h, axpy(y, h,
                                        {{a141, &k1}, {a147, &k7}, {a148, &k8}, {a149, &k9},
                                         {a1410, &k10}, {a1411, &k11}, {a1412, &k12},
                                         {a1413, &knew}}));
      const S k15 = f(t + c15 * h, axpy(y, h,
                                        {{a151, &k1}, {a156, &k6}, {a157, &k7}, {a158, &k8},
                                         {a1511, &k11}, {a1512, &k12}, {a1513, &knew},
                                         {a1514, &k14}}));
      const S k16 = f(t + c16 * h, axpy(y, h,
                                        {{a161, &k1}, {a166, &k6}, {a167, &k7}, {a168, &k8},
                                         {a169, &k9}, {a1613, &knew}, {a1614, &k14},
                                         {a1615, &k15}}));
      for (std::size_t i = 0; i < N; ++i) {
        seg.rc[4][i] = h * (rc5[i] + d413 * knew[i] + d414 * k14[i] + d415 * k15[i] + d416 * k16[i]);
        seg.rc[5][i] = h * (rc6[i] + d513 * knew[i] + d514 * k14[i] + d515 * k15[i] + d516 * k16[i]);
        seg.rc[6][i] = h * (rc7[i] + d613 * knew[i] + d614 * k14[i] + d615 * k15[i] + d616 * k16[i]);
        seg.rc[7][i] = h * (rc8[i] + d713 * knew[i] + d714 * k14[i] + d715 * k15[i] + d716 * k16[i]);
      }

      if (stop(tph, ynew)) {
        res.status = OdeStatus::stopped;
        break;
      }

      ++res.accepted;
      res.segments.push_back(seg);
      k1 = knew;
      y = ynew;
      t = tph;
      res.t_end = t;
      res.y_end = y;
      if (last) {
        res.status = OdeStatus::completed;
        break;
      }
      if (std::abs(hnew) > h_max) hnew = dir * h_max;
      if (reject) hnew = dir * std::min(std::abs(hnew), std::abs(h));
      reject = false;
    } else {
      hnew = h / std::min(facc1, fac11 / safe);
      reject = true;
      if (res.accepted >= 1) ++res.rejected;
    }
    h = hnew;
  }
  return res;
}

template <std::size_t N, class Rhs>
OdeResult<N> dop853_integrate(Rhs&& rhs, double t0, const OdeState<N>& y0, double t1,
                              const OdeOptions& opt) {
  return dop853_integrate<N>(std::forward<Rhs>(rhs), t0, y0, t1, opt,
                             [](double, const OdeState<N>&) { return false; });
}

// Dense trajectory assembled from a backward and a forward run that share
// their initial point. Segments are kept sorted by increasing t.
template <std::size_t N>
class DenseTrajectory {
 public:
  DenseTrajectory() = default;

  DenseTrajectory(const OdeResult<N>& backward, const OdeResult<N>& forward, double t0,
                  const OdeState<N>& y0)
      : t0_(t0), y0_(y0) {
    for (auto it = backward.segments.rbegin(); it != backward.segments.rend(); ++it)
      segs_.push_back(*it);
    for (const auto& s : forward.segments) segs_.push_back(s);
    lo_ = backward.segments.empty() ? t0 : backward.t_end;
    hi_ = forward.segments.empty() ? t0 : forward.t_end;
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<DenseSegment<N>>& segments() const { return segs_; }

  bool contains(double t) const { return t >= lo_ && t <= hi_; }

  OdeState<N> eval(double t) const {
    if (segs_.empty()) return y0_;
    // First segment whose upper end is >= t.
    auto it = std::lower_bound(segs_.begin(), segs_.end(), t,
                               [](const DenseSegment<N>& s, double v) { return s.hi() < v; });
    if (it == segs_.end()) it = std::prev(segs_.end());
    return it->eval(t);
  }

 private:
  double t0_ = 0.0;
  OdeState<N> y0_{};
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<DenseSegment<N>> segs_;
};

}  // namespace bicons

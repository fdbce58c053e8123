#include "zecmac/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "zecmac/errors.hpp"

namespace zecmac::est {

namespace {

using Complex = std::complex<double>;

double inf_norm(const Matrix& M) {
  if (M.size() == 0) return 0;
  return M.cwiseAbs().rowwise().sum().maxCoeff();
}

std::string echo(const Matrix& A) {
  std::ostringstream s;
  s << '[';
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    s << (r ? ", [" : "[");
    for (Eigen::Index c = 0; c < A.cols(); ++c) s << (c ? ", " : "") << A(r, c);
    s << ']';
  }
  s << ']';
  return s.str();
}

Complex horner(const std::vector<double>& c, Complex z, Complex* deriv) {
  // c[0..d], monic, c[d] == 1
  Complex p = c.back(), dp = 0;
  for (std::size_t i = c.size() - 1; i-- > 0;) {
    dp = dp * z + p;
    p = p * z + c[i];
  }
  if (deriv) *deriv = dp;
  return p;
}

std::vector<double> derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * static_cast<double>(i));
  return d;
}

std::size_t rank_of(const Eigen::MatrixXcd& M) {
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
  lu.setThreshold(1e-9);
  return static_cast<std::size_t>(lu.rank());
}

void require_finite(const Matrix& M, const std::string& what) {
  if (!M.allFinite()) throw ConfigError(what + " has non-finite entries");
}

}  // namespace

std::vector<double> characteristic_polynomial(const Matrix& A) {
  if (A.rows() != A.cols()) throw ConfigError("system matrix must be square");
  const auto d = static_cast<std::size_t>(A.rows());
  std::vector<double> c(d + 1, 0.0);
  c[d] = 1;
  Matrix M = Matrix::Zero(A.rows(), A.cols());
  const Matrix I = Matrix::Identity(A.rows(), A.cols());
  for (std::size_t k = 1; k <= d; ++k) {
    M = A * M + c[d - k + 1] * I;
    c[d - k] = -(A * M).trace() / static_cast<double>(k);
  }
  return c;
}

std::vector<Complex> eigenvalues(const Matrix& A) {
  const auto c = characteristic_polynomial(A);
  const std::size_t d = c.size() - 1;
  if (d == 0) return {};
  if (d == 1) return {Complex(-c[0], 0)};

  double bound = 0;
  for (std::size_t i = 0; i < d; ++i) bound = std::max(bound, std::abs(c[i]));
  const double radius = 1 + bound;
  std::vector<Complex> z(d);
  const double pi = std::acos(-1.0);
  for (std::size_t k = 0; k < d; ++k) z[k] = std::polar(radius, 2 * pi * static_cast<double>(k) / d + 0.4);

  // Aberth-Ehrlich iteration
  for (int iter = 0; iter < 2000; ++iter) {
    double worst = 0;
    for (std::size_t k = 0; k < d; ++k) {
      Complex dp;
      const Complex p = horner(c, z[k], &dp);
      if (p == Complex(0)) continue;
      const Complex ratio = p / dp;
      Complex sum = 0;
      for (std::size_t j = 0; j < d; ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      const Complex step = ratio / (1.0 - ratio * sum);
      if (std::isfinite(step.real()) && std::isfinite(step.imag())) z[k] -= step;
      worst = std::max(worst, std::abs(step) / (1 + std::abs(z[k])));
    }
    if (worst < 1e-15) break;
  }
  for (const auto& r : z) {
    double scale = 0;
    for (std::size_t i = 0; i <= d; ++i) scale += std::abs(c[i]) * std::pow(std::abs(r), static_cast<double>(i));
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag()) || std::abs(horner(c, r, nullptr)) > 1e-8 * scale)
      throw NumericalError("eigenvalue iteration did not converge for A = " + echo(A));
  }

  // merge clusters: an m-fold root comes out spread by ~eps^(1/m), while the
  // cluster mean stays accurate to ~eps
  std::vector<std::size_t> group(d);
  for (std::size_t i = 0; i < d; ++i) group[i] = i;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(z[i] - z[j]) < 1e-4 * (1 + std::abs(z[i]))) {
        const std::size_t from = group[i], to = group[j];
        for (auto& g : group)
          if (g == from) g = to;
      }
  std::vector<Complex> out(d);
  for (std::size_t i = 0; i < d; ++i) {
    Complex sum = 0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < d; ++j)
      if (group[j] == group[i]) {
        sum += z[j];
        ++count;
      }
    out[i] = sum / static_cast<double>(count);
    if (count > 1) {
      // an m-fold root is a simple root of the (m-1)-th derivative
      auto dc = c;
      for (std::size_t k = 1; k < count; ++k) dc = derivative(dc);
      for (int iter = 0; iter < 3; ++iter) {
        Complex dp;
        const Complex p = horner(dc, out[i], &dp);
        if (dp == Complex(0)) break;
        const Complex next = out[i] - p / dp;
        if (std::abs(next - out[i]) > 1e-4 * (1 + std::abs(out[i]))) break;
        out[i] = next;
      }
    }
    if (std::abs(out[i].imag()) < 1e-12 * (1 + std::abs(out[i]))) out[i].imag(0);
  }
  std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

double topological_entropy(const Matrix& A) {
  if (A.rows() > 6) throw ConfigError("system matrix larger than 6x6");
  double h = 0;
  for (const auto& l : eigenvalues(A))
    if (std::abs(l) >= 1 - kUnstableMargin) h += std::max(0.0, std::log2(std::abs(l)));
  return h;
}

Matrix observer_gain(const Matrix& A, const Matrix& C, double pole) {
  const Eigen::Index d = A.rows();
  for (Eigen::Index i = 0; i < C.rows(); ++i) {
    Matrix O(d, d);
    Matrix row = C.row(i);
    for (Eigen::Index k = 0; k < d; ++k) {
      O.row(k) = row;
      row = row * A;
    }
    Eigen::FullPivLU<Matrix> lu(O);
    lu.setThreshold(1e-9);
    if (lu.rank() < d) continue;
    Matrix phi = Matrix::Identity(d, d);
    const Matrix shifted = A - pole * Matrix::Identity(d, d);
    for (Eigen::Index k = 0; k < d; ++k) phi = phi * shifted;
    Vector e = Vector::Zero(d);
    e(d - 1) = 1;
    Matrix L = Matrix::Zero(d, C.rows());
    L.col(i) = phi * lu.solve(e);
    return L;
  }
  throw ConfigError("A1: no single output row makes the pair observable; give the observer gain explicitly");
}

std::vector<std::string> check_assumptions(const PlantSpec& p, const std::string& name) {
  std::vector<std::string> notes;
  if (p.A.rows() == 0 || p.A.rows() != p.A.cols()) throw ConfigError(name + ": A must be square and nonempty");
  if (p.A.rows() > 6) throw ConfigError(name + ": A larger than 6x6 is not supported");
  if (p.C.cols() != p.A.cols() || p.C.rows() == 0) throw ConfigError(name + ": C must have as many columns as A");
  require_finite(p.A, name + ": A");
  require_finite(p.C, name + ": C");
  if (p.L) {
    if (p.L->rows() != p.A.rows() || p.L->cols() != p.C.rows())
      throw ConfigError(name + ": observer gain must be " + std::to_string(p.A.rows()) + "x" +
                        std::to_string(p.C.rows()));
    require_finite(*p.L, name + ": L");
  }
  for (double b : {p.v_bound, p.w_bound, p.l})
    if (!std::isfinite(b) || b < 0) throw ConfigError("A2: " + name + " has a negative or non-finite noise/initial bound");

  const Eigen::Index d = p.A.rows();
  Matrix O(d * p.C.rows(), d);
  Matrix block = p.C;
  for (Eigen::Index k = 0; k < d; ++k) {
    O.middleRows(k * p.C.rows(), p.C.rows()) = block;
    block = block * p.A;
  }
  Eigen::FullPivLU<Matrix> lu(O);
  lu.setThreshold(1e-9);
  if (lu.rank() < d) throw ConfigError("A1: " + name + " is not observable");

  const auto eig = eigenvalues(p.A);
  const bool unstable = std::any_of(eig.begin(), eig.end(), [](Complex l) { return std::abs(l) >= 1 - kUnstableMargin; });
  if (!unstable) {
    if (!p.degenerate_stable)
      throw ConfigError("A5: " + name + " has no eigenvalue with |lambda| >= 1 (flag it degenerate_stable to allow)");
    notes.push_back("A5 waived for " + name + " (degenerate_stable)");
  }

  // Jordan blocks of size 3 or more
  const Eigen::MatrixXcd Ac = p.A.cast<Complex>();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(d, d);
  std::vector<Complex> seen;
  for (const auto& l : eig) {
    if (std::any_of(seen.begin(), seen.end(), [&](Complex s) { return std::abs(s - l) < 1e-9; })) continue;
    seen.push_back(l);
    const auto mult = std::count_if(eig.begin(), eig.end(), [&](Complex s) { return std::abs(s - l) < 1e-9; });
    if (mult < 3) continue;
    const Eigen::MatrixXcd N = Ac - l * I;
    const Eigen::MatrixXcd N2 = N * N;
    if (rank_of(N2 * N) < rank_of(N2))
      throw ConfigError(name + ": Jordan blocks larger than 2 are not supported");
  }
  return notes;
}

ObserverStep observer_step(const Vector& xbar, const PlantSpec& p, const Matrix& L, const Vector& y) {
  if (xbar.size() != p.A.rows() || y.size() != p.C.rows() || L.rows() != p.A.rows() || L.cols() != p.C.rows())
    throw ConfigError("observer_step: dimension mismatch");
  ObserverStep s;
  s.innovation = L * (y - p.C * xbar);
  s.next = p.A * xbar + s.innovation;
  return s;
}

NoiseBounds noise_bounds(const PlantSpec& p, const Matrix& L) {
  const Matrix F = p.A - L * p.C;
  Matrix power = Matrix::Identity(F.rows(), F.cols());
  double peak = 0, sum = 0, gamma = 0;
  std::size_t s = 0;
  for (;; ++s) {
    const double nrm = inf_norm(power);
    if (s > 0 && nrm <= 0.5) {
      gamma = nrm;
      break;
    }
    if (s >= 100000) throw NumericalError("observer error dynamics do not contract: A - LC = " + echo(F));
    peak = std::max(peak, nrm);
    sum += nrm;
    power = power * F;
  }
  NoiseBounds b;
  b.observer_error = peak * p.l + sum / (1 - gamma) * (p.v_bound + inf_norm(L) * p.w_bound);
  b.innovation = inf_norm(L) * (inf_norm(p.C) * b.observer_error + p.w_bound);
  return b;
}

ZoomQuantizer::ZoomQuantizer(Matrix AN, Vector margin, std::vector<std::uint64_t> cells, Vector center,
                             Vector rho, double inflate)
    : AN_(std::move(AN)), margin_(std::move(margin)), cells_(std::move(cells)), center_(std::move(center)),
      rho_(std::move(rho)), inflate_(inflate) {
  const auto d = static_cast<std::size_t>(AN_.rows());
  if (cells_.size() != d || margin_.size() != AN_.rows() || center_.size() != AN_.rows() ||
      rho_.size() != AN_.rows())
    throw ConfigError("quantizer dimensions do not match the plant");
  for (auto c : cells_) {
    if (c == 0) throw ConfigError("quantizer needs at least one cell per axis");
    count_ *= c;
  }
  if ((rho_.array() < 0).any() || !rho_.allFinite()) throw ConfigError("quantizer box must have finite nonnegative size");
  absAN_ = AN_.cwiseAbs();
}

std::vector<std::uint64_t> ZoomQuantizer::axis_cells(std::uint64_t index) const {
  std::vector<std::uint64_t> out(cells_.size());
  for (std::size_t a = cells_.size(); a-- > 0;) {
    out[a] = index % cells_[a];
    index /= cells_[a];
  }
  return out;
}

ZoomQuantizer::Result ZoomQuantizer::quantize(const Vector& z) const {
  Result r;
  for (std::size_t a = 0; a < cells_.size(); ++a) {
    const auto i = static_cast<Eigen::Index>(a);
    std::uint64_t idx = 0;
    if (rho_(i) == 0) {
      if (z(i) != center_(i)) r.overflow = true;
    } else {
      const double width = 2 * rho_(i) / static_cast<double>(cells_[a]);
      const double pos = (z(i) - (center_(i) - rho_(i))) / width;
      if (!(pos >= 0)) {
        r.overflow = true;
      } else if (pos > static_cast<double>(cells_[a])) {
        r.overflow = true;
        idx = cells_[a] - 1;
      } else {
        idx = std::min<std::uint64_t>(static_cast<std::uint64_t>(std::floor(pos)), cells_[a] - 1);
      }
    }
    r.index = r.index * cells_[a] + idx;
  }
  return r;
}

Vector ZoomQuantizer::reconstruct(std::uint64_t index) const {
  if (index >= count_) throw ConfigError("quantizer cell index out of range");
  const auto idx = axis_cells(index);
  Vector out = center_;
  for (std::size_t a = 0; a < cells_.size(); ++a) {
    const auto i = static_cast<Eigen::Index>(a);
    if (rho_(i) == 0) continue;
    const double width = 2 * rho_(i) / static_cast<double>(cells_[a]);
    out(i) = center_(i) - rho_(i) + (static_cast<double>(idx[a]) + 0.5) * width;
  }
  return out;
}

void ZoomQuantizer::advance(std::uint64_t index, bool overflow) {
  const Vector mid = reconstruct(index);
  Vector half = rho_;
  for (std::size_t a = 0; a < cells_.size(); ++a) half(static_cast<Eigen::Index>(a)) /= static_cast<double>(cells_[a]);
  center_ = AN_ * mid;
  rho_ = absAN_ * half + margin_;
  if (overflow) rho_ *= inflate_;
}

bool ZoomQuantizer::same_state(const ZoomQuantizer& o) const {
  return center_.size() == o.center_.size() && (center_.array() == o.center_.array()).all() &&
         (rho_.array() == o.rho_.array()).all();
}

std::size_t default_window(std::size_t horizon, std::size_t n) {
  return n * std::max<std::size_t>(1, horizon / (50 * n));
}

namespace {

struct PlantRuntime {
  const PlantSpec* spec = nullptr;
  Matrix L;
  NoiseBounds bounds;
  std::vector<Matrix> powers;  // A^0 .. A^(2N)
  std::vector<Vector> ramp;    // ramp[t] = sum_{j<t} |A^j| * 1, t <= 2N
  Vector x, xbar, base;        // true state, observer, decoder reconstruction
  std::size_t base_time = 0;
  bool have_base = false;
  Vector delta;          // cell half-lengths of the block being decoded
  bool block_overflow = false;
  Vector pending, pending_delta;
  bool pending_overflow = false;
  std::mt19937_64 proc, meas;
};

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id), 0x5eedu};
  return std::mt19937_64(seq);
}

Vector uniform_vector(std::mt19937_64& g, Eigen::Index n, double radius) {
  Vector v(n);
  std::uniform_real_distribution<double> u(-radius, radius);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = radius > 0 ? std::clamp(u(g), -radius, radius) : 0.0;
  return v;
}

}  // namespace

SimTrace run_simulation(const SimConfig& cfg, const mac::MacSpec& m, const zec::ZeCode& code, std::uint64_t seed) {
  if (m.num_users() != 2) throw ConfigError("the three-plant architecture needs a two-user MAC");
  code.validate(m);
  if (cfg.horizon == 0) throw ConfigError("horizon must be positive");
  if (!(cfg.inflate >= 1)) throw ConfigError("overflow inflation factor must be at least 1");
  const std::size_t N = code.n;
  const zec::Decoder decoder(code, m);

  SimTrace trace;
  trace.seed = seed;
  trace.n = N;
  std::array<PlantRuntime, 3> rt;
  std::vector<ZoomQuantizer> enc, dec;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& p = cfg.plants[i];
    const std::string name = "plant " + std::to_string(i);
    auto notes = check_assumptions(p, name);
    trace.notes.insert(trace.notes.end(), notes.begin(), notes.end());
    auto& r = rt[i];
    r.spec = &p;
    r.L = p.L ? *p.L : observer_gain(p.A, p.C);
    double sprad = 0;
    for (const auto& l : eigenvalues(p.A - r.L * p.C)) sprad = std::max(sprad, std::abs(l));
    if (sprad >= 1) throw ConfigError(name + ": observer gain does not stabilize A - LC");
    r.bounds = noise_bounds(p, r.L);

    const Eigen::Index d = p.A.rows();
    r.powers.push_back(Matrix::Identity(d, d));
    for (std::size_t j = 1; j <= 2 * N; ++j) r.powers.push_back(r.powers.back() * p.A);
    r.ramp.push_back(Vector::Zero(d));
    for (std::size_t j = 0; j < 2 * N; ++j) r.ramp.push_back(r.ramp.back() + r.powers[j].cwiseAbs() * Vector::Ones(d));

    std::uint64_t cells = 1;
    if (cfg.cells[i].size() != static_cast<std::size_t>(d))
      throw ConfigError(name + ": quantizer needs one cell count per state coordinate");
    for (auto c : cfg.cells[i]) cells *= c;
    if (cells != code.w_max[i])
      throw ConfigError(name + ": quantizer has " + std::to_string(cells) + " cells but the code carries " +
                        std::to_string(code.w_max[i]) + " messages");

    const Matrix& AN = r.powers[N];
    // A^N applied to the innovations of one block, seen one block later
    Vector margin = Vector::Zero(d);
    for (std::size_t xi = 0; xi < N; ++xi) margin += r.powers[2 * N - 1 - xi].cwiseAbs() * Vector::Ones(d);
    margin *= r.bounds.innovation;

    double rho0 = margin.maxCoeff();
    Matrix contraction = AN.cwiseAbs();
    for (Eigen::Index a = 0; a < d; ++a) contraction.col(a) /= static_cast<double>(cfg.cells[i][static_cast<std::size_t>(a)]);
    const double kappa = inf_norm(contraction);
    if (kappa < 1) rho0 = margin.maxCoeff() / (1 - kappa);
    if (cfg.rho0[i]) rho0 = *cfg.rho0[i];
    enc.emplace_back(AN, margin, cfg.cells[i], Vector::Zero(d), Vector::Constant(d, rho0), cfg.inflate);
    dec.push_back(enc.back());

    std::mt19937_64 init = stream(seed, 3 * i + 2);
    r.x = uniform_vector(init, d, p.l);
    r.xbar = Vector::Zero(d);
    r.proc = stream(seed, 3 * i);
    r.meas = stream(seed, 3 * i + 1);

    auto& pt = trace.plants[i];
    pt.h = topological_entropy(p.A);
    pt.error.reserve(cfg.horizon);
    pt.envelope.reserve(cfg.horizon);
    pt.overflow.reserve(cfg.horizon);
  }
  std::mt19937_64 channel = stream(seed, 9);
  std::uniform_int_distribution<std::uint32_t> noise(0, m.noise_size() - 1);

  for (std::size_t t = 0; t < cfg.horizon; ++t) {
    if (t % N == 0 && t > 0) {
      for (std::size_t i = 0; i < 3; ++i) {
        auto& r = rt[i];
        r.base = r.pending;
        r.base_time = t;
        r.have_base = true;
        r.delta = r.pending_delta;
        r.block_overflow = r.pending_overflow;
        // recentre on the decoder's estimate
        const Vector s = r.base;
        r.x -= s;
        r.xbar -= s;
        r.base.setZero();
        const Vector moved = r.powers[N] * s;
        enc[i].shift(moved);
        dec[i].shift(moved);
      }
    }
    // estimates and errors at time t
    for (std::size_t i = 0; i < 3; ++i) {
      auto& r = rt[i];
      auto& pt = trace.plants[i];
      const auto d = r.x.size();
      Vector xhat;
      double env;
      if (!r.have_base) {
        xhat = Vector::Zero(d);
        const Vector b = r.powers.size() > t ? Vector(r.powers[t].cwiseAbs() * Vector::Ones(d) * r.spec->l +
                                                      r.ramp[t] * r.spec->v_bound)
                                             : Vector::Constant(d, std::numeric_limits<double>::infinity());
        env = b.maxCoeff();
      } else {
        const std::size_t lag = t - r.base_time;
        xhat = r.powers[lag] * r.base;
        if (r.block_overflow) {
          env = std::numeric_limits<double>::infinity();
        } else {
          const Vector b = r.powers[lag].cwiseAbs() * r.delta + r.ramp[N + lag] * r.bounds.innovation;
          env = b.maxCoeff() + r.bounds.observer_error;
        }
      }
      const double err = (xhat - r.x).lpNorm<Eigen::Infinity>();
      pt.error.push_back(err);
      pt.envelope.push_back(env);
      if (err > env * (1 + 1e-9) + 1e-12) ++pt.envelope_violations;
      if (pt.state.size() < 200000) {
        pt.state.push_back(r.x);
        pt.estimate.push_back(xhat);
      }
    }

    if (t % N == 0) {
      zec::Messages msg(3);
      std::array<bool, 3> over{};
      for (std::size_t i = 0; i < 3; ++i) {
        const Vector z = rt[i].powers[N] * rt[i].xbar;
        const auto q = enc[i].quantize(z);
        msg[i] = q.index;
        over[i] = q.overflow;
      }
      const auto cw = code.encode(msg);
      std::vector<mac::Block> xs;
      for (std::size_t j = 0; j < 2; ++j) xs.push_back(mac::SequenceSpace(m.input_size(j), N).block(cw[j]));
      std::uint64_t y = 0;
      for (std::size_t k = 0; k < N; ++k) {
        const std::uint32_t sym[2] = {xs[0][k], xs[1][k]};
        y = y * m.output_size() + m.apply(sym, noise(channel));
      }
      const auto got = decoder.decode(y);
      if (got != msg) throw InvariantError("zero-error code delivered a wrong message");
      trace.messages.push_back(got);
      for (std::size_t i = 0; i < 3; ++i) {
        auto& r = rt[i];
        r.pending = dec[i].reconstruct(got[i]);
        Vector half = dec[i].rho();
        for (Eigen::Index a = 0; a < half.size(); ++a) half(a) /= static_cast<double>(cfg.cells[i][static_cast<std::size_t>(a)]);
        r.pending_delta = half;
        r.pending_overflow = over[i];
        enc[i].advance(msg[i], over[i]);
        dec[i].advance(got[i], over[i]);  // the overflow flag travels as side information
        if (!enc[i].same_state(dec[i])) trace.boxes_in_sync = false;
      }
      for (std::size_t i = 0; i < 3; ++i) {
        auto& pt = trace.plants[i];
        for (std::size_t k = 0; k < N && t + k < cfg.horizon; ++k) pt.overflow.push_back(over[i] ? 1 : 0);
      }
    }

    // observers see y(t), plants advance
    for (auto& r : rt) {
      const auto& p = *r.spec;
      const Vector y = p.C * r.x + uniform_vector(r.meas, p.C.rows(), p.w_bound);
      r.xbar = observer_step(r.xbar, p, r.L, y).next;
      r.x = p.A * r.x + uniform_vector(r.proc, p.A.rows(), p.v_bound);
    }
  }
  return trace;
}

std::array<PlantDiagnosis, 3> diagnose(const SimTrace& t, const SimConfig& cfg) {
  std::array<PlantDiagnosis, 3> out;
  const std::size_t T = t.plants[0].error.size();
  const std::size_t W = cfg.window ? cfg.window : default_window(T, t.n);
  const auto transient_steps = static_cast<std::size_t>(std::ceil(cfg.transient_fraction * static_cast<double>(T)));
  const std::size_t first = (transient_steps + W - 1) / W;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& pt = t.plants[i];
    auto& d = out[i];
    for (std::size_t s = 0; s < T; ++s) {
      d.sup_error = std::max(d.sup_error, pt.error[s]);
      if (s >= transient_steps) {
        d.sup_error_after_transient = std::max(d.sup_error_after_transient, pt.error[s]);
        if (s % t.n == 0 && pt.overflow[s]) ++d.overflow_after_transient;
      }
    }
    for (std::size_t w = 0; (w + 1) * W <= T; ++w) {
      double e = 0, env = 0;
      for (std::size_t s = w * W; s < (w + 1) * W; ++s) {
        e = std::max(e, pt.error[s]);
        env = std::max(env, pt.envelope[s]);
      }
      d.window_max.push_back(e);
      d.envelope_window_max.push_back(env);
    }
    d.envelope_non_increasing = true;
    d.literal_non_increasing = true;
    for (std::size_t w = first; w + 1 < d.window_max.size(); ++w) {
      const double a = d.envelope_window_max[w], b = d.envelope_window_max[w + 1];
      if (!(std::isfinite(b) && b <= a * (1 + 1e-12))) d.envelope_non_increasing = false;
      if (d.window_max[w + 1] > d.window_max[w]) d.literal_non_increasing = false;
    }
    if (first < d.envelope_window_max.size() && !std::isfinite(d.envelope_window_max[first]))
      d.envelope_non_increasing = false;
    d.within_envelope = pt.envelope_violations == 0;
    d.bounded = d.envelope_non_increasing && d.within_envelope && d.overflow_after_transient == 0;

    // least squares slope of log2(window max) against window end time
    double sx = 0, sy = 0, sxx = 0, sxy = 0, k = 0;
    for (std::size_t w = 0; w < d.window_max.size(); ++w) {
      const double v = d.window_max[w];
      if (!(v > 0) || v > cfg.growth_guard) continue;
      const double x = static_cast<double>((w + 1) * W), y = std::log2(v);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++k;
    }
    if (k >= 2 && k * sxx - sx * sx > 0) d.growth_ratio = std::exp2((k * sxy - sx * sy) / (k * sxx - sx * sx));
  }
  return out;
}

}  // namespace zecmac::est

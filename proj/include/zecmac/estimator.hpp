#pragma once

// Three LTI plants estimated over a zero-error MAC. Plant 0 is seen by both
// encoders and carried by the common message; plants 1 and 2 are private to
// encoders 1 and 2. Each encoder runs a Luenberger observer, downsamples by
// the code blocklength N and quantizes the N-step prediction with a zooming
// box quantizer; the decoder mirrors the box and holds A^r times the last
// reconstruction between blocks.

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zecmac/mac_model.hpp"
#include "zecmac/zec.hpp"

namespace zecmac::est {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct PlantSpec {
  Matrix A;
  Matrix C;
  double v_bound = 0;  // process noise, infinity-norm radius
  double w_bound = 0;  // measurement noise radius
  double l = 0;        // initial state radius
  bool degenerate_stable = false;
  std::optional<Matrix> L;  // observer gain; chosen automatically when absent
};

// Eigenvalues from the characteristic polynomial (Faddeev-LeVerrier) and
// Aberth iteration; roots closer than 1e-4 (relative) are merged and the
// merged root is refined on the matching derivative of the polynomial.
// Throws NumericalError if the iteration does not converge.
std::vector<std::complex<double>> eigenvalues(const Matrix& A);

// Coefficients c_0..c_d of det(sI - A) = s^d + c_{d-1}s^{d-1} + ... + c_0.
std::vector<double> characteristic_polynomial(const Matrix& A);

// Eigenvalues with |lambda| >= 1 - 1e-12 count as unstable.
constexpr double kUnstableMargin = 1e-12;
double topological_entropy(const Matrix& A);

// Luenberger gain by Ackermann's formula on the first output row that makes
// the pair observable, all observer poles at `pole`.
Matrix observer_gain(const Matrix& A, const Matrix& C, double pole = 0.25);

// Checks A1, A2, A5 and the Jordan block restriction; throws ConfigError
// whose message starts with the assumption label. Returns notes for waived
// assumptions.
std::vector<std::string> check_assumptions(const PlantSpec& p, const std::string& name);

struct ObserverStep {
  Vector next;        // A xbar + L (y - C xbar)
  Vector innovation;  // L (y - C xbar)
};
ObserverStep observer_step(const Vector& xbar, const PlantSpec& p, const Matrix& L, const Vector& y);

// Bounds used by the quantizer: sup of the observer error and of the
// innovation, both infinity norms.
struct NoiseBounds {
  double observer_error = 0;
  double innovation = 0;
};
NoiseBounds noise_bounds(const PlantSpec& p, const Matrix& L);

// Uniform grid on a box (center c, half-lengths rho) with cells[a] cells on
// axis a. Cell ids are mixed radix, axis 0 most significant. A point on a
// cell boundary goes to the upper cell; points outside are saturated to the
// edge cell and flagged.
class ZoomQuantizer {
 public:
  ZoomQuantizer(Matrix AN, Vector margin, std::vector<std::uint64_t> cells, Vector center, Vector rho,
                double inflate = 4.0);

  struct Result {
    std::uint64_t index = 0;
    bool overflow = false;
  };
  Result quantize(const Vector& z) const;
  Vector reconstruct(std::uint64_t index) const;

  // Box for the next block: center A^N * midpoint, half-lengths
  // |A^N| * (rho / cells) + margin, times `inflate` after an overflow.
  void advance(std::uint64_t index, bool overflow);

  // Moves the box by -delta (change of coordinates; cell ids are unchanged).
  void shift(const Vector& delta) { center_ -= delta; }

  std::uint64_t cell_count() const noexcept { return count_; }
  const Vector& center() const noexcept { return center_; }
  const Vector& rho() const noexcept { return rho_; }
  const Vector& margin() const noexcept { return margin_; }
  bool same_state(const ZoomQuantizer& o) const;

 private:
  std::vector<std::uint64_t> axis_cells(std::uint64_t index) const;

  Matrix AN_;
  Matrix absAN_;
  Vector margin_;
  std::vector<std::uint64_t> cells_;
  std::uint64_t count_ = 1;
  Vector center_;
  Vector rho_;
  double inflate_;
};

struct SimConfig {
  std::array<PlantSpec, 3> plants;
  std::array<std::vector<std::uint64_t>, 3> cells;  // per plant, per axis
  std::size_t horizon = 1000;
  std::vector<std::uint64_t> seeds{1};
  double inflate = 4.0;
  double transient_fraction = 0.1;
  std::size_t window = 0;  // 0: chosen from horizon and blocklength
  std::array<std::optional<double>, 3> rho0;
  double growth_guard = 1e150;
};

struct PlantTrace {
  std::vector<double> error;     // |Xhat(t) - X(t)|_inf
  std::vector<double> envelope;  // certified bound on error(t)
  std::vector<std::uint8_t> overflow;  // per step, set on the block whose encoding overflowed
  // Relative to the decoder's estimate at the start of the current block;
  // see run_simulation.
  std::vector<Vector> state;
  std::vector<Vector> estimate;
  std::size_t envelope_violations = 0;
  double h = 0;
};

struct SimTrace {
  std::uint64_t seed = 0;
  std::size_t n = 1;
  std::array<PlantTrace, 3> plants;
  std::vector<zec::Messages> messages;  // per block
  bool boxes_in_sync = true;
  std::vector<std::string> notes;
};

// States of unstable plants grow without bound while the error does not, so
// the run is carried out in coordinates centred on the decoder's estimate at
// each block start (known to encoder and decoder alike). Every operation is
// translation equivariant, so messages and errors are those of the original
// coordinates without the loss of absolute precision.
SimTrace run_simulation(const SimConfig& cfg, const mac::MacSpec& m, const zec::ZeCode& code,
                        std::uint64_t seed);

struct PlantDiagnosis {
  double sup_error = 0;
  double sup_error_after_transient = 0;
  std::vector<double> window_max;
  std::vector<double> envelope_window_max;
  std::size_t overflow_after_transient = 0;
  bool envelope_non_increasing = false;
  bool within_envelope = false;
  bool literal_non_increasing = false;  // observed window maxima themselves
  bool bounded = false;
  double growth_ratio = 1;  // 2^slope of log2(window max) per step
};

std::size_t default_window(std::size_t horizon, std::size_t n);
std::array<PlantDiagnosis, 3> diagnose(const SimTrace& t, const SimConfig& cfg);

}  // namespace zecmac::est

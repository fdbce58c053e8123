#pragma once

// Channel, codes and plant configurations for the estimation experiments.

#include <cmath>

#include "mac_fixtures.hpp"
#include "zecmac/estimator.hpp"
#include "zecmac/zec.hpp"

namespace zecmac::testing {

inline est::PlantSpec scalar_plant(double a, double v = 0, double w = 0, double l = 0, bool degenerate = false) {
  est::PlantSpec p;
  p.A = est::Matrix::Constant(1, 1, a);
  p.C = est::Matrix::Constant(1, 1, 1.0);
  p.v_bound = v;
  p.w_bound = w;
  p.l = l;
  p.degenerate_stable = degenerate;
  return p;
}

// Unit codes of the noiseless binary adder at blocklength 1.
inline zec::ZeCode adder_unit_code(std::size_t which) {
  const auto m = binary_adder();
  std::vector<uv::Tuple> support;
  if (which == 0) support = {{0, 0, 0}, {1, 1, 1}};  // X1 = X2 = U, outputs 0 and 2
  if (which == 1) support = {{0, 0, 0}, {0, 1, 0}};
  if (which == 2) support = {{0, 0, 0}, {0, 0, 1}};
  const auto nu = which == 0 ? 2u : 1u;
  return zec::construct_code(mac::make_input_process(m, 1, true, nu, support), m);
}

// One block of each unit code: blocklength 3, one bit per message.
inline zec::ZeCode adder_third_each() {
  const auto m = binary_adder();
  const auto ab = zec::time_share(m, adder_unit_code(0), m, adder_unit_code(1), 1, 1);
  return zec::time_share(m, ab, m, adder_unit_code(2), 1, 1);
}

// h = (1/4, 1/4, 1/4) against one bit per three channel uses each.
inline est::SimConfig sufficiency_config(std::size_t horizon = 10000) {
  est::SimConfig c;
  const double a = std::exp2(0.25);
  for (auto& p : c.plants) p = scalar_plant(a, 0.05, 0.05, 1.0);
  c.cells = {{{2}, {2}, {2}}};
  c.horizon = horizon;
  return c;
}

// Private plant with h = 2 and one bit per channel use; the others are
// stable and carried by single-cell quantizers.
inline est::SimConfig starvation_config(std::size_t horizon = 100) {
  est::SimConfig c;
  c.plants = {scalar_plant(0.5, 0.01, 0.01, 1.0, true), scalar_plant(4.0, 0.01, 0.01, 1.0),
              scalar_plant(0.5, 0.01, 0.01, 1.0, true)};
  c.cells = {{{1}, {2}, {1}}};
  c.horizon = horizon;
  c.window = 2;
  return c;
}

inline est::SimConfig zero_noise_config(std::size_t horizon = 1000) {
  auto c = sufficiency_config(horizon);
  for (auto& p : c.plants) p = scalar_plant(std::exp2(0.25));
  return c;
}

}  // namespace zecmac::testing

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "misobc/linalg.hpp"

namespace misobc {

// Truncated uniform quantizer with unit step. trunc(x) = x on
// [-eta_bar, eta_bar] and 0 otherwise; reconstruction level is the
// midpoint bracket [x] = floor(x) + 1/2, applied per real dimension.
struct QuantizerSpec {
  double eta_bar = 1.0;

  // eta_bar = p^{(1+zeta)/2} * sigma, floored at 1/2 so the codec stays
  // well defined when the estimate is nearly perfect
  static QuantizerSpec for_power(double p, double zeta, double sigma);
};

struct QuantResult {
  cplx eta_hat{};
  cplx xi{};       // eta - eta_hat
  bool in_range = false;
};

QuantResult quantize(cplx eta, const QuantizerSpec& spec);

// 4 * log2(2 * ceil(eta_bar)) bits for the four real dimensions
double bit_budget(const QuantizerSpec& spec);

// number of midpoint levels per real dimension: 2 * ceil(eta_bar)
long grid_levels(const QuantizerSpec& spec);
// fixed index width in bits: ceil(log2(grid_levels))
int index_width_bits(const QuantizerSpec& spec);

// Quantized interference pair with the integer grid indices that get
// multicast. Index order: (Re eta1, Im eta1, Re eta2, Im eta2), counting
// midpoints from -ceil(eta_bar)+1/2 upward.
struct QuantizedInterference {
  cplx eta_hat1{};
  cplx eta_hat2{};
  std::array<long, 4> indices{};
  double total_bits = 0.0;
};

QuantizedInterference quantize_pair(cplx eta1, cplx eta2,
                                    const QuantizerSpec& spec);

// Fixed-width big-endian packing of the 4 indices, MSB first, zero padded
// to a whole number of bytes.
std::vector<std::uint8_t> encode_indices(const QuantizedInterference& q,
                                         const QuantizerSpec& spec);
QuantizedInterference decode_indices(const std::vector<std::uint8_t>& bytes,
                                     const QuantizerSpec& spec);

}  // namespace misobc

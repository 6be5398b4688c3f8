#include "misobc/quantizer.hpp"

#include <cmath>
#include <stdexcept>

#include "misobc/errors.hpp"

namespace misobc {

namespace {

void check_spec(const QuantizerSpec& spec) {
  if (!(spec.eta_bar > 0.0) || !std::isfinite(spec.eta_bar))
    throw std::invalid_argument("quantizer: eta_bar must be positive finite");
}

double trunc_to_range(double x, double eta_bar) {
  return (x >= -eta_bar && x <= eta_bar) ? x : 0.0;
}

// midpoint bracket [x] = floor(x) + 1/2
double bracket(double x) { return std::floor(x) + 0.5; }

long index_of(double midpoint_value, long levels, double eta_bar) {
  const double ceil_eta = std::ceil(eta_bar);
  const double idx = midpoint_value + ceil_eta - 0.5;
  const long i = std::lround(idx);
  if (std::abs(idx - static_cast<double>(i)) > 1e-9 || i < 0 || i >= levels)
    throw std::invalid_argument("quantizer codec: value not on the in-range grid");
  return i;
}

double value_of(long index, double eta_bar) {
  return static_cast<double>(index) - std::ceil(eta_bar) + 0.5;
}

}  // namespace

QuantizerSpec QuantizerSpec::for_power(double p, double zeta, double sigma) {
  if (!(p > 1.0)) throw std::domain_error("quantizer: p must be > 1");
  if (!(zeta > 0.0)) throw std::domain_error("quantizer: zeta must be > 0");
  if (!(sigma >= 0.0)) throw std::domain_error("quantizer: sigma must be >= 0");
  QuantizerSpec spec;
  spec.eta_bar = std::max(std::pow(p, 0.5 * (1.0 + zeta)) * sigma, 0.5);
  return spec;
}

QuantResult quantize(cplx eta, const QuantizerSpec& spec) {
  check_spec(spec);
  const double re = eta.real();
  const double im = eta.imag();
  QuantResult out;
  out.in_range = (re >= -spec.eta_bar && re <= spec.eta_bar) &&
                 (im >= -spec.eta_bar && im <= spec.eta_bar);
  out.eta_hat = {bracket(trunc_to_range(re, spec.eta_bar)),
                 bracket(trunc_to_range(im, spec.eta_bar))};
  out.xi = eta - out.eta_hat;
  return out;
}

double bit_budget(const QuantizerSpec& spec) {
  check_spec(spec);
  if (spec.eta_bar < 0.5)
    throw std::domain_error("bit_budget: degenerate range (eta_bar < 1/2)");
  return 4.0 * std::log2(2.0 * std::ceil(spec.eta_bar));
}

long grid_levels(const QuantizerSpec& spec) {
  check_spec(spec);
  return 2L * static_cast<long>(std::ceil(spec.eta_bar));
}

int index_width_bits(const QuantizerSpec& spec) {
  const long levels = grid_levels(spec);
  int w = 0;
  while ((1L << w) < levels) ++w;
  return w == 0 ? 1 : w;
}

QuantizedInterference quantize_pair(cplx eta1, cplx eta2,
                                    const QuantizerSpec& spec) {
  const QuantResult r1 = quantize(eta1, spec);
  const QuantResult r2 = quantize(eta2, spec);
  const long levels = grid_levels(spec);
  QuantizedInterference q;
  q.eta_hat1 = r1.eta_hat;
  q.eta_hat2 = r2.eta_hat;
  q.indices = {index_of(r1.eta_hat.real(), levels, spec.eta_bar),
               index_of(r1.eta_hat.imag(), levels, spec.eta_bar),
               index_of(r2.eta_hat.real(), levels, spec.eta_bar),
               index_of(r2.eta_hat.imag(), levels, spec.eta_bar)};
  q.total_bits = bit_budget(spec);
  return q;
}

std::vector<std::uint8_t> encode_indices(const QuantizedInterference& q,
                                         const QuantizerSpec& spec) {
  const long levels = grid_levels(spec);
  const int w = index_width_bits(spec);
  const std::size_t nbits = 4u * static_cast<std::size_t>(w);
  std::vector<std::uint8_t> bytes((nbits + 7) / 8, 0);
  std::size_t bit = 0;
  for (int k = 0; k < 4; ++k) {
    const long idx = q.indices[static_cast<std::size_t>(k)];
    if (idx < 0 || idx >= levels)
      throw std::invalid_argument("encode_indices: index out of grid");
    const double expected = (k % 2 == 0)
        ? (k == 0 ? q.eta_hat1.real() : q.eta_hat2.real())
        : (k == 1 ? q.eta_hat1.imag() : q.eta_hat2.imag());
    if (std::abs(value_of(idx, spec.eta_bar) - expected) > 1e-9)
      throw std::invalid_argument("encode_indices: value not on the grid");
    for (int b = w - 1; b >= 0; --b, ++bit) {
      if ((idx >> b) & 1L) bytes[bit / 8] |= static_cast<std::uint8_t>(0x80u >> (bit % 8));
    }
  }
  return bytes;
}

QuantizedInterference decode_indices(const std::vector<std::uint8_t>& bytes,
                                     const QuantizerSpec& spec) {
  const long levels = grid_levels(spec);
  const int w = index_width_bits(spec);
  const std::size_t nbits = 4u * static_cast<std::size_t>(w);
  if (bytes.size() != (nbits + 7) / 8)
    throw FormatError("decode_indices: wrong bit-string length");
  QuantizedInterference q;
  std::size_t bit = 0;
  for (int k = 0; k < 4; ++k) {
    long idx = 0;
    for (int b = 0; b < w; ++b, ++bit) {
      idx = (idx << 1) |
            ((bytes[bit / 8] >> (7 - bit % 8)) & 1u);
    }
    if (idx >= levels) throw FormatError("decode_indices: index out of grid");
    q.indices[static_cast<std::size_t>(k)] = idx;
  }
  // trailing pad bits must be zero
  for (; bit < bytes.size() * 8; ++bit)
    if ((bytes[bit / 8] >> (7 - bit % 8)) & 1u)
      throw FormatError("decode_indices: nonzero padding");
  q.eta_hat1 = {value_of(q.indices[0], spec.eta_bar),
                value_of(q.indices[1], spec.eta_bar)};
  q.eta_hat2 = {value_of(q.indices[2], spec.eta_bar),
                value_of(q.indices[3], spec.eta_bar)};
  q.total_bits = bit_budget(spec);
  return q;
}

}  // namespace misobc

#include "misobc/quantizer.hpp"

#include <cmath>
#include <stdexcept>

#include "misobc/errors.hpp"
#include "misobc/rng.hpp"
#include "testutil.hpp"

using namespace misobc;

namespace {

void test_midpoint_law() {
  const QuantizerSpec spec{10.0};
  const QuantResult q = quantize({0.7, -1.2}, spec);
  CHECK_NEAR(q.eta_hat.real(), 0.5, 1e-15, "[0.7] = 0.5");
  CHECK_NEAR(q.eta_hat.imag(), -1.5, 1e-15, "[-1.2] = -1.5");
  CHECK_NEAR(q.xi.real(), 0.2, 1e-12, "xi real");
  CHECK_NEAR(q.xi.imag(), 0.3, 1e-12, "xi imag");
  CHECK(q.in_range, "0.7 - 1.2i in range");

  // the bracket maps an exact zero (and truncated values) to +0.5
  const QuantResult z = quantize({0.0, 0.0}, spec);
  CHECK_NEAR(z.eta_hat.real(), 0.5, 1e-15, "[0] = 0.5 real");
  CHECK_NEAR(z.eta_hat.imag(), 0.5, 1e-15, "[0] = 0.5 imag");

  // out of range: trunc -> 0 -> 0.5, flag cleared
  const QuantResult oor = quantize({25.0, 0.25}, spec);
  CHECK(!oor.in_range, "out of range flagged");
  CHECK_NEAR(oor.eta_hat.real(), 0.5, 1e-15, "trunc to 0 then bracket");
}

void test_quantization_noise_moments() {
  const QuantizerSpec spec{10.0};
  Rng rng(0x66);
  double worst = 0.0, mean_sq = 0.0;
  const std::size_t n = 1000000;
  for (std::size_t it = 0; it < n; ++it) {
    const cplx eta = {spec.eta_bar * (2.0 * rng.uniform() - 1.0),
                      spec.eta_bar * (2.0 * rng.uniform() - 1.0)};
    const QuantResult q = quantize(eta, spec);
    CHECK(q.in_range, "uniform draw in range");
    worst = std::max({worst, std::abs(q.xi.real()), std::abs(q.xi.imag())});
    mean_sq += std::norm(q.xi);
  }
  mean_sq /= static_cast<double>(n);
  CHECK(worst <= 0.5 + 1e-12, "per-dimension error bounded by 1/2");
  CHECK_NEAR(mean_sq, 1.0 / 6.0, 0.01 / 6.0, "mean |xi|^2 = 1/6 within 1%");
}

void test_bit_budget() {
  CHECK_NEAR(bit_budget(QuantizerSpec{8.0}), 16.0, 1e-12, "eta_bar 8 -> 16 bits");
  CHECK_NEAR(bit_budget(QuantizerSpec{0.5}), 4.0, 1e-12, "eta_bar 0.5 -> 4 bits");
  CHECK_THROWS(bit_budget(QuantizerSpec{0.4}), std::domain_error,
               "degenerate range rejected");

  // approximation 4 + 2(1+zeta-alpha) log2 P within the ceil slack
  const double p = 1e4, zeta = 0.1, alpha = 0.5;
  const QuantizerSpec spec =
      QuantizerSpec::for_power(p, zeta, std::pow(p, -alpha / 2.0));
  const double exact = bit_budget(spec);
  const double approx = 4.0 + 2.0 * (1.0 + zeta - alpha) * std::log2(p);
  CHECK(std::abs(exact - approx) <= 4.0, "budget within 4 bits of approximation");
}

void test_budget_approximation_sweep() {
  for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0})
    for (double db = 30.0; db <= 60.0 + 1e-9; db += 5.0) {
      const double p = std::pow(10.0, db / 10.0);
      const double zeta = 0.1;
      const QuantizerSpec spec =
          QuantizerSpec::for_power(p, zeta, std::pow(p, -alpha / 2.0));
      const double approx = 4.0 + 2.0 * (1.0 + zeta - alpha) * std::log2(p);
      CHECK(std::abs(bit_budget(spec) - approx) <= 4.0,
            "ceil slack bounded across the sweep");
    }
}

void test_codec_round_trip() {
  const QuantizerSpec spec{8.0};
  CHECK(grid_levels(spec) == 16, "16 levels per dimension");
  CHECK(index_width_bits(spec) == 4, "4-bit indices");

  // endpoint mapping
  QuantizedInterference lo = quantize_pair({-7.5, -7.5}, {-7.5, -7.5}, spec);
  CHECK(lo.indices[0] == 0 && lo.indices[3] == 0, "-7.5 -> index 0");
  QuantizedInterference hi = quantize_pair({7.5, 7.5}, {7.5, 7.5}, spec);
  CHECK(hi.indices[0] == 15 && hi.indices[3] == 15, "+7.5 -> index 15");

  Rng rng(0x77);
  bool ok = true;
  for (int it = 0; it < 100000 && ok; ++it) {
    const auto draw = [&rng, &spec]() -> cplx {
      const double span = static_cast<double>(grid_levels(spec));
      return {std::floor(span * rng.uniform()) - span / 2.0 + 0.5,
              std::floor(span * rng.uniform()) - span / 2.0 + 0.5};
    };
    const QuantizedInterference q = quantize_pair(draw(), draw(), spec);
    const auto bytes = encode_indices(q, spec);
    CHECK(bytes.size() * 8 >= 16u && bytes.size() == 2u,
          "4x4 bits packs into 2 bytes");
    const QuantizedInterference back = decode_indices(bytes, spec);
    ok = back.indices == q.indices && back.eta_hat1 == q.eta_hat1 &&
         back.eta_hat2 == q.eta_hat2;
  }
  CHECK(ok, "codec round-trip identity");

  // declared width across specs
  for (double eta_bar : {0.5, 1.0, 3.0, 8.0, 100.0, 1234.5}) {
    const QuantizerSpec s{eta_bar};
    const QuantizedInterference q = quantize_pair({0.5, 0.5}, {0.5, 0.5}, s);
    const auto bytes = encode_indices(q, s);
    const std::size_t nbits = 4u * static_cast<std::size_t>(index_width_bits(s));
    CHECK(bytes.size() == (nbits + 7) / 8, "encoded length matches 4*width");
  }
}

void test_codec_errors() {
  const QuantizerSpec spec{8.0};
  QuantizedInterference q = quantize_pair({0.5, 0.5}, {0.5, 0.5}, spec);
  q.indices[2] = 99;
  CHECK_THROWS(encode_indices(q, spec), std::invalid_argument,
               "off-grid index rejected");
  QuantizedInterference offgrid = quantize_pair({0.5, 0.5}, {0.5, 0.5}, spec);
  offgrid.eta_hat1 = {0.25, 0.5};  // not a midpoint
  CHECK_THROWS(encode_indices(offgrid, spec), std::invalid_argument,
               "off-grid value rejected");

  const auto bytes = encode_indices(quantize_pair({0.5, 0.5}, {0.5, 0.5}, spec), spec);
  auto longer = bytes;
  longer.push_back(0);
  CHECK_THROWS(decode_indices(longer, spec), FormatError, "wrong length rejected");
}

}  // namespace

int main() {
  test_midpoint_law();
  test_quantization_noise_moments();
  test_bit_budget();
  test_budget_approximation_sweep();
  test_codec_round_trip();
  test_codec_errors();
  return testutil::finish("test_quantizer");
}

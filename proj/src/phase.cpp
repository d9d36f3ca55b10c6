#include "osc/phase.hpp"

#include <cmath>
#include <cstdio>

namespace osc {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

int PhasePolynomial::degree() const {
  for (int j = static_cast<int>(a.size()) - 1; j >= 0; --j)
    if (a[static_cast<std::size_t>(j)] != 0.0) return j;
  return -1;
}

std::string PhasePolynomial::describe() const {
  if (a.empty()) return "0";
  std::string out;
  char buf[40];
  for (std::size_t j = 0; j < a.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", a[j]);
    if (j) out += ';';
    out += buf;
  }
  return out;
}

std::complex<double> e2pi(double t) {
  double w = t - std::floor(t);
  return {std::cos(kTwoPi * w), std::sin(kTwoPi * w)};
}

double phase_mod1(const PhasePolynomial& p, std::uint64_t n) {
  double acc = 0.0;
  Int npow(1);
  Int nz;
  mpz_set_ui(nz.get_mpz_t(), n);
  for (std::size_t j = 0; j < p.a.size(); ++j) {
    if (j) npow *= nz;
    if (p.a[j] != 0.0) acc += dyadic_mod1(p.a[j], npow);
  }
  acc -= std::floor(acc);
  if (acc >= 1.0) acc = 0.0;
  return acc;
}

double binom_phase_mod1(const std::vector<double>& thetas, std::uint64_t n) {
  double acc = 0.0;
  for (std::size_t j = 0; j < thetas.size(); ++j) {
    if (thetas[j] == 0.0) continue;
    acc += dyadic_mod1(thetas[j], binomial_int(n, j));
  }
  acc -= std::floor(acc);
  if (acc >= 1.0) acc = 0.0;
  return acc;
}

std::uint64_t phasor_resync_interval(int degree) {
  if (degree <= 1) return 4096;
  if (degree == 2) return 64;
  if (degree == 3) return 16;
  return 8;  // C(8, d) shrinks again for d >= 4, so 8 covers all higher degrees
}

PhasorStream::PhasorStream(PhasePolynomial p, std::uint64_t n0,
                           std::uint64_t stride, std::uint64_t resync_every)
    : p_(std::move(p)),
      n_(n0),
      stride_(stride == 0 ? 1 : stride),
      resync_every_(resync_every == 0 ? 4096 : resync_every) {
  int deg = p_.degree();
  z_.assign(static_cast<std::size_t>(deg < 0 ? 0 : deg) + 1, {1.0, 0.0});
  resync();
}

void PhasorStream::advance() {
  n_ += stride_;
  ++steps_since_resync_;
  if (steps_since_resync_ >= resync_every_) {
    resync();
    return;
  }
  // z_j <- z_j * z_{j+1}, ascending so each update reads the old z_{j+1}
  for (std::size_t j = 0; j + 1 < z_.size(); ++j) z_[j] *= z_[j + 1];
}

void PhasorStream::resync() {
  steps_since_resync_ = 0;
  // difference table of exact phases at n, n+s, ..., n+deg*s, reduced mod 1
  std::size_t m = z_.size();
  std::vector<double> ph(m);
  for (std::size_t i = 0; i < m; ++i)
    ph[i] = phase_mod1(p_, n_ + static_cast<std::uint64_t>(i) * stride_);
  for (std::size_t j = 0; j < m; ++j) {
    z_[j] = e2pi(ph[0]);
    // in-place forward difference: ph[i] <- ph[i+1] - ph[i]
    for (std::size_t i = 0; i + 1 + j < m; ++i) ph[i] = ph[i + 1] - ph[i];
  }
}

}  // namespace osc

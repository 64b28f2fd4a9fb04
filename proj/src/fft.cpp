#include "dopfocus/fft.hpp"

#include <fftw3.h>

#include <cmath>

#include <map>
#include <mutex>
#include <utility>

namespace dopfocus {

double wrap_doppler(double nu, double pri) {
  const double period = kTwoPi / pri;
  double r = std::fmod(nu + 0.5 * period, period);
  if (r < 0) r += period;
  double out = r - 0.5 * period;
  if (out >= 0.5 * period) out -= period;
  return out;
}

double wrap_delay(double tau, double pri) {
  double r = std::fmod(tau, pri);
  if (r < 0) r += pri;
  if (r >= pri) r -= pri;
  return r;
}

namespace fft {
namespace {

std::mutex plan_mutex;
std::map<std::pair<std::size_t, int>, fftw_plan> plans;

fftw_plan plan_for(std::size_t n, int sign) {
  std::lock_guard lock(plan_mutex);
  auto key = std::make_pair(n, sign);
  if (auto it = plans.find(key); it != plans.end()) return it->second;
  // Planning needs a scratch buffer; FFTW_ESTIMATE never touches its contents.
  auto* buf = fftw_alloc_complex(n);
  fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  plans.emplace(key, p);
  return p;
}

void run(std::span<cplx> data, int sign) {
  if (data.empty()) return;
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan_for(data.size(), sign), ptr, ptr);
}

}  // namespace

void forward(std::span<cplx> data) { run(data, FFTW_FORWARD); }
void inverse(std::span<cplx> data) { run(data, FFTW_BACKWARD); }

}  // namespace fft
}  // namespace dopfocus

#include <fftw3.h>

#include <mutex>

#include "ehrenfest/errors.hpp"
#include "ehrenfest/spectral_grid.hpp"
#include "split_step.hpp"

namespace ehrenfest {
namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct FourierTransform::Impl {
  std::size_t n = 0;
  fftw_complex* data = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (data) fftw_free(data);
  }
};

FourierTransform::FourierTransform(const Grid& grid) : impl_(std::make_unique<Impl>()) {
  impl_->n = grid.size();
  std::lock_guard lock(planner_mutex());
  impl_->data = fftw_alloc_complex(impl_->n);
  if (!impl_->data) throw std::bad_alloc();
  if (grid.dimension() == 1) {
    const int n0 = static_cast<int>(grid.axis(0).points);
    impl_->fwd = fftw_plan_dft_1d(n0, impl_->data, impl_->data, FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->bwd = fftw_plan_dft_1d(n0, impl_->data, impl_->data, FFTW_BACKWARD, FFTW_ESTIMATE);
  } else {
    const int n0 = static_cast<int>(grid.axis(0).points);
    const int n1 = static_cast<int>(grid.axis(1).points);
    impl_->fwd = fftw_plan_dft_2d(n0, n1, impl_->data, impl_->data, FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->bwd = fftw_plan_dft_2d(n0, n1, impl_->data, impl_->data, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (!impl_->fwd || !impl_->bwd) throw ConfigError("FFTW plan creation failed");
}

FourierTransform::~FourierTransform() = default;
FourierTransform::FourierTransform(FourierTransform&&) noexcept = default;
FourierTransform& FourierTransform::operator=(FourierTransform&&) noexcept = default;

std::span<complex> FourierTransform::buffer() noexcept {
  return {reinterpret_cast<complex*>(impl_->data), impl_->n};
}

void FourierTransform::forward() noexcept { fftw_execute(impl_->fwd); }
void FourierTransform::backward() noexcept { fftw_execute(impl_->bwd); }

namespace detail {

struct ExtendedFourier::Impl {
  std::size_t n = 0;
  fftwl_complex* data = nullptr;
  fftwl_plan fwd = nullptr;
  fftwl_plan bwd = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftwl_destroy_plan(fwd);
    if (bwd) fftwl_destroy_plan(bwd);
    if (data) fftwl_free(data);
  }
};

ExtendedFourier::ExtendedFourier(const Grid& grid) : impl_(std::make_unique<Impl>()) {
  impl_->n = grid.size();
  std::lock_guard lock(planner_mutex());
  impl_->data = fftwl_alloc_complex(impl_->n);
  if (!impl_->data) throw std::bad_alloc();
  const int n0 = static_cast<int>(grid.axis(0).points);
  if (grid.dimension() == 1) {
    impl_->fwd = fftwl_plan_dft_1d(n0, impl_->data, impl_->data, FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->bwd = fftwl_plan_dft_1d(n0, impl_->data, impl_->data, FFTW_BACKWARD, FFTW_ESTIMATE);
  } else {
    const int n1 = static_cast<int>(grid.axis(1).points);
    impl_->fwd = fftwl_plan_dft_2d(n0, n1, impl_->data, impl_->data, FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->bwd = fftwl_plan_dft_2d(n0, n1, impl_->data, impl_->data, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (!impl_->fwd || !impl_->bwd) throw ConfigError("FFTW plan creation failed");
}

ExtendedFourier::~ExtendedFourier() = default;

std::span<xcomplex> ExtendedFourier::buffer() noexcept {
  return {reinterpret_cast<xcomplex*>(impl_->data), impl_->n};
}

void ExtendedFourier::forward() noexcept { fftwl_execute(impl_->fwd); }
void ExtendedFourier::backward() noexcept { fftwl_execute(impl_->bwd); }

}  // namespace detail

}  // namespace ehrenfest

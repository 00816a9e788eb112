//! Float-math shim for `no_std` builds.
//!
//! The primitive `f64` transcendental methods live in `std`, not `core`, so
//! every call site in this crate goes through this extension trait, which
//! delegates to `libm`. This keeps results bit-identical across platforms as
//! a side effect: `libm` is pure Rust and carries no fast-math flags.

// In test builds `std` is linked and its inherent f64 methods win, so the
// shim looks dead there; product builds use it on every call site.
#[cfg_attr(test, allow(dead_code))]
pub(crate) trait FloatExt {
    fn exp(self) -> f64;
    fn ln(self) -> f64;
    fn ln_1p(self) -> f64;
    fn sqrt(self) -> f64;
    fn powf(self, p: f64) -> f64;
    fn cos(self) -> f64;
    fn sin(self) -> f64;
    fn floor(self) -> f64;
    fn round(self) -> f64;
    fn fmin(self, other: f64) -> f64;
    fn fmax(self, other: f64) -> f64;
}

impl FloatExt for f64 {
    #[inline]
    fn exp(self) -> f64 {
        libm::exp(self)
    }
    #[inline]
    fn ln(self) -> f64 {
        libm::log(self)
    }
    #[inline]
    fn ln_1p(self) -> f64 {
        libm::log1p(self)
    }
    #[inline]
    fn sqrt(self) -> f64 {
        libm::sqrt(self)
    }
    #[inline]
    fn powf(self, p: f64) -> f64 {
        libm::pow(self, p)
    }
    #[inline]
    fn cos(self) -> f64 {
        libm::cos(self)
    }
    #[inline]
    fn sin(self) -> f64 {
        libm::sin(self)
    }
    #[inline]
    fn floor(self) -> f64 {
        libm::floor(self)
    }
    #[inline]
    fn round(self) -> f64 {
        libm::round(self)
    }
    #[inline]
    fn fmin(self, other: f64) -> f64 {
        libm::fmin(self, other)
    }
    #[inline]
    fn fmax(self, other: f64) -> f64 {
        libm::fmax(self, other)
    }
}

/// Natural log of 2π, used by every Gaussian density in the crate.
pub(crate) const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// 2π for Box–Muller.
pub(crate) const TWO_PI: f64 = 6.283_185_307_179_586;

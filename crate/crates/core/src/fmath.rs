//! Float math shims usable with and without `std`.
//!
//! `sqrt` is correctly rounded by IEEE 754, so the `std` and `libm` paths
//! produce identical bits. The transcendental functions always go through
//! `libm` so generated data does not depend on the build flavor.

pub fn sqrt(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.sqrt()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::sqrt(x)
    }
}

pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

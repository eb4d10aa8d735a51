//! C ABI over the contextlab library.
//!
//! Conventions, mirrored in the generated `include/contextlab.h`:
//!
//! * every function returns a [`CtxStatus`]; outputs go through pointers that
//!   are written only on `CTX_STATUS_OK`;
//! * 3x3 complex matrices are passed as two caller-owned `double[9]` buffers
//!   (real and imaginary parts, row-major);
//! * orthogonality diagrams live behind the opaque [`CtxDiagram`] handle,
//!   created and released by this library;
//! * strings returned by the library must be released with
//!   [`ctxlab_string_free`], never with `free(3)`;
//! * panics never unwind across the boundary - they are caught and reported
//!   as `CTX_STATUS_INTERNAL`.

use std::ffi::{CString, c_char};
use std::panic::{AssertUnwindSafe, catch_unwind};

use contextlab::epr;
use contextlab::ks::{self, DiagramFormat, OrthogonalityDiagram, Ray};
use contextlab::matrix::ComplexMatrix;
use contextlab::spin::{self, PolarDirection};

/// Result of every call in this interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtxStatus {
    /// The call succeeded and all outputs are valid.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was rejected (out of range, non-finite, degenerate, ...).
    InvalidArgument = 2,
    /// Text input could not be parsed.
    ParseError = 3,
    /// A panic or other library bug; outputs are untouched.
    Internal = 4,
}

/// Residuals of the operator identities at one azimuth; see
/// `contextlab::spin::IdentityReport` for the meaning of each field.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CtxIdentityReport {
    pub phi: f64,
    pub base_commutators: f64,
    pub rotated_commutators: f64,
    pub idempotence: f64,
    pub sum_rule_base: f64,
    pub sum_rule_rotated: f64,
    pub cross_third: f64,
    pub cross_first: f64,
}

/// Outcome of a colorability search over a diagram.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CtxCertificate {
    /// True iff at least one two-valued measure exists.
    pub colorable: bool,
    /// Total number of two-valued measures (the search is exhaustive).
    pub measure_count: u64,
    /// Search-tree nodes visited; deterministic for a given diagram.
    pub nodes_explored: u64,
}

/// Rendering formats accepted by [`ctxlab_diagram_render`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CtxDiagramFormat {
    Dot = 0,
    Ascii = 1,
    Json = 2,
}

/// Opaque handle to an orthogonality diagram.
pub struct CtxDiagram {
    inner: OrthogonalityDiagram,
}

/// Runs `f`, converting a panic into [`CtxStatus::Internal`] instead of
/// unwinding into the caller.
fn guarded(f: impl FnOnce() -> CtxStatus) -> CtxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => CtxStatus::Internal,
    }
}

/// Copies a 3x3 matrix into the caller's re/im buffers.
///
/// # Safety
/// `re` and `im` must point to writable `double[9]` buffers.
unsafe fn write_matrix(m: &ComplexMatrix, re: *mut f64, im: *mut f64) {
    for (k, entry) in m.entries().iter().enumerate() {
        unsafe {
            *re.add(k) = entry.re;
            *im.add(k) = entry.im;
        }
    }
}

/// Version of the library, as a static NUL-terminated string. Never null;
/// do not free.
#[no_mangle]
pub extern "C" fn ctxlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Spin-1 operator for the direction with polar angle `theta` (in [0, pi])
/// and azimuth `phi` (wrapped into [0, 2 pi)), written to `re`/`im`.
///
/// # Safety
/// `re` and `im` must point to writable `double[9]` buffers.
#[no_mangle]
pub unsafe extern "C" fn ctxlab_spin_matrix(
    theta: f64,
    phi: f64,
    re: *mut f64,
    im: *mut f64,
) -> CtxStatus {
    if re.is_null() || im.is_null() {
        return CtxStatus::NullPointer;
    }
    guarded(|| match PolarDirection::with_wrapped_phi(theta, phi) {
        Ok(dir) => {
            let observable = spin::spin_matrix(dir);
            unsafe { write_matrix(observable.matrix(), re, im) };
            CtxStatus::Ok
        }
        Err(_) => CtxStatus::InvalidArgument,
    })
}

/// Squared spin component (`component` is 1, 2 or 3) of the orthogonal triple
/// at azimuth `phi`, written to `re`/`im`.
///
/// # Safety
/// `re` and `im` must point to writable `double[9]` buffers.
#[no_mangle]
pub unsafe extern "C" fn ctxlab_squared_spin(
    component: u32,
    phi: f64,
    re: *mut f64,
    im: *mut f64,
) -> CtxStatus {
    if re.is_null() || im.is_null() {
        return CtxStatus::NullPointer;
    }
    if !phi.is_finite() {
        return CtxStatus::InvalidArgument;
    }
    guarded(|| {
        let triple = spin::squared_spin_triple(phi);
        match triple.component(component as usize) {
            Ok(observable) => {
                unsafe { write_matrix(observable.matrix(), re, im) };
                CtxStatus::Ok
            }
            Err(_) => CtxStatus::InvalidArgument,
        }
    })
}

/// Maximal operator `a J1^2 + b J2^2 + c J3^2` of the triple at azimuth
/// `phi`, written to `re`/`im`. The weights must be pairwise distinct.
///
/// # Safety
/// `re` and `im` must point to writable `double[9]` buffers.
#[no_mangle]
pub unsafe extern "C" fn ctxlab_maximal_operator(
    phi: f64,
    a: f64,
    b: f64,
    c: f64,
    re: *mut f64,
    im: *mut f64,
) -> CtxStatus {
    if re.is_null() || im.is_null() {
        return CtxStatus::NullPointer;
    }
    guarded(|| match spin::maximal_operator(phi, a, b, c) {
        Ok(u) => {
            unsafe { write_matrix(u.matrix(), re, im) };
            CtxStatus::Ok
        }
        Err(_) => CtxStatus::InvalidArgument,
    })
}

/// Squared spin component recovered from the maximal operator at azimuth
/// `phi` by polynomial reconstruction, written to `re`/`im`. Equals the
/// direct construction of [`ctxlab_squared_spin`] to working precision.
///
/// # Safety
/// `re` and `im` must point to writable `double[9]` buffers.
#[no_mangle]
pub unsafe extern "C" fn ctxlab_reconstruct_component(
    phi: f64,
    a: f64,
    b: f64,
    c: f64,
    component: u32,
    re: *mut f64,
    im: *mut f64,
) -> CtxStatus {
    if re.is_null() || im.is_null() {
        return CtxStatus::NullPointer;
    }
    guarded(|| {
        let u = match spin::maximal_operator(phi, a, b, c) {
            Ok(u) => u,
            Err(_) => return CtxStatus::InvalidArgument,
        };
        match spin::reconstruct_component(&u, component as usize) {
            Ok(matrix) => {
                unsafe { write_matrix(&matrix, re, im) };
                CtxStatus::Ok
            }
            Err(_) => CtxStatus::InvalidArgument,
        }
    })
}

/// Residuals of the operator identities at azimuth `phi`.
///
/// # Safety
/// `out` must point to a writable `CtxIdentityReport`.
#[no_mangle]
pub unsafe extern "C" fn ctxlab_verify_identities(
    phi: f64,
    out: *mut CtxIdentityReport,
) -> CtxStatus {
    if out.is_null() {
        return CtxStatus::NullPointer;
    }
    if !phi.is_finite() {
        return CtxStatus::InvalidArgument;
    }
    guarded(|| {
        let report = spin::verify_identities(phi);
        unsafe {
            *out = CtxIdentityReport {
                phi: report.phi,
                base_commutators: report.base_commutators,
                rotated_commutators: report.rotated_commutators,
                idempotence: report.idempotence,
                sum_rule_base: report.sum_rule_base,
                sum_rule_rotated: report.sum_rule_rotated,
                cross_third: report.cross_third,
                cross_first: report.cross_first,
            };
        }
        CtxStatus::Ok
    })
}

/// Exact correlation of the dichotomic readings at relative azimuth `phi`,
/// with the default weights. Identically 1 for every azimuth.
///
/// # Safety
/// `out` must point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn ctxlab_exact_correlation(phi: f64, out: *mut f64) -> CtxStatus {
    if out.is_null() {
        return CtxStatus::NullPointer;
    }
    if !phi.is_finite() {
        return CtxStatus::InvalidArgument;
    }
    guarded(|| {
        unsafe { *out = epr::exact_correlation(phi) };
        CtxStatus::Ok
    })
}

/// Sample-mean correlation over `shots` simulated measurement pairs drawn
/// with the deterministic generator seeded from `seed`. `shots` must be
/// positive.
///
/// # Safety
/// `out` must point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn ctxlab_estimate_correlation(
    phi: f64,
    shots: u64,
    seed: u64,
    out: *mut f64,
) -> CtxStatus {
    if out.is_null() {
        return CtxStatus::NullPointer;
    }
    if !phi.is_finite() {
        return CtxStatus::InvalidArgument;
    }
    guarded(|| {
        let (a, b, c) = spin::DEFAULT_COEFFS;
        let dist = match epr::joint_distribution(0.0, phi, [a, b, c], [a, b, c]) {
            Ok(dist) => dist,
            Err(_) => return CtxStatus::InvalidArgument,
        };
        let records = match epr::sample_records(&dist, shots, seed) {
            Ok(records) => records,
            Err(_) => return CtxStatus::InvalidArgument,
        };
        match epr::estimate_correlation(&records) {
            Ok(estimate) => {
                unsafe { *out = estimate };
                CtxStatus::Ok
            }
            Err(_) => CtxStatus::InvalidArgument,
        }
    })
}

/// Correlation predicted by the strawman context-flipping model with the
/// given flip rate in [0, 1].
///
/// # Safety
/// `out` must point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn ctxlab_toy_correlation(
    phi: f64,
    flip_rate: f64,
    out: *mut f64,
) -> CtxStatus {
    if out.is_null() {
        return CtxStatus::NullPointer;
    }
    guarded(|| match epr::toy_contextual_correlation(phi, flip_rate) {
        Ok(c) => {
            unsafe { *out = c };
            CtxStatus::Ok
        }
        Err(_) => CtxStatus::InvalidArgument,
    })
}

/// Joint outcome distribution of the contexts at azimuths `phi_left` and
/// `phi_right` (default weights on both sides), written to `probs` as a
/// row-major `double[9]`: rows index the left outcome level in ascending
/// order, columns the right one.
///
/// # Safety
/// `probs` must point to a writable `double[9]` buffer.
#[no_mangle]
pub unsafe extern "C" fn ctxlab_joint_distribution(
    phi_left: f64,
    phi_right: f64,
    probs: *mut f64,
) -> CtxStatus {
    if probs.is_null() {
        return CtxStatus::NullPointer;
    }
    if !phi_left.is_finite() || !phi_right.is_finite() {
        return CtxStatus::InvalidArgument;
    }
    guarded(|| {
        let (a, b, c) = spin::DEFAULT_COEFFS;
        match epr::joint_distribution(phi_left, phi_right, [a, b, c], [a, b, c]) {
            Ok(dist) => {
                for i in 0..3 {
                    for j in 0..3 {
                        unsafe { *probs.add(3 * i + j) = dist.probs[i][j] };
                    }
                }
                CtxStatus::Ok
            }
            Err(_) => CtxStatus::InvalidArgument,
        }
    })
}

/// Hands a boxed diagram to the caller through `out`.
fn export_diagram(diagram: OrthogonalityDiagram, out: *mut *mut CtxDiagram) -> CtxStatus {
    let handle = Box::new(CtxDiagram { inner: diagram });
    unsafe { *out = Box::into_raw(handle) };
    CtxStatus::Ok
}

/// Two orthogonal triples sharing their third ray, the second rotated by
/// `phi` about it. Multiples of pi/2 are rejected as degenerate. The handle
/// must be released with [`ctxlab_diagram_free`].
///
/// # Safety
/// `out` must point to a writable `CtxDiagram*`.
#[no_mangle]
pub unsafe extern "C" fn ctxlab_diagram_two_tripods(
    phi: f64,
    out: *mut *mut CtxDiagram,
) -> CtxStatus {
    if out.is_null() {
        return CtxStatus::NullPointer;
    }
    guarded(|| match ks::two_tripod_diagram(phi) {
        Ok(diagram) => export_diagram(diagram, out),
        Err(_) => CtxStatus::InvalidArgument,
    })
}

/// The seventeen-direction set; with `closed` true, its closure under cross
/// products of orthogonal pairs (the noncolorable 57-ray diagram). The
/// handle must be released with [`ctxlab_diagram_free`].
///
/// # Safety
/// `out` must point to a writable `CtxDiagram*`.
#[no_mangle]
pub unsafe extern "C" fn ctxlab_diagram_peres(closed: bool, out: *mut *mut CtxDiagram) -> CtxStatus {
    if out.is_null() {
        return CtxStatus::NullPointer;
    }
    guarded(|| {
        let rays = ks::peres_directions();
        let diagram = if closed {
            ks::orthogonality_closure(&rays)
        } else {
            OrthogonalityDiagram::from_rays(rays)
        };
        export_diagram(diagram, out)
    })
}

/// Builds a diagram from `ray_count` directions given as consecutive
/// (x, y, z) triples; duplicates (up to sign and scale) are merged. With
/// `close` true the set is first closed under cross products of orthogonal
/// pairs. The handle must be released with [`ctxlab_diagram_free`].
///
/// # Safety
/// `xyz` must point to a readable `double[3 * ray_count]`; `out` must point
/// to a writable `CtxDiagram*`.
#[no_mangle]
pub unsafe extern "C" fn ctxlab_diagram_from_rays(
    xyz: *const f64,
    ray_count: usize,
    close: bool,
    out: *mut *mut CtxDiagram,
) -> CtxStatus {
    if xyz.is_null() || out.is_null() {
        return CtxStatus::NullPointer;
    }
    if ray_count == 0 {
        return CtxStatus::InvalidArgument;
    }
    guarded(|| {
        let mut rays = Vec::with_capacity(ray_count);
        for k in 0..ray_count {
            let (x, y, z) = unsafe { (*xyz.add(3 * k), *xyz.add(3 * k + 1), *xyz.add(3 * k + 2)) };
            match Ray::new(x, y, z) {
                Ok(ray) => rays.push(ray),
                Err(_) => return CtxStatus::InvalidArgument,
            }
        }
        let diagram = if close {
            ks::orthogonality_closure(&rays)
        } else {
            OrthogonalityDiagram::from_rays(rays)
        };
        export_diagram(diagram, out)
    })
}

/// Number of rays in the diagram; 0 if the handle is null.
///
/// # Safety
/// `diagram` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ctxlab_diagram_ray_count(diagram: *const CtxDiagram) -> usize {
    if diagram.is_null() {
        return 0;
    }
    unsafe { &*diagram }.inner.ray_count()
}

/// Number of three-ray contexts in the diagram; 0 if the handle is null.
///
/// # Safety
/// `diagram` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ctxlab_diagram_context_count(diagram: *const CtxDiagram) -> usize {
    if diagram.is_null() {
        return 0;
    }
    unsafe { &*diagram }.inner.triads().len()
}

/// Exhaustive colorability search; fills `out` with the verdict, the total
/// number of two-valued measures and the node count of the search.
///
/// # Safety
/// `diagram` must be a live handle from this library; `out` must point to a
/// writable `CtxCertificate`.
#[no_mangle]
pub unsafe extern "C" fn ctxlab_diagram_check(
    diagram: *const CtxDiagram,
    out: *mut CtxCertificate,
) -> CtxStatus {
    if diagram.is_null() || out.is_null() {
        return CtxStatus::NullPointer;
    }
    guarded(|| {
        let certificate = ks::is_colorable(&unsafe { &*diagram }.inner);
        unsafe {
            *out = CtxCertificate {
                colorable: certificate.colorable,
                measure_count: certificate.measure_count,
                nodes_explored: certificate.nodes_explored,
            };
        }
        CtxStatus::Ok
    })
}

/// Renders the diagram in the requested format. On success `*out` holds a
/// NUL-terminated string owned by the library; release it with
/// [`ctxlab_string_free`].
///
/// # Safety
/// `diagram` must be a live handle from this library; `out` must point to a
/// writable `char*`.
#[no_mangle]
pub unsafe extern "C" fn ctxlab_diagram_render(
    diagram: *const CtxDiagram,
    format: CtxDiagramFormat,
    out: *mut *mut c_char,
) -> CtxStatus {
    if diagram.is_null() || out.is_null() {
        return CtxStatus::NullPointer;
    }
    guarded(|| {
        let format = match format {
            CtxDiagramFormat::Dot => DiagramFormat::Dot,
            CtxDiagramFormat::Ascii => DiagramFormat::Ascii,
            CtxDiagramFormat::Json => DiagramFormat::Json,
        };
        let text = ks::greechie_emit(&unsafe { &*diagram }.inner, format);
        match CString::new(text) {
            Ok(string) => {
                unsafe { *out = string.into_raw() };
                CtxStatus::Ok
            }
            // The renderers never emit interior NULs; reaching this is a bug.
            Err(_) => CtxStatus::Internal,
        }
    })
}

/// Releases a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must be null or a pointer obtained from [`ctxlab_diagram_render`]
/// that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn ctxlab_string_free(s: *mut c_char) {
    if s.is_null() {
        return;
    }
    drop(unsafe { CString::from_raw(s) });
}

/// Releases a diagram handle. Null is a no-op.
///
/// # Safety
/// `diagram` must be null or a pointer obtained from a `ctxlab_diagram_*`
/// constructor that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn ctxlab_diagram_free(diagram: *mut CtxDiagram) {
    if diagram.is_null() {
        return;
    }
    drop(unsafe { Box::from_raw(diagram) });
}

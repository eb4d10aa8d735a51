//! Spin-1 observables and their squared-operator algebra.
//!
//! The building block is the spin component `S(theta, phi)` along a unit
//! direction given in polar coordinates. Three mutually orthogonal
//! directions (a "tripod") give three components whose squares commute, are
//! idempotent, and sum to twice the identity - so the squares form a context
//! of three compatible yes/no observables, of which exactly one reads 0 and
//! two read 1. Rotating the tripod by an azimuth `phi` about the third axis
//! yields a second context that shares its third squared component with the
//! first but is incompatible with the rest of it.
//!
//! A weighted sum of the three squares with pairwise distinct weights is a
//! nondegenerate ("maximal") operator: measuring it resolves the whole
//! context at once. [`maximal_operator`] builds it in closed form, and
//! [`reconstruct_component`] recovers each squared component as a polynomial
//! in the maximal operator alone, which is the algebraic heart of the
//! counterfactual arguments explored by the `epr` module.

use serde::Serialize;
use thiserror::Error;

use crate::matrix::{C64, ComplexMatrix, MatrixError, SpectralDecomposition};

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2, TAU};

/// Default weights for the maximal operator on the left side of a
/// correlation experiment. Any pairwise distinct triple works; these small
/// integers keep the spectrum (5, 7, 8) easy to recognize in output.
pub const DEFAULT_COEFFS: (f64, f64, f64) = (2.0, 3.0, 5.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpinError {
    #[error("{name} = {value} is not finite")]
    NonFinite { name: &'static str, value: f64 },
    #[error("polar angle theta = {theta} lies outside [0, pi]")]
    ThetaOutOfRange { theta: f64 },
    #[error("azimuthal angle phi = {phi} lies outside [0, 2*pi)")]
    PhiOutOfRange { phi: f64 },
    #[error("direction ({x1}, {x2}, {x3}) is not unit length (|x|^2 deviates by {deviation:.3e})")]
    NotUnitLength {
        x1: f64,
        x2: f64,
        x3: f64,
        deviation: f64,
    },
    #[error("weights (a, b, c) = ({a}, {b}, {c}) must be pairwise distinct")]
    DegenerateWeights { a: f64, b: f64, c: f64 },
    #[error("spin component index {0} is not one of 1, 2, 3")]
    InvalidComponent(usize),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Measurement direction in polar coordinates: `theta` from the positive
/// third axis, `phi` the azimuth in the 1-2 plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarDirection {
    theta: f64,
    phi: f64,
}

impl PolarDirection {
    pub fn new(theta: f64, phi: f64) -> Result<Self, SpinError> {
        if !theta.is_finite() {
            return Err(SpinError::NonFinite {
                name: "theta",
                value: theta,
            });
        }
        if !phi.is_finite() {
            return Err(SpinError::NonFinite {
                name: "phi",
                value: phi,
            });
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(SpinError::ThetaOutOfRange { theta });
        }
        if !(0.0..TAU).contains(&phi) {
            return Err(SpinError::PhiOutOfRange { phi });
        }
        Ok(PolarDirection { theta, phi })
    }

    /// Like [`Self::new`] but reduces the azimuth into `[0, 2*pi)` first, so
    /// callers may pass accumulated angles such as `phi + pi/2`.
    pub fn with_wrapped_phi(theta: f64, phi: f64) -> Result<Self, SpinError> {
        if !phi.is_finite() {
            return Err(SpinError::NonFinite {
                name: "phi",
                value: phi,
            });
        }
        let mut wrapped = phi.rem_euclid(TAU);
        // rem_euclid can return TAU itself when phi is a tiny negative number.
        if wrapped >= TAU {
            wrapped = 0.0;
        }
        Self::new(theta, wrapped)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Measurement direction as a unit vector in Cartesian components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianDirection {
    x1: f64,
    x2: f64,
    x3: f64,
}

impl CartesianDirection {
    /// Tolerance on `|x|^2 - 1` accepted by [`Self::new`]. Directions derived
    /// from polar angles are unit to machine precision; this only rejects
    /// genuinely non-normalized input.
    pub const UNIT_TOL: f64 = 1e-12;

    pub fn new(x1: f64, x2: f64, x3: f64) -> Result<Self, SpinError> {
        for (name, value) in [("x1", x1), ("x2", x2), ("x3", x3)] {
            if !value.is_finite() {
                return Err(SpinError::NonFinite { name, value });
            }
        }
        let deviation = (x1 * x1 + x2 * x2 + x3 * x3 - 1.0).abs();
        if deviation > Self::UNIT_TOL {
            return Err(SpinError::NotUnitLength {
                x1,
                x2,
                x3,
                deviation,
            });
        }
        Ok(CartesianDirection { x1, x2, x3 })
    }

    pub fn components(&self) -> (f64, f64, f64) {
        (self.x1, self.x2, self.x3)
    }
}

/// A Hermitian operator together with its spectral decomposition, computed
/// once at construction.
#[derive(Debug, Clone)]
pub struct Observable {
    matrix: ComplexMatrix,
    spectrum: SpectralDecomposition,
}

impl Observable {
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self, MatrixError> {
        let spectrum = matrix.eig_hermitian()?;
        Ok(Observable { matrix, spectrum })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        self.spectrum.eigenvalues()
    }
}

/// Spin-1 component along a polar direction:
///
/// ```text
///                 [ cos(t)              e^{-ip} sin(t)/sqrt(2)   0                     ]
/// S(t, p)  =      [ e^{ip} sin(t)/sqrt(2)   0                    e^{-ip} sin(t)/sqrt(2) ]
///                 [ 0                   e^{ip} sin(t)/sqrt(2)   -cos(t)                ]
/// ```
///
/// The matrix is Hermitian by construction (the conjugate pairs are built
/// from the same floats), so the spectral decomposition always succeeds.
pub fn spin_matrix(dir: PolarDirection) -> Observable {
    let ct = dir.theta.cos();
    let f = dir.theta.sin() / SQRT_2;
    let e_plus = C64::new(dir.phi.cos(), dir.phi.sin());
    let e_minus = e_plus.conj();
    let zero = C64::new(0.0, 0.0);
    let matrix = ComplexMatrix::new(
        3,
        3,
        vec![
            C64::new(ct, 0.0),
            e_minus * f,
            zero,
            e_plus * f,
            zero,
            e_minus * f,
            zero,
            e_plus * f,
            C64::new(-ct, 0.0),
        ],
    )
    .expect("3x3 literal");
    Observable::from_matrix(matrix).expect("spin matrix is Hermitian by construction")
}

/// Spin-1 component along a Cartesian unit vector, assembled as
/// `x1*J1 + x2*J2 + x3*J3` from the three axis components. Agrees with
/// [`spin_matrix`] on the corresponding polar direction.
pub fn spin_along(dir: CartesianDirection) -> Observable {
    let j1 = axis_component(FRAC_PI_2, 0.0);
    let j2 = axis_component(FRAC_PI_2, FRAC_PI_2);
    let j3 = axis_component(0.0, 0.0);
    let matrix = j1
        .scale_re(dir.x1)
        .add(&j2.scale_re(dir.x2))
        .and_then(|m| m.add(&j3.scale_re(dir.x3)))
        .expect("axis components share a shape");
    Observable::from_matrix(matrix).expect("real combination of Hermitian matrices")
}

fn axis_component(theta: f64, phi: f64) -> ComplexMatrix {
    let dir = PolarDirection::new(theta, phi).expect("axis angles are in range");
    spin_matrix(dir).matrix().clone()
}

/// The squared spin components of the orthogonal tripod at azimuth `phi`:
/// the tripod directions are `(pi/2, phi)`, `(pi/2, phi + pi/2)` and the
/// third axis. Each square is a projector-complement with spectrum {0, 1, 1},
/// the three commute pairwise, and they sum to twice the identity.
#[derive(Debug, Clone)]
pub struct SquaredSpinTriple {
    phi: f64,
    j1sq: Observable,
    j2sq: Observable,
    j3sq: Observable,
}

impl SquaredSpinTriple {
    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn first(&self) -> &Observable {
        &self.j1sq
    }

    pub fn second(&self) -> &Observable {
        &self.j2sq
    }

    pub fn third(&self) -> &Observable {
        &self.j3sq
    }

    pub fn members(&self) -> [&Observable; 3] {
        [&self.j1sq, &self.j2sq, &self.j3sq]
    }

    pub fn component(&self, index: usize) -> Result<&Observable, SpinError> {
        match index {
            1 => Ok(&self.j1sq),
            2 => Ok(&self.j2sq),
            3 => Ok(&self.j3sq),
            other => Err(SpinError::InvalidComponent(other)),
        }
    }

    /// `J1^2 + J2^2 + J3^2`; equals `2 * I` up to rounding.
    pub fn sum(&self) -> ComplexMatrix {
        self.j1sq
            .matrix()
            .add(self.j2sq.matrix())
            .and_then(|m| m.add(self.j3sq.matrix()))
            .expect("triple members share a shape")
    }
}

/// Builds the squared-component context at azimuth `phi` (any finite value;
/// the angle is reduced modulo `2*pi` internally).
///
/// # Panics
/// Panics if `phi` is not finite.
pub fn squared_spin_triple(phi: f64) -> SquaredSpinTriple {
    assert!(phi.is_finite(), "squared_spin_triple: phi must be finite");
    let j1 = spin_matrix(
        PolarDirection::with_wrapped_phi(FRAC_PI_2, phi).expect("finite wrapped azimuth"),
    );
    let j2 = spin_matrix(
        PolarDirection::with_wrapped_phi(FRAC_PI_2, phi + FRAC_PI_2).expect("finite wrapped azimuth"),
    );
    let j3 = spin_matrix(PolarDirection::new(0.0, 0.0).expect("third axis"));
    let square = |obs: &Observable| {
        let m = obs.matrix();
        let sq = m.mat_mul(m).expect("square of a 3x3 matrix");
        Observable::from_matrix(sq).expect("square of a Hermitian matrix is Hermitian")
    };
    SquaredSpinTriple {
        phi,
        j1sq: square(&j1),
        j2sq: square(&j2),
        j3sq: square(&j3),
    }
}

/// Nondegenerate weighted sum `a*J1^2 + b*J2^2 + c*J3^2` over the tripod at
/// azimuth `phi`, held in closed form:
///
/// ```text
///          1  [ a+b+2c            0         (a-b) e^{-2ip} ]
/// U(p) =  ---  [ 0                 2(a+b)    0              ]
///          2  [ (a-b) e^{2ip}     0         a+b+2c          ]
/// ```
///
/// Its simple spectrum is `{a+b, a+c, b+c}`; measuring `U` therefore reads
/// off all three squared components at once. The closed form keeps the four
/// structurally zero entries exactly zero, which downstream sampling relies
/// on.
#[derive(Debug, Clone)]
pub struct MaximalOperator {
    phi: f64,
    a: f64,
    b: f64,
    c: f64,
    matrix: ComplexMatrix,
    spectrum: SpectralDecomposition,
}

impl MaximalOperator {
    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// The weights `(a, b, c)`.
    pub fn weights(&self) -> (f64, f64, f64) {
        (self.a, self.b, self.c)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    /// The three level sums in the fixed order `[a+b, a+c, b+c]`.
    pub fn level_sums(&self) -> [f64; 3] {
        [self.a + self.b, self.a + self.c, self.b + self.c]
    }

    /// For each eigenvector (in ascending-eigenvalue order) the exact level
    /// sum it belongs to and the reading of the third squared component on
    /// that level: 0 on the `a+b` level, 1 on `a+c` and `b+c`.
    pub fn level_labels(&self) -> [(f64, u8); 3] {
        let targets = [(self.a + self.b, 0u8), (self.a + self.c, 1u8), (self.b + self.c, 1u8)];
        let mut labels = [(0.0, 0u8); 3];
        let mut claimed = [false; 3];
        for (k, &lambda) in self.spectrum.eigenvalues().iter().enumerate() {
            let (best, _) = targets
                .iter()
                .enumerate()
                .map(|(i, &(sum, _))| (i, (lambda - sum).abs()))
                .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                .expect("three candidate levels");
            labels[k] = targets[best];
            claimed[best] = true;
        }
        debug_assert!(
            claimed.iter().all(|&c| c),
            "each level sum must be claimed by exactly one eigenvalue"
        );
        labels
    }
}

/// Constructs the maximal operator for the tripod at azimuth `phi` with
/// pairwise distinct weights.
pub fn maximal_operator(phi: f64, a: f64, b: f64, c: f64) -> Result<MaximalOperator, SpinError> {
    for (name, value) in [("phi", phi), ("a", a), ("b", b), ("c", c)] {
        if !value.is_finite() {
            return Err(SpinError::NonFinite { name, value });
        }
    }
    if a == b || b == c || a == c {
        return Err(SpinError::DegenerateWeights { a, b, c });
    }
    let diag = C64::new((a + b + 2.0 * c) / 2.0, 0.0);
    let mid = C64::new(a + b, 0.0);
    let corner = C64::new((-2.0 * phi).cos(), (-2.0 * phi).sin()) * ((a - b) / 2.0);
    let zero = C64::new(0.0, 0.0);
    let matrix = ComplexMatrix::new(
        3,
        3,
        vec![diag, zero, corner, zero, mid, zero, corner.conj(), zero, diag],
    )
    .expect("3x3 literal");
    let spectrum = matrix
        .eig_hermitian()
        .expect("closed form is Hermitian by construction");
    Ok(MaximalOperator {
        phi,
        a,
        b,
        c,
        matrix,
        spectrum,
    })
}

/// Recovers the squared spin component `component` (1, 2 or 3) of the tripod
/// from the maximal operator alone, as a quadratic polynomial in it.
///
/// The third component uses the explicit quadratic
/// `(U^2 - (a+b+2c) U + 2(a+b)c I) / ((c-b)(a-c))`; the other two use
/// Lagrange interpolation on the spectrum `{a+b, a+c, b+c}` with target
/// readings (1, 1, 0) and (1, 0, 1) respectively. Either way only `U` and
/// its weights enter - no tripod matrices - which is the point: the squared
/// components are counterfactually available from a single maximal
/// measurement.
pub fn reconstruct_component(
    u: &MaximalOperator,
    component: usize,
) -> Result<ComplexMatrix, SpinError> {
    let (a, b, c) = (u.a, u.b, u.c);
    let m = u.matrix();
    match component {
        3 => {
            let m2 = m.mat_mul(m)?;
            let shifted = m2.sub(&m.scale_re(a + b + 2.0 * c))?;
            let constant = ComplexMatrix::identity(3).scale_re(2.0 * (a + b) * c);
            let numerator = shifted.add(&constant)?;
            Ok(numerator.scale_re(1.0 / ((c - b) * (a - c))))
        }
        1 | 2 => {
            let levels = u.level_sums();
            let targets: [f64; 3] = if component == 1 {
                [1.0, 1.0, 0.0]
            } else {
                [1.0, 0.0, 1.0]
            };
            let mut acc = ComplexMatrix::zeros(3, 3);
            for (k, (&level_k, &target)) in levels.iter().zip(targets.iter()).enumerate() {
                if target == 0.0 {
                    continue;
                }
                let mut term = ComplexMatrix::identity(3);
                let mut denom = 1.0;
                for (j, &level_j) in levels.iter().enumerate() {
                    if j == k {
                        continue;
                    }
                    let shifted = m.sub(&ComplexMatrix::identity(3).scale_re(level_j))?;
                    term = term.mat_mul(&shifted)?;
                    denom *= level_k - level_j;
                }
                acc = acc.add(&term.scale_re(target / denom))?;
            }
            Ok(acc)
        }
        other => Err(SpinError::InvalidComponent(other)),
    }
}

/// Residuals of the algebraic identities tying the unrotated tripod (azimuth
/// 0) to the tripod rotated to azimuth `phi`. All fields except the two
/// `cross_*` entries vanish identically; `cross_first` is the operational
/// incompatibility between the two contexts and grows like `|sin(2*phi)|/2`,
/// while `cross_third` stays zero because the third axis is shared.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    /// Azimuth of the rotated tripod, in radians.
    pub phi: f64,
    /// Max commutator norm over pairs inside the unrotated triple.
    pub base_commutators: f64,
    /// Max commutator norm over pairs inside the rotated triple.
    pub rotated_commutators: f64,
    /// Max `|M^2 - M|` over all six squared components.
    pub idempotence: f64,
    /// `|sum - 2I|` for the unrotated triple.
    pub sum_rule_base: f64,
    /// `|sum - 2I|` for the rotated triple.
    pub sum_rule_rotated: f64,
    /// `|[J3^2, J3'^2]|` across the two triples (shared observable).
    pub cross_third: f64,
    /// `|[J1^2, J1'^2]|` across the two triples (incompatible pair).
    pub cross_first: f64,
}

/// Computes [`IdentityReport`] for the context pair `(0, phi)`.
///
/// # Panics
/// Panics if `phi` is not finite.
pub fn verify_identities(phi: f64) -> IdentityReport {
    let base = squared_spin_triple(0.0);
    let rotated = squared_spin_triple(phi);

    let pair_residual = |triple: &SquaredSpinTriple| {
        let ms = triple.members();
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in (i + 1)..3 {
                let comm = ms[i]
                    .matrix()
                    .commutator(ms[j].matrix())
                    .expect("members share a shape");
                worst = worst.max(comm.max_abs());
            }
        }
        worst
    };

    let idempotence = base
        .members()
        .iter()
        .chain(rotated.members().iter())
        .map(|obs| {
            let m = obs.matrix();
            m.mat_mul(m).expect("square").max_abs_diff(m)
        })
        .fold(0.0_f64, f64::max);

    let two_identity = ComplexMatrix::identity(3).scale_re(2.0);
    let cross = |lhs: &Observable, rhs: &Observable| {
        lhs.matrix()
            .commutator(rhs.matrix())
            .expect("members share a shape")
            .max_abs()
    };

    IdentityReport {
        phi,
        base_commutators: pair_residual(&base),
        rotated_commutators: pair_residual(&rotated),
        idempotence,
        sum_rule_base: base.sum().max_abs_diff(&two_identity),
        sum_rule_rotated: rotated.sum().max_abs_diff(&two_identity),
        cross_third: cross(base.third(), rotated.third()),
        cross_first: cross(base.first(), rotated.first()),
    }
}

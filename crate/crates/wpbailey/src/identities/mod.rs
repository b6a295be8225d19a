//! Builders for the named series (`f₁`, `f₂`, `f`, `ψ`, the cubic lattice
//! theta series) and the registry of verifiable identities.

pub mod defs;
pub mod registry;

pub use defs::{F1Variant, f1, f2_closed, f2_from_pair, f_blocks, psi_product, psi_sum};
pub use registry::{
    all_ids, get_entry, identity_sides_exact, identity_sides_numeric, registry, verify_exact,
    verify_numeric, BackendChoice, IdentityEntry, IdentityParams, Mismatch, VerificationReport,
};

use crate::backend::{Backend, ExactBackend};
use crate::error::Result;
use crate::qseries::{QMonomial, QSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsiForm {
    Sum,
    Product,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaAForm {
    Lattice,
    Lambert,
}

/// `f₁(a, q^base)` in the requested representation, truncated at `order`.
pub fn f1_series(variant: F1Variant, a: &QMonomial, base: i64, order: i64) -> Result<QSeries> {
    let b = ExactBackend::new(order);
    f1(&b, variant, &a.clone(), base)
}

/// `f₂(a, q^base) = -Σ 2a qⁿ/(1 - a²q²ⁿ)`, truncated at `order`.
pub fn f2_series(a: &QMonomial, base: i64, order: i64) -> Result<QSeries> {
    let b = ExactBackend::new(order);
    f2_closed(&b, &a.clone(), base)
}

/// The four-block Lambert combination `f(a, k, z, q^base)`.
pub fn f_series(a: &QMonomial, k: &QMonomial, z: &QMonomial, base: i64, order: i64) -> Result<QSeries> {
    let b = ExactBackend::new(order);
    f_blocks(&b, &a.clone(), &k.clone(), &z.clone(), base)
}

/// `ψ(q^base)` as the triangular-exponent sum or the infinite product.
pub fn theta_psi(base: i64, order: i64, form: PsiForm) -> Result<QSeries> {
    let b = ExactBackend::new(order);
    match form {
        PsiForm::Sum => psi_sum(&b, base),
        PsiForm::Product => psi_product(&b, base),
    }
}

/// The cubic theta series `a(q) = Σ_{m,n} q^{m²+mn+n²}`, either as the
/// brute-force lattice sum or as `1 + 6·f₁(1/q, q³)`.
pub fn theta_a(order: i64, form: ThetaAForm) -> Result<QSeries> {
    let b = ExactBackend::new(order);
    match form {
        ThetaAForm::Lattice => b.theta_lattice_a(),
        ThetaAForm::Lambert => {
            let a = b.par_mono(&QMonomial::q_power(-1));
            let f = f1(&b, F1Variant::Lambert, &a, 3)?;
            Ok(b.add(&b.one(), &b.scale(&f, &crate::qseries::Coefficient::from_int(6))))
        }
    }
}

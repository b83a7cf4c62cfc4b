//! The PAM associated to a member of the canonical family.
//!
//! Along an attracting sheet the singular return coordinate obeys
//! `dZ/dx = p(x) Z + q(x)`, so each sheet segment acts on `Z` by an affine map.
//! Composing the segments visited by a large- and a small-amplitude excursion
//! gives the two branches of the map.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{CanonicalField, CanonicalParams, ManifoldGeometry};
use crate::numeric::quadrature::{integrate, QuadOptions};
use crate::pam::PamCoefficients;
use crate::scalar::Real;

/// Relative agreement required between the two segment-map routes.
pub const METHOD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sheet {
    #[serde(rename = "S_a1")]
    Sa1,
    #[serde(rename = "S_a2")]
    Sa2,
    #[serde(rename = "S_a3")]
    Sa3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec<T> {
    pub x_start: T,
    pub x_end: T,
    pub sheet: Sheet,
}

/// `Z ↦ slope·Z + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap<T> {
    pub slope: T,
    pub offset: T,
}

impl<T: Real> AffineMap<T> {
    pub fn identity() -> Self {
        Self { slope: T::one(), offset: T::zero() }
    }

    pub fn apply(&self, z: T) -> T {
        self.slope * z + self.offset
    }
}

/// `outer ∘ inner`.
pub fn compose<T: Real>(outer: AffineMap<T>, inner: AffineMap<T>) -> AffineMap<T> {
    AffineMap {
        slope: outer.slope * inner.slope,
        offset: outer.slope * inner.offset + outer.offset,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentMethod {
    /// Nested adaptive quadrature of the variation-of-constants formula.
    Quadrature,
    /// Closed form in terms of `P = αQ²/2 + βQ`.
    #[default]
    ClosedForm,
    /// Closed form, cross-checked against quadrature.
    Checked,
}

fn nested_opts<T: Real>() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-13f64.max(64.0 * T::epsilon().as_f64()),
        rel_tol: 1e-12f64.max(64.0 * T::epsilon().as_f64()),
        max_intervals: 10_000,
    }
}

/// Closed-form segment map. With `va = P(x_start)`, `vb = P(x_end)`:
/// slope `e^(vb - va)`, offset `(κ + λ(va + 1)) e^(vb - va) - (κ + λ(vb + 1))`.
pub fn segment_closed_form<T: Real>(field: &CanonicalField<T>, seg: &SegmentSpec<T>) -> Result<AffineMap<T>> {
    if seg.x_start == seg.x_end {
        return Ok(AffineMap::identity());
    }
    let va = field.big_p(seg.x_start)?;
    let vb = field.big_p(seg.x_end)?;
    Ok(closed_form_from_p(field.params(), va, vb))
}

pub(crate) fn closed_form_from_p<T: Real>(c: &CanonicalParams<T>, va: T, vb: T) -> AffineMap<T> {
    let e = (vb - va).exp();
    AffineMap {
        slope: e,
        offset: (c.kappa + c.lambda * (va + T::one())) * e - (c.kappa + c.lambda * (vb + T::one())),
    }
}

/// Segment map by quadrature: slope `exp ∫ p`, offset `∫ q(u) exp(∫_u^end p) du`.
pub fn segment_quadrature<T: Real>(field: &CanonicalField<T>, seg: &SegmentSpec<T>) -> Result<AffineMap<T>> {
    if seg.x_start == seg.x_end {
        return Ok(AffineMap::identity());
    }
    let opts = nested_opts::<T>();
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let fail = |e: Error| {
        failure.borrow_mut().get_or_insert(e);
        T::nan()
    };
    let int_p = |a: T, b: T| -> T {
        let r = integrate(
            |s| field.pq_unchecked(s).map_or_else(fail, |(p, _)| p),
            a,
            b,
            &opts,
        );
        r.map_or_else(fail, |v| v.value)
    };
    let slope = int_p(seg.x_start, seg.x_end).exp();
    let offset = integrate(
        |u| match field.pq_unchecked(u) {
            Ok((_, qv)) => qv * int_p(u, seg.x_end).exp(),
            Err(e) => fail(e),
        },
        seg.x_start,
        seg.x_end,
        &opts,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(AffineMap { slope, offset: offset?.value })
}

/// Relative deviation with a unit floor on the denominator.
pub fn relative_deviation<T: Real>(got: T, want: T) -> f64 {
    ((got - want).abs() / want.abs().max(T::one())).as_f64()
}

pub fn segment_affine<T: Real>(
    field: &CanonicalField<T>,
    seg: &SegmentSpec<T>,
    method: SegmentMethod,
) -> Result<AffineMap<T>> {
    match method {
        SegmentMethod::ClosedForm => segment_closed_form(field, seg),
        SegmentMethod::Quadrature => segment_quadrature(field, seg),
        SegmentMethod::Checked => {
            let fast = segment_closed_form(field, seg)?;
            let slow = segment_quadrature(field, seg)?;
            let deviation = relative_deviation(fast.slope, slow.slope)
                .max(relative_deviation(fast.offset, slow.offset));
            if !(deviation <= METHOD_TOL.max(1e3 * T::epsilon().as_f64())) {
                return Err(Error::MethodMismatch { deviation });
            }
            Ok(fast)
        }
    }
}

/// Segments of the large-amplitude path (`x̂4 → x1` on `S_a1`, then `x̂1 → x4`
/// on `S_a3`) and the small-amplitude path (`x2 → x3` on `S_a2`, then `x̂3 → x4`
/// on `S_a3`), in the order they are traversed.
pub fn branch_segments<T: Real>(g: &ManifoldGeometry<T>) -> ([SegmentSpec<T>; 2], [SegmentSpec<T>; 2]) {
    let seg = |x_start, x_end, sheet| SegmentSpec { x_start, x_end, sheet };
    (
        [seg(g.xhat4, g.x1, Sheet::Sa1), seg(g.xhat1, g.x4, Sheet::Sa3)],
        [seg(g.x2, g.x3, Sheet::Sa2), seg(g.xhat3, g.x4, Sheet::Sa3)],
    )
}

/// Affine maps of the large- and small-amplitude branches.
pub fn branch_maps<T: Real>(
    field: &CanonicalField<T>,
    geom: &ManifoldGeometry<T>,
    method: SegmentMethod,
) -> Result<(AffineMap<T>, AffineMap<T>)> {
    let (lao, sao) = branch_segments(geom);
    let run = |segs: [SegmentSpec<T>; 2]| -> Result<AffineMap<T>> {
        let first = segment_affine(field, &segs[0], method)?;
        let second = segment_affine(field, &segs[1], method)?;
        Ok(compose(second, first))
    };
    Ok((run(lao)?, run(sao)?))
}

/// Associated PAM of `field` with the given geometry and segment method.
pub fn associated_pam_with<T: Real>(
    field: &CanonicalField<T>,
    geom: &ManifoldGeometry<T>,
    method: SegmentMethod,
) -> Result<PamCoefficients<T>> {
    let (m1, m2) = branch_maps(field, geom, method)?;
    Ok(PamCoefficients {
        a11: m1.slope,
        a12: m1.offset,
        a21: m2.slope,
        a22: m2.offset,
    })
}

/// Associated PAM via the closed form.
pub fn associated_pam<T: Real>(params: &CanonicalParams<T>, geom: &ManifoldGeometry<T>) -> Result<PamCoefficients<T>> {
    let field = CanonicalField::new(*params)?;
    associated_pam_with(&field, geom, SegmentMethod::ClosedForm)
}

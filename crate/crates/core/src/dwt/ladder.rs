//! The two-step 5/3 lifting ladder, written once for both sample domains.
//!
//! Forward, on an even-length line `x` of length `N`:
//!
//! ```text
//! d[n] = x[2n+1] - P(x[2n], x[2n+2])
//! s[n] = x[2n]   + U(d[n-1], d[n])
//! ```
//!
//! with `x[N] = x[N-2]` and `d[-1] = d[0]`, which is exactly what
//! whole-sample symmetric extension of `x` produces. The float ladder uses
//! `P = (a+b)/2`, `U = (a+b)/4` and scales `d` by the bank's high-pass
//! centre tap; the integer ladder uses the floor-rounded JPEG2000 steps.

use super::filter::FilterBank;
use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::par;

pub trait Ladder: Copy + Default + Send + Sync + 'static {
    type Params: Copy + Send + Sync;

    fn params(bank: &FilterBank) -> Self::Params;
    fn predict(p: Self::Params, odd: Self, left: Self, right: Self) -> Result<Self>;
    fn update(p: Self::Params, even: Self, d_left: Self, d_right: Self) -> Result<Self>;
    fn undo_update(p: Self::Params, low: Self, d_left: Self, d_right: Self) -> Result<Self>;
    fn undo_predict(p: Self::Params, high: Self, left: Self, right: Self) -> Result<Self>;
}

#[derive(Debug, Clone, Copy)]
pub struct FloatParams {
    scale: f64,
    inv_scale: f64,
    update: f64,
}

impl Ladder for f64 {
    type Params = FloatParams;

    fn params(bank: &FilterBank) -> FloatParams {
        let scale = bank.highpass_scale();
        FloatParams {
            scale,
            inv_scale: 1.0 / scale,
            update: 0.25 / scale,
        }
    }

    #[inline(always)]
    fn predict(p: FloatParams, odd: f64, left: f64, right: f64) -> Result<f64> {
        Ok(p.scale * (odd - 0.5 * (left + right)))
    }

    #[inline(always)]
    fn update(p: FloatParams, even: f64, d_left: f64, d_right: f64) -> Result<f64> {
        Ok(even + p.update * (d_left + d_right))
    }

    #[inline(always)]
    fn undo_update(p: FloatParams, low: f64, d_left: f64, d_right: f64) -> Result<f64> {
        Ok(low - p.update * (d_left + d_right))
    }

    #[inline(always)]
    fn undo_predict(p: FloatParams, high: f64, left: f64, right: f64) -> Result<f64> {
        Ok(high * p.inv_scale + 0.5 * (left + right))
    }
}

#[inline(always)]
fn narrow(v: i64) -> Result<i32> {
    i32::try_from(v).map_err(|_| Error::Overflow(v))
}

// Arithmetic shifts on i64 are floor divisions by powers of two.
impl Ladder for i32 {
    type Params = ();

    fn params(_: &FilterBank) {}

    #[inline(always)]
    fn predict(_: (), odd: i32, left: i32, right: i32) -> Result<i32> {
        narrow(odd as i64 - ((left as i64 + right as i64) >> 1))
    }

    #[inline(always)]
    fn update(_: (), even: i32, d_left: i32, d_right: i32) -> Result<i32> {
        narrow(even as i64 + ((d_left as i64 + d_right as i64 + 2) >> 2))
    }

    #[inline(always)]
    fn undo_update(_: (), low: i32, d_left: i32, d_right: i32) -> Result<i32> {
        narrow(low as i64 - ((d_left as i64 + d_right as i64 + 2) >> 2))
    }

    #[inline(always)]
    fn undo_predict(_: (), high: i32, left: i32, right: i32) -> Result<i32> {
        narrow(high as i64 + ((left as i64 + right as i64) >> 1))
    }
}

/// Splits one line into its low and high halves.
pub(crate) fn split_line<L: Ladder>(
    p: L::Params,
    x: &[L],
    low: &mut [L],
    high: &mut [L],
) -> Result<()> {
    let len = x.len();
    let half = len / 2;
    debug_assert!(len >= 2 && len.is_multiple_of(2));
    debug_assert!(low.len() == half && high.len() == half);
    for n in 0..half {
        let right = if 2 * n + 2 < len { x[2 * n + 2] } else { x[len - 2] };
        high[n] = L::predict(p, x[2 * n + 1], x[2 * n], right)?;
    }
    for n in 0..half {
        let d_left = high[n.saturating_sub(1)];
        low[n] = L::update(p, x[2 * n], d_left, high[n])?;
    }
    Ok(())
}

/// Inverse of [`split_line`].
pub(crate) fn merge_line<L: Ladder>(
    p: L::Params,
    low: &[L],
    high: &[L],
    out: &mut [L],
) -> Result<()> {
    let half = low.len();
    debug_assert!(high.len() == half && out.len() == 2 * half);
    for n in 0..half {
        let d_left = high[n.saturating_sub(1)];
        out[2 * n] = L::undo_update(p, low[n], d_left, high[n])?;
    }
    for n in 0..half {
        let right = out[2 * (n + 1).min(half - 1)];
        out[2 * n + 1] = L::undo_predict(p, high[n], out[2 * n], right)?;
    }
    Ok(())
}

/// Applies the ladder along every row: returns the (low, high) half-width
/// planes.
pub(crate) fn split_rows<L: Ladder>(p: L::Params, src: &Plane<L>) -> Result<(Plane<L>, Plane<L>)> {
    let (w, h) = src.dims();
    let half = w / 2;
    let mut low = Plane::zeros(half, h);
    let mut high = Plane::zeros(half, h);
    par::try_for_each_row_pair(
        low.as_mut_slice(),
        half,
        high.as_mut_slice(),
        half,
        |y, lrow, hrow| split_line(p, src.row(y), lrow, hrow),
    )?;
    Ok((low, high))
}

pub(crate) fn merge_rows<L: Ladder>(p: L::Params, low: &Plane<L>, high: &Plane<L>) -> Result<Plane<L>> {
    let (half, h) = low.dims();
    let w = 2 * half;
    let mut out = Plane::zeros(w, h);
    par::try_for_each_row(out.as_mut_slice(), w, |y, row| {
        merge_line(p, low.row(y), high.row(y), row)
    })?;
    Ok(out)
}

/// Applies the ladder down every column: returns the (low, high)
/// half-height planes. Works a whole row at a time so memory access stays
/// sequential.
pub(crate) fn split_columns<L: Ladder>(p: L::Params, src: &Plane<L>) -> Result<(Plane<L>, Plane<L>)> {
    let (w, h) = src.dims();
    let half = h / 2;
    let mut high = Plane::zeros(w, half);
    par::try_for_each_row(high.as_mut_slice(), w, |n, row| {
        let left = src.row(2 * n);
        let odd = src.row(2 * n + 1);
        let right = src.row(if 2 * n + 2 < h { 2 * n + 2 } else { h - 2 });
        for x in 0..w {
            row[x] = L::predict(p, odd[x], left[x], right[x])?;
        }
        Ok(())
    })?;
    let mut low = Plane::zeros(w, half);
    par::try_for_each_row(low.as_mut_slice(), w, |n, row| {
        let even = src.row(2 * n);
        let d_left = high.row(n.saturating_sub(1));
        let d_right = high.row(n);
        for x in 0..w {
            row[x] = L::update(p, even[x], d_left[x], d_right[x])?;
        }
        Ok(())
    })?;
    Ok((low, high))
}

pub(crate) fn merge_columns<L: Ladder>(p: L::Params, low: &Plane<L>, high: &Plane<L>) -> Result<Plane<L>> {
    let (w, half) = low.dims();
    let mut even = Plane::zeros(w, half);
    par::try_for_each_row(even.as_mut_slice(), w, |n, row| {
        let s = low.row(n);
        let d_left = high.row(n.saturating_sub(1));
        let d_right = high.row(n);
        for x in 0..w {
            row[x] = L::undo_update(p, s[x], d_left[x], d_right[x])?;
        }
        Ok(())
    })?;
    let mut out = Plane::zeros(w, 2 * half);
    par::try_for_each_row(out.as_mut_slice(), 2 * w, |n, pair| {
        let (even_out, odd_out) = pair.split_at_mut(w);
        let left = even.row(n);
        let right = even.row((n + 1).min(half - 1));
        let d = high.row(n);
        even_out.copy_from_slice(left);
        for x in 0..w {
            odd_out[x] = L::undo_predict(p, d[x], left[x], right[x])?;
        }
        Ok(())
    })?;
    Ok(out)
}

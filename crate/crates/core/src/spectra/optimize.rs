use crate::error::{Error, Result};

/// Search interval is `[ETA_MARGIN, 1 - ETA_MARGIN]`.
pub const ETA_MARGIN: f64 = 1e-4;

const SCAN_POINTS: usize = 2001;
const ETA_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaMinimum {
    pub eta: f64,
    pub value: f64,
}

/// Global minimum of `f` over `η ∈ [1e-4, 1 - 1e-4]`: a uniform scan picks the basin, then
/// golden-section search narrows it to `1e-10` in η.
pub fn minimize_over_eta<F>(f: F) -> Result<EtaMinimum>
where
    F: Fn(f64) -> Result<f64>,
{
    let eval = |eta: f64| -> Result<f64> {
        let v = f(eta)?;
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective { eta });
        }
        Ok(v)
    };
    let (lo, hi) = (ETA_MARGIN, 1.0 - ETA_MARGIN);
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let mut best = (0, f64::INFINITY);
    for i in 0..SCAN_POINTS {
        let v = eval(lo + i as f64 * step)?;
        if v < best.1 {
            best = (i, v);
        }
    }
    let mut a = lo + best.0.saturating_sub(1) as f64 * step;
    let mut b = (lo + (best.0 + 1) as f64 * step).min(hi);

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (eval(c)?, eval(d)?);
    while b - a > ETA_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d)?;
        }
    }
    let eta = 0.5 * (a + b);
    let value = eval(eta)?;
    // the scan point itself may beat the bracket when the minimum sits on the margin
    if best.1 < value {
        return Ok(EtaMinimum { eta: lo + best.0 as f64 * step, value: best.1 });
    }
    Ok(EtaMinimum { eta, value })
}

pub mod binfty;
pub mod det;
pub mod grf;
pub mod zonoid;

/// Parses a finite float; JSON has no infinities.
pub(crate) fn finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a finite number, got {s}"))
    }
}

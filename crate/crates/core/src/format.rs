/// Formats a float with 12 significant digits in scientific notation.
pub fn sig12<T: crate::Real>(x: T) -> String {
    format!("{:.11e}", x.to_f64_lossy())
}

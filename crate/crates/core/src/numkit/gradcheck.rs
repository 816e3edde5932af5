/// Central-difference gradient `(f(θ + h eᵢ) − f(θ − h eᵢ)) / 2h`.
pub fn finite_diff_gradient<F>(mut f: F, theta: &[f64], h: f64) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    assert!(h > 0.0, "step must be positive");
    let mut probe = theta.to_vec();
    (0..theta.len())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + h;
            let up = f(&probe);
            probe[i] = orig - h;
            let down = f(&probe);
            probe[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square() {
        let g = finite_diff_gradient(|t| t[0] * t[0], &[3.0], 1e-5);
        assert!((g[0] - 6.0).abs() < 1e-6);
    }

    #[test]
    fn constant_function() {
        let g = finite_diff_gradient(|_| 4.2, &[1.0, -2.0, 3.0], 1e-5);
        assert_eq!(g, vec![0.0; 3]);
    }
}

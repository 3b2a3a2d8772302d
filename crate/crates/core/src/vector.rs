//! Minimal vector-space interface for integrator states.

/// Fixed-size state that an explicit Runge-Kutta scheme can combine.
pub trait Vector: Copy + core::fmt::Debug {
    fn zeroed() -> Self;

    /// `self + a * x`.
    fn axpy(self, a: f64, x: &Self) -> Self;

    /// Adds `sum (err_i / (atol + rtol max(|y0_i|, |y1_i|)))^2` and the component
    /// count to `acc`.
    fn accumulate_error(&self, y0: &Self, y1: &Self, rtol: f64, atol: f64, acc: &mut (f64, usize));

    fn all_finite(&self) -> bool;

    /// Largest absolute component difference.
    fn max_abs_diff(&self, other: &Self) -> f64;
}

impl<const N: usize> Vector for [f64; N] {
    #[inline]
    fn zeroed() -> Self {
        [0.0; N]
    }

    #[inline]
    fn axpy(mut self, a: f64, x: &Self) -> Self {
        for (s, xi) in self.iter_mut().zip(x) {
            *s += a * xi;
        }
        self
    }

    #[inline]
    fn accumulate_error(&self, y0: &Self, y1: &Self, rtol: f64, atol: f64, acc: &mut (f64, usize)) {
        for i in 0..N {
            let sk = atol + rtol * y0[i].abs().max(y1[i].abs());
            let r = self[i] / sk;
            acc.0 += r * r;
        }
        acc.1 += N;
    }

    fn all_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl<A: Vector, B: Vector> Vector for (A, B) {
    #[inline]
    fn zeroed() -> Self {
        (A::zeroed(), B::zeroed())
    }

    #[inline]
    fn axpy(self, a: f64, x: &Self) -> Self {
        (self.0.axpy(a, &x.0), self.1.axpy(a, &x.1))
    }

    #[inline]
    fn accumulate_error(&self, y0: &Self, y1: &Self, rtol: f64, atol: f64, acc: &mut (f64, usize)) {
        self.0.accumulate_error(&y0.0, &y1.0, rtol, atol, acc);
        self.1.accumulate_error(&y0.1, &y1.1, rtol, atol, acc);
    }

    fn all_finite(&self) -> bool {
        self.0.all_finite() && self.1.all_finite()
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .max_abs_diff(&other.0)
            .max(self.1.max_abs_diff(&other.1))
    }
}

/// Components carried along on the step sequence chosen for the rest of the
/// state: they take part in every stage but not in the error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Passive<V>(pub V);

impl<V: Vector> Vector for Passive<V> {
    #[inline]
    fn zeroed() -> Self {
        Passive(V::zeroed())
    }

    #[inline]
    fn axpy(self, a: f64, x: &Self) -> Self {
        Passive(self.0.axpy(a, &x.0))
    }

    #[inline]
    fn accumulate_error(
        &self,
        _y0: &Self,
        _y1: &Self,
        _rtol: f64,
        _atol: f64,
        _acc: &mut (f64, usize),
    ) {
    }

    fn all_finite(&self) -> bool {
        self.0.all_finite()
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.max_abs_diff(&other.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_state_combines_componentwise() {
        let a = ([1.0, 2.0], [3.0]);
        let b = ([0.5, -1.0], [2.0]);
        assert_eq!(a.axpy(2.0, &b), ([2.0, 0.0], [7.0]));
        let mut acc = (0.0, 0);
        b.accumulate_error(&a, &a, 0.0, 1.0, &mut acc);
        assert_eq!(acc, (0.25 + 1.0 + 4.0, 3));
        assert_eq!(a.max_abs_diff(&b), 3.0);
    }

    #[test]
    fn passive_components_skip_error_norm() {
        let a = ([1.0], Passive([3.0]));
        let b = ([0.5], Passive([2.0]));
        assert_eq!(a.axpy(2.0, &b), ([2.0], Passive([7.0])));
        let mut acc = (0.0, 0);
        b.accumulate_error(&a, &a, 0.0, 1.0, &mut acc);
        assert_eq!(acc, (0.25, 1));
    }
}
